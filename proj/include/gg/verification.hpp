#pragma once

// Numerical certificates for the decay analysis: identity residuals, the
// Holder/Poincare and product inequalities, and decay-rate fits.
//
// Time derivatives on the left of every identity come from substituting the
// model right-hand side (chain rule); right sides are evaluated by direct
// quadrature of the closed-form integrals. The two paths share no code
// beyond the spectral primitives.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gg/integrator.hpp"

namespace gg {

struct IdentityReport {
  std::string id;
  bool exact = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  /// Exact identities: |lhs| + sum of |rhs term|. Approximate ones: the
  /// quadratic seminorm the dropped terms are measured against.
  double normalizer = 0.0;
  double relative_residual = 0.0;
};

/// d/dt int u^2 + v^2 = -2k int u^2 + v^2.
IdentityReport residual_l2(const SimState& s, const ValidatedCoefficients& c);

/// The four-integral expression for d/dt int u_n^2 + v_n^2, valid for any
/// means. Throws std::invalid_argument for n > n_max.
IdentityReport residual_general_n(const SimState& s, const ValidatedCoefficients& c, unsigned n,
                                  unsigned n_max = kDefaultMaxOrder);

/// d/dt int u_n^2 + v_n^2 ~ -2k int u_n^2 + v_n^2 for n >= 3; the residual
/// is cubic, normalized by int u_n^2 + v_n^2.
IdentityReport residual_general_n_approx(const SimState& s, const ValidatedCoefficients& c,
                                         unsigned n, unsigned n_max = kDefaultMaxOrder);

/// Main H1 identity followed by its four constituents: H1_MAIN,
/// H1_SUB:grad_sq, H1_SUB:grad_cross, H1_SUB:cubic, H1_SUB:mixed_cubic.
/// Requires zero means.
std::vector<IdentityReport> residual_h1(const SimState& s, const ValidatedCoefficients& c);

/// Exact H2_SUB:hess_sq and H2_SUB:hess_cross, then the approximate
/// H2_SUB:grad_sq_weighted, H2_SUB:mixed_v, H2_SUB:mixed_u and H2_MAIN.
/// Requires zero means.
std::vector<IdentityReport> residual_h2(const SimState& s, const ValidatedCoefficients& c);

/// Every identity id known to the battery, in report order.
std::vector<std::string> identity_ids(unsigned n_max = kDefaultMaxOrder);

/// Reports for the listed ids (all when `only` is empty).
std::vector<IdentityReport> identity_battery(const SimState& s, const ValidatedCoefficients& c,
                                             unsigned n_max = kDefaultMaxOrder,
                                             std::span<const std::string> only = {});

struct ScalingReport {
  std::string id;
  std::vector<double> amplitudes;
  std::vector<double> relative_residuals;
  /// relative_residuals[i + 1] / relative_residuals[i].
  std::vector<double> ratios;
};

/// Evaluates the approximate identity `id` on amplitude * s for each
/// amplitude.
ScalingReport amplitude_scaling(const std::string& id, const SimState& s,
                                const ValidatedCoefficients& c, std::span<const double> amplitudes,
                                unsigned n_max = kDefaultMaxOrder);

/// The state scaled so that int u_n^2 + v_n^2 = 1. Throws for a state whose
/// n-th seminorm vanishes.
SimState normalize_seminorm(const SimState& s, unsigned n);

/// Lp norm on a 4x oversampled grid; p = infinity gives the grid maximum.
double lp_norm(const SpectralField& f, double p);

/// ||u||_p <= ||u||_q when p <= q, and ||u - [u]||_p <= ||u_x||_q, each
/// with 1e-10 slack.
bool check_poincare_holder(const SpectralField& f, double p, double q);

class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Samples of u_m, v_m for m = 0..n on a grid fine enough for products of
/// up to `max_factors` of them.
struct DerivativeTable {
  unsigned n = 0;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> v;
  double seminorm_n = 0.0;       // int u_n^2 + v_n^2
  double seminorm_below = 0.0;   // int u_{n-1}^2 + v_{n-1}^2
};

/// Throws HypothesisError unless n >= 1 and both fields have zero mean.
DerivativeTable derivative_table(const SpectralField& u, const SpectralField& v, unsigned n,
                                 unsigned max_factors = 4);

struct ProductBound {
  double integral = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// |int prod u_m^alpha_m v_m^beta_m| against
/// (int u_n^2 + v_n^2)(int u_{n-1}^2 + v_{n-1}^2)^((d - 2)/2).
/// Throws HypothesisError when 2(alpha_n + beta_n) + alpha_{n-1} + beta_{n-1}
/// exceeds 4, when d < 2, or when the exponent arrays do not have n + 1
/// entries.
ProductBound evaluate_product_bound(const DerivativeTable& table, std::span<const unsigned> alphas,
                                    std::span<const unsigned> betas);

bool check_product_bound(const SpectralField& u, const SpectralField& v,
                         std::span<const unsigned> alphas, std::span<const unsigned> betas,
                         unsigned n);

/// All (alphas, betas) with entries for m = 0..n satisfying the two
/// hypotheses and 2 <= d <= max_degree.
std::vector<std::pair<std::vector<unsigned>, std::vector<unsigned>>> admissible_exponents(
    unsigned n, unsigned max_degree);

struct DecayFit {
  std::string quantity_id;
  double t_start = 0.0;
  double t_end = 0.0;
  double fitted_rate = 0.0;  // slope of log(quantity) against t
  double target_rate = 0.0;  // -2k
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Value of `quantity_id` in a record: "energy", "seminorm_sq_<n>", "f1",
/// "f2". Throws std::invalid_argument for unknown ids.
double quantity_value(const FunctionalRecord& r, const std::string& quantity_id);

/// Least-squares fit of log(quantity) on [t_start, t_end]. Points at or
/// below 1e-13 of the first value in the series are skipped. Throws
/// std::invalid_argument when fewer than two points remain.
DecayFit fit_decay_rate(const DiagnosticSeries& series, const std::string& quantity_id,
                        double t_start, double t_end, double k);

/// Zero-mean fields with coefficients amplitude * exp(-kappa) * (complex
/// standard normal) for 1 <= kappa <= band.
SimState random_smooth_state(const GridSpec& grid, std::uint64_t seed, double amplitude,
                             std::size_t band = 8);

}  // namespace gg
