#pragma once

// Fourth-order exponential time differencing (Cox-Matthews ETDRK4) for the
// reduced system. The linear symbol is constant in time and diagonal in the
// eigenbasis w+- = (u +- v)/sqrt 2, so each Fourier mode of each branch is a
// scalar stiff ODE whose linear part is advanced exactly.

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gg/functionals.hpp"
#include "gg/model.hpp"

namespace gg {

/// phi_1, phi_2, phi_3 at z by averaging the closed forms over a circle of
/// radius 1 around z (32 nodes). Accurate where the closed forms cancel.
std::array<Complex, 3> phi_functions(Complex z);

struct EtdWeights {
  Complex e;       // exp(z)
  Complex e_half;  // exp(z/2)
  Complex q;       // dt * (exp(z/2) - 1) / z
  Complex f1;      // dt * (phi1 - 3 phi2 + 4 phi3)
  Complex f2;      // dt * (phi2 - 2 phi3)
  Complex f3;      // dt * (4 phi3 - phi2)
};

EtdWeights etd_weights(Complex lambda, double dt);

class EtdTables {
 public:
  EtdTables(const GridSpec& grid, const ValidatedCoefficients& c, double dt);

  double dt() const { return dt_; }
  const GridSpec& grid() const { return grid_; }
  const CoefficientSet& coefficients() const { return coeffs_; }

  /// Weights for wavenumber kappa in [0, n_modes] on the + or - branch.
  const EtdWeights& plus(std::size_t kappa) const { return plus_[kappa]; }
  const EtdWeights& minus(std::size_t kappa) const { return minus_[kappa]; }

 private:
  GridSpec grid_;
  CoefficientSet coeffs_;
  double dt_;
  std::vector<EtdWeights> plus_;
  std::vector<EtdWeights> minus_;
};

/// Throws std::invalid_argument for dt <= 0.
EtdTables build_tables(const GridSpec& grid, const ValidatedCoefficients& c, double dt);

/// Eigenvalues used on the grid. Identical to linear_symbol except at the
/// Nyquist wavenumber, where the odd derivative vanishes and only damping is
/// left.
std::pair<Complex, Complex> grid_eigenvalues(const GridSpec& grid, const ValidatedCoefficients& c,
                                             std::size_t kappa);

enum class Nonlinearity { enabled, disabled };

/// One ETDRK4 step. The mean mode is re-zeroed; `mean_drift`, when given,
/// receives the largest |coeff(0)| seen before that reset.
SimState step(const SimState& s, const EtdTables& tables, const ValidatedCoefficients& c,
              Nonlinearity nl = Nonlinearity::enabled, double* mean_drift = nullptr);

/// Exact solution of the linear part (dispersion + damping, no M, N
/// couplings) at time t.
SimState linear_exact_solution(const SimState& initial, const ValidatedCoefficients& c, double t);

inline constexpr unsigned kDefaultResolvedModes = 2;

/// dt = 0.4 / ((2 pi kappa_r)^3 (1 + |a3|)): the fastest dispersive phase
/// among wavenumbers up to kappa_r turns by 0.4 rad per step. Stability does
/// not need this; accuracy of the nonlinear stages on the modes that carry
/// the energy does.
double default_time_step(const ValidatedCoefficients& c, unsigned resolved_modes = kDefaultResolvedModes);

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, const std::string& what) : std::runtime_error(what), time_(t) {}
  /// Time at the end of the first step that produced a bad state.
  double time() const { return time_; }

 private:
  double time_;
};

struct DiagnosticSeries {
  std::vector<FunctionalRecord> records;
  unsigned n_max = kDefaultMaxOrder;
  /// Largest |coeff(0)| of u or v observed before each step's reset.
  double max_mean_drift = 0.0;
};

using Observer = std::function<void(const SimState&)>;

struct EvolveOptions {
  double t_final = 10.0;
  double dt = 0.0;              // <= 0 selects default_time_step
  unsigned resolved_modes = kDefaultResolvedModes;
  double observe_every = 0.1;   // a multiple of dt, or below dt for every step
  unsigned n_max = kDefaultMaxOrder;
  Nonlinearity nonlinearity = Nonlinearity::enabled;
  /// The exact flow multiplies int u^2 + v^2 by exp(-2 k dt) every step. A
  /// step whose departure from that, relative to the expected value, exceeds
  /// this is a breakdown.
  double l2_step_tolerance = 1e-4;
};

struct EvolveResult {
  DiagnosticSeries series;
  SimState final_state;
  double dt = 0.0;
  long steps = 0;
};

/// Steps to t_final, recording functionals and calling observers at t0 and
/// every observe_every. Throws BlowUpError on a non-finite mode or when a
/// step breaks the L2 decay law.
EvolveResult evolve(SimState state, const ValidatedCoefficients& c, const EvolveOptions& opts,
                    std::span<const Observer> observers = {});

}  // namespace gg
