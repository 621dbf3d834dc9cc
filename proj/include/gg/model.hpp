#pragma once

// The damped Gear-Grimshaw system on the unit circle, in mean-removed form:
//
//   u' + (u+M) u_x + u_xxx + a3 v_xxx + a1 (v+N) v_x + a2 ((u+M)(v+N))_x + k u = 0
//   v' + (v+N) v_x + v_xxx + a3 u_xxx + a2 (u+M) u_x + a1 ((u+M)(v+N))_x + k v = 0
//
// where M, N are the (conserved) means of the original data.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gg/spectral.hpp"

namespace gg {

struct CoefficientSet {
  double r = 0.0;
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 0.0;
  double b1 = 1.0;
  double b2 = 1.0;
  double k = 1.0;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

enum class Constraint {
  b1_positive,
  b2_positive,
  damping_positive,
  b1_unit,
  b2_unit,
  r_zero,
  a3_below_one,
  quadratic_relation,  // a1^2 + a2^2 = a1 + a2
  a1_branch,           // (a1 - 1) a3 = 0
  a2_branch,           // (a2 - 1) a3 = 0
};

std::string to_string(Constraint c);

struct Violation {
  Constraint constraint;
  std::string message;
};

enum class Branch {
  uncoupled_dispersion,  // a3 = 0, a1^2 + a2^2 = a1 + a2
  unit_nonlinear,        // 0 < |a3| < 1, a1 = a2 = 1
};

std::string to_string(Branch b);

/// Coefficients that passed validate_coefficients; only that function can
/// create one.
class ValidatedCoefficients {
 public:
  const CoefficientSet& values() const { return c_; }
  Branch branch() const { return branch_; }

  double a1() const { return c_.a1; }
  double a2() const { return c_.a2; }
  double a3() const { return c_.a3; }
  double k() const { return c_.k; }

 private:
  friend struct ValidationAccess;
  ValidatedCoefficients(const CoefficientSet& c, Branch b) : c_(c), branch_(b) {}
  CoefficientSet c_;
  Branch branch_;
};

struct ValidationOptions {
  /// Admit k = 0 (the undamped system). Used for pure-dispersion checks;
  /// none of the decay statements apply then.
  bool allow_undamped = false;
};

struct ValidationResult {
  std::optional<ValidatedCoefficients> value;
  std::vector<Violation> violations;

  bool ok() const { return value.has_value(); }
  /// Returns the validated coefficients or throws std::invalid_argument
  /// listing every violation.
  const ValidatedCoefficients& get() const;
};

inline constexpr double kCoefficientTolerance = 1e-12;

ValidationResult validate_coefficients(const CoefficientSet& c, ValidationOptions opts = {});

struct SimState {
  SpectralField u;
  SpectralField v;
  double t = 0.0;
  double mean_u = 0.0;  // M
  double mean_v = 0.0;  // N

  const GridSpec& grid() const { return u.grid(); }
};

/// Splits initial data into zero-mean fluctuations and their means; t = 0.
SimState reduce_mean(const SpectralField& phi, const SpectralField& psi);

/// Adds the stored means back, returning the solution of the original system.
std::pair<SpectralField, SpectralField> restore_mean(const SimState& s);

struct FieldPair {
  SpectralField u;
  SpectralField v;
};

/// Full time derivative (du, dv) of the reduced system.
FieldPair rhs(const SimState& s, const ValidatedCoefficients& c);

/// The nonlinear part of rhs, including the M, N couplings: everything not
/// captured by linear_symbol. Both components are exact x-derivatives.
FieldPair nonlinear_terms(const SimState& s, const ValidatedCoefficients& c);

/// Applies the linear symbol modewise: the dispersive and damping terms.
FieldPair apply_linear(const SpectralField& u, const SpectralField& v,
                       const ValidatedCoefficients& c);

struct LinearSymbol {
  std::array<std::array<Complex, 2>, 2> matrix;
  Complex lambda_plus;   // eigenvalue on (1, 1)/sqrt 2
  Complex lambda_minus;  // eigenvalue on (1, -1)/sqrt 2
};

/// L(kappa) = -[(2 pi i kappa)^3 [[1, a3], [a3, 1]] + k I], with no damping
/// on kappa = 0.
LinearSymbol linear_symbol(const ValidatedCoefficients& c, long kappa);

}  // namespace gg
