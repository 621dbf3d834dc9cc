#include "gg/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gg {

struct ValidationAccess {
  static ValidatedCoefficients make(const CoefficientSet& c, Branch b) { return {c, b}; }
};

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::b1_positive: return "b1 > 0";
    case Constraint::b2_positive: return "b2 > 0";
    case Constraint::damping_positive: return "k > 0";
    case Constraint::b1_unit: return "b1 = 1";
    case Constraint::b2_unit: return "b2 = 1";
    case Constraint::r_zero: return "r = 0";
    case Constraint::a3_below_one: return "|a3| < 1";
    case Constraint::quadratic_relation: return "a1^2 + a2^2 = a1 + a2";
    case Constraint::a1_branch: return "(a1 - 1) a3 = 0";
    case Constraint::a2_branch: return "(a2 - 1) a3 = 0";
  }
  return "unknown";
}

std::string to_string(Branch b) {
  return b == Branch::uncoupled_dispersion ? "a3=0" : "a1=a2=1";
}

const ValidatedCoefficients& ValidationResult::get() const {
  if (value) return *value;
  std::ostringstream msg;
  msg << "invalid coefficients:";
  for (const auto& v : violations) msg << "\n  violated " << to_string(v.constraint) << ": " << v.message;
  throw std::invalid_argument(msg.str());
}

ValidationResult validate_coefficients(const CoefficientSet& c, ValidationOptions opts) {
  ValidationResult out;
  auto fail = [&](Constraint which, double value) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "got " << value;
    out.violations.push_back({which, msg.str()});
  };
  const double tol = kCoefficientTolerance;

  if (!(c.b1 > 0)) fail(Constraint::b1_positive, c.b1);
  if (!(c.b2 > 0)) fail(Constraint::b2_positive, c.b2);
  if (opts.allow_undamped ? !(c.k >= 0) : !(c.k > 0)) fail(Constraint::damping_positive, c.k);
  if (!(std::abs(c.b1 - 1.0) <= tol)) fail(Constraint::b1_unit, c.b1);
  if (!(std::abs(c.b2 - 1.0) <= tol)) fail(Constraint::b2_unit, c.b2);
  if (!(std::abs(c.r) <= tol)) fail(Constraint::r_zero, c.r);
  if (!(std::abs(c.a3) < 1.0)) fail(Constraint::a3_below_one, c.a3);
  const double quad = c.a1 * c.a1 + c.a2 * c.a2 - (c.a1 + c.a2);
  if (!(std::abs(quad) <= tol)) fail(Constraint::quadratic_relation, quad);
  if (!(std::abs((c.a1 - 1.0) * c.a3) <= tol)) fail(Constraint::a1_branch, (c.a1 - 1.0) * c.a3);
  if (!(std::abs((c.a2 - 1.0) * c.a3) <= tol)) fail(Constraint::a2_branch, (c.a2 - 1.0) * c.a3);

  if (out.violations.empty()) {
    const Branch b = std::abs(c.a3) <= tol ? Branch::uncoupled_dispersion : Branch::unit_nonlinear;
    out.value = ValidationAccess::make(c, b);
  }
  return out;
}

SimState reduce_mean(const SpectralField& phi, const SpectralField& psi) {
  require_same_grid(phi, psi);
  SimState s{phi, psi, 0.0, integral(phi), integral(psi)};
  s.u.set_coeff(0, 0.0);
  s.v.set_coeff(0, 0.0);
  return s;
}

std::pair<SpectralField, SpectralField> restore_mean(const SimState& s) {
  auto u = s.u;
  auto v = s.v;
  u.set_coeff(0, s.mean_u);
  v.set_coeff(0, s.mean_v);
  return {std::move(u), std::move(v)};
}

FieldPair nonlinear_terms(const SimState& s, const ValidatedCoefficients& c) {
  const double m = s.mean_u;
  const double n = s.mean_v;
  const auto uu = pointwise_product(s.u, s.u);
  const auto vv = pointwise_product(s.v, s.v);
  const auto uv = pointwise_product(s.u, s.v);

  // (u+M)(v+N) - MN, whose derivative is the coupling flux.
  const SpectralField cross = uv + m * s.v + n * s.u;
  SpectralField flux_u = 0.5 * uu + m * s.u + c.a1() * (0.5 * vv + n * s.v) + c.a2() * cross;
  SpectralField flux_v = 0.5 * vv + n * s.v + c.a2() * (0.5 * uu + m * s.u) + c.a1() * cross;
  return {-derivative(flux_u, 1), -derivative(flux_v, 1)};
}

FieldPair apply_linear(const SpectralField& u, const SpectralField& v,
                       const ValidatedCoefficients& c) {
  require_same_grid(u, v);
  FieldPair out{SpectralField(u.grid()), SpectralField(u.grid())};
  auto cu = u.coeffs();
  auto cv = v.coeffs();
  auto du = out.u.coeffs();
  auto dv = out.v.coeffs();
  for (std::size_t kappa = 0; kappa < cu.size(); ++kappa) {
    const auto sym = linear_symbol(c, static_cast<long>(kappa));
    du[kappa] = sym.matrix[0][0] * cu[kappa] + sym.matrix[0][1] * cv[kappa];
    dv[kappa] = sym.matrix[1][0] * cu[kappa] + sym.matrix[1][1] * cv[kappa];
  }
  // Third derivatives drop the Nyquist entry, as derivative() does.
  du.back() = -c.k() * cu.back();
  dv.back() = -c.k() * cv.back();
  return out;
}

FieldPair rhs(const SimState& s, const ValidatedCoefficients& c) {
  auto out = nonlinear_terms(s, c);
  auto lin = apply_linear(s.u, s.v, c);
  out.u += lin.u;
  out.v += lin.v;
  return out;
}

LinearSymbol linear_symbol(const ValidatedCoefficients& c, long kappa) {
  const double w = std::pow(2.0 * std::numbers::pi * static_cast<double>(kappa), 3);
  const double damp = kappa == 0 ? 0.0 : c.k();
  const Complex disp(0.0, w);  // -(2 pi i kappa)^3
  LinearSymbol s;
  s.matrix = {{{disp - damp, disp * c.a3()}, {disp * c.a3(), disp - damp}}};
  s.lambda_plus = disp * (1.0 + c.a3()) - damp;
  s.lambda_minus = disp * (1.0 - c.a3()) - damp;
  return s;
}

}  // namespace gg
