#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gg/model.hpp"

using namespace gg;

namespace {

constexpr double kPi = std::numbers::pi;

ValidatedCoefficients coeffs(double a1, double a2, double a3, double k) {
  return validate_coefficients({0.0, a1, a2, a3, 1.0, 1.0, k}).get();
}

SpectralField random_zero_mean(const GridSpec& grid, std::size_t band, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SpectralField f(grid);
  for (std::size_t k = 1; k <= band; ++k)
    f.set_coeff(static_cast<long>(k), std::exp(-double(k)) * Complex(normal(rng), normal(rng)));
  return f;
}

double sup_norm(const SpectralField& f) {
  double m = 0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

bool has_violation(const ValidationResult& r, Constraint c) {
  for (const auto& v : r.violations)
    if (v.constraint == c) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_coefficients classifies the two branches") {
  auto r = validate_coefficients({0, 1, 1, 0.5, 1, 1, 0.5});
  REQUIRE(r.ok());
  CHECK(r.value->branch() == Branch::unit_nonlinear);

  r = validate_coefficients({0, 0, 0, 0, 1, 1, 1});
  REQUIRE(r.ok());
  CHECK(r.value->branch() == Branch::uncoupled_dispersion);

  r = validate_coefficients({0, 1, 0, 0, 1, 1, 1});
  REQUIRE(r.ok());
  CHECK(r.value->branch() == Branch::uncoupled_dispersion);

  r = validate_coefficients({0, 1, 1, 1.0, 1, 1, 0.5});
  CHECK_FALSE(r.ok());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].constraint == Constraint::a3_below_one);
  CHECK_THROWS_AS(r.get(), std::invalid_argument);
}

TEST_CASE("each violated constraint is reported individually") {
  auto r = validate_coefficients({0.3, 0.9, 1, 0.5, 2, 1, 0});
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, Constraint::r_zero));
  CHECK(has_violation(r, Constraint::b1_unit));
  CHECK(has_violation(r, Constraint::damping_positive));
  CHECK(has_violation(r, Constraint::quadratic_relation));
  CHECK(has_violation(r, Constraint::a1_branch));
  CHECK_FALSE(has_violation(r, Constraint::a2_branch));
  CHECK_FALSE(has_violation(r, Constraint::a3_below_one));

  CHECK(has_violation(validate_coefficients({0, 1, 1, 0, 1, -1, 1}), Constraint::b2_positive));
  CHECK(validate_coefficients({0, 1, 1, 0, 1, 1, 0}, {.allow_undamped = true}).ok());
  CHECK_FALSE(validate_coefficients({0, 1, 1, 0, 1, 1, -1}, {.allow_undamped = true}).ok());
}

TEST_CASE("reduce_mean extracts the means") {
  const auto g = make_grid(32);
  auto phi = from_function(g, [](double x) { return 2 + std::sin(2 * kPi * x); });
  auto psi = constant_field(g, -1.0);
  auto s = reduce_mean(phi, psi);
  CHECK(s.mean_u == doctest::Approx(2.0));
  CHECK(s.mean_v == doctest::Approx(-1.0));
  CHECK(s.t == 0.0);
  CHECK(s.u.coeff(0) == Complex{});
  CHECK(std::abs(s.u.coeff(1) - Complex(0, -0.5)) < 1e-15);
  CHECK(sup_norm(s.v) < 1e-15);

  auto z = reduce_mean(SpectralField(g), SpectralField(g));
  CHECK(z.mean_u == 0.0);
  CHECK(sup_norm(z.u) == 0.0);

  auto c4 = from_function(g, [](double x) { return std::cos(4 * kPi * x); });
  auto c2 = from_function(g, [](double x) { return std::cos(2 * kPi * x); });
  auto s2 = reduce_mean(c4, c2);
  CHECK(std::abs(s2.mean_u) < 1e-16);
  CHECK(sup_norm(s2.u - c4) < 1e-16);

  CHECK_THROWS_AS(reduce_mean(phi, SpectralField(make_grid(16))), std::invalid_argument);
}

TEST_CASE("rhs of the zero state vanishes") {
  const auto g = make_grid(32);
  SimState s{SpectralField(g), SpectralField(g)};
  auto d = rhs(s, coeffs(1, 1, 0.5, 0.7));
  CHECK(sup_norm(d.u) == 0.0);
  CHECK(sup_norm(d.v) == 0.0);
}

TEST_CASE("rhs reduces to the hand-linearized operator for small data") {
  const auto g = make_grid(32);
  const double eps = 1e-6;
  const auto c = coeffs(1, 1, 0.5, 1.0);
  SimState s{from_function(g, [eps](double x) { return eps * std::sin(2 * kPi * x); }),
             SpectralField(g)};
  auto d = rhs(s, c);
  // -u_xxx - k u and -a3 u_xxx, mode by mode.
  const Complex u1 = s.u.coeff(1);
  const Complex ik3 = std::pow(Complex(0, 2 * kPi), 3);
  CHECK(std::abs(d.u.coeff(1) - (-ik3 * u1 - 1.0 * u1)) < 1e-10 * eps * 250);
  CHECK(std::abs(d.v.coeff(1) - (-0.5 * ik3 * u1)) < 1e-10 * eps * 250);
  // Quadratic terms only touch mode 2, at size O(eps^2).
  CHECK(std::abs(d.u.coeff(2)) < 10 * eps * eps);
  CHECK(std::abs(d.u.coeff(2)) > 0.0);
}

TEST_CASE("rhs preserves zero mean and the u/v symmetry") {
  std::mt19937_64 rng(5);
  const auto g = make_grid(64);
  for (int trial = 0; trial < 20; ++trial) {
    SimState s{random_zero_mean(g, 8, rng), random_zero_mean(g, 8, rng), 0.0, 0.4, -0.7};
    auto d = rhs(s, coeffs(1, 0, 0, 0.8));
    CHECK(d.u.coeff(0) == Complex{});
    CHECK(d.v.coeff(0) == Complex{});
    CHECK(integral(d.u) == 0.0);

    SimState swapped{s.v, s.u, 0.0, s.mean_v, s.mean_u};
    auto ds = rhs(swapped, coeffs(0, 1, 0, 0.8));
    CHECK(sup_norm(ds.u - d.v) <= 1e-12 * sup_norm(d.v));
    CHECK(sup_norm(ds.v - d.u) <= 1e-12 * sup_norm(d.u));
  }
}

TEST_CASE("linearization error scales quadratically in amplitude") {
  std::mt19937_64 rng(9);
  const auto g = make_grid(64);
  const auto c = coeffs(1, 1, 0.5, 1.0);
  const auto base_u = random_zero_mean(g, 6, rng);
  const auto base_v = random_zero_mean(g, 6, rng);
  std::vector<double> ratio;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    SimState s{eps * base_u, eps * base_v};
    auto d = rhs(s, c);
    auto lin = apply_linear(s.u, s.v, c);
    ratio.push_back(std::max(sup_norm(d.u - lin.u), sup_norm(d.v - lin.v)) / (eps * eps));
  }
  // Roundoff in the O(eps) linear part sets the floor at eps = 1e-6.
  CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(1e-6));
  CHECK(ratio[2] == doctest::Approx(ratio[0]).epsilon(1e-3));
}

TEST_CASE("linear_symbol eigen-decomposition") {
  const auto zero = linear_symbol(coeffs(1, 1, 0.5, 1.0), 0);
  for (auto& row : zero.matrix)
    for (auto& e : row) CHECK(e == Complex{});

  const auto d = linear_symbol(coeffs(0, 0, 0, 1.0), 1);
  const Complex expected(-1.0, std::pow(2 * kPi, 3));
  CHECK(std::abs(d.lambda_plus - expected) < 1e-12);
  CHECK(std::abs(d.lambda_minus - expected) < 1e-12);
  CHECK(d.matrix[0][1] == Complex{});

  const auto c = coeffs(1, 1, 0.5, 0.25);
  const auto s = linear_symbol(c, 2);
  const double w = std::pow(4 * kPi, 3);
  CHECK(std::abs(s.lambda_plus - Complex(-0.25, 1.5 * w)) < 1e-10);
  CHECK(std::abs(s.lambda_minus - Complex(-0.25, 0.5 * w)) < 1e-10);
  // L e = lambda e for e = (1, +-1)/sqrt 2, and P diag P^-1 = L.
  const double r = 1 / std::numbers::sqrt2;
  for (int sign : {1, -1}) {
    const Complex lam = sign == 1 ? s.lambda_plus : s.lambda_minus;
    const Complex e0 = r, e1 = sign * r;
    CHECK(std::abs(s.matrix[0][0] * e0 + s.matrix[0][1] * e1 - lam * e0) <= 1e-13 * std::abs(lam));
    CHECK(std::abs(s.matrix[1][0] * e0 + s.matrix[1][1] * e1 - lam * e1) <= 1e-13 * std::abs(lam));
  }
  // P = P^-1 = [[r, r], [r, -r]].
  const Complex rec00 = r * r * (s.lambda_plus + s.lambda_minus);
  const Complex rec01 = r * r * (s.lambda_plus - s.lambda_minus);
  CHECK(std::abs(rec00 - s.matrix[0][0]) <= 1e-13 * std::abs(s.matrix[0][0]));
  CHECK(std::abs(rec01 - s.matrix[0][1]) <= 1e-13 * std::abs(s.matrix[0][1]));
}
