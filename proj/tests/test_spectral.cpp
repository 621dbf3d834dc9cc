#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gg/spectral.hpp"

using namespace gg;

namespace {

constexpr double kPi = std::numbers::pi;

// Random trigonometric polynomial with wavenumbers up to `band`.
SpectralField random_field(const GridSpec& grid, std::size_t band, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SpectralField f(grid);
  for (std::size_t k = 0; k <= band; ++k)
    f.set_coeff(static_cast<long>(k), {normal(rng), k == 0 ? 0.0 : normal(rng)});
  return f;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0;
  for (long k = 0; k <= static_cast<long>(a.grid().n_modes); ++k)
    m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
  return m;
}

}  // namespace

TEST_CASE("make_grid applies the two-thirds rule") {
  auto g = make_grid(128);
  CHECK(g.n_points == 128);
  CHECK(g.n_modes == 64);
  CHECK(g.dealias_cutoff == 42);

  g = make_grid(8);
  CHECK(g.n_modes == 4);
  CHECK(g.dealias_cutoff == 2);

  CHECK_THROWS_AS(make_grid(7), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(6), std::invalid_argument);
}

TEST_CASE("from_samples normalizes to the mean") {
  const auto g = make_grid(16);
  std::vector<double> three(16, 3.0);
  auto f = from_samples(g, three);
  CHECK(f.coeff(0).real() == doctest::Approx(3.0));
  for (long k = 1; k <= 8; ++k) CHECK(std::abs(f.coeff(k)) < 1e-15);

  auto s = from_function(g, [](double x) { return std::sin(2 * kPi * x); });
  CHECK(std::abs(s.coeff(1) - Complex(0, -0.5)) < 1e-15);
  CHECK(std::abs(s.coeff(-1) - Complex(0, 0.5)) < 1e-15);
  for (long k = 2; k <= 8; ++k) CHECK(std::abs(s.coeff(k)) < 1e-15);

  // sin cos = sin(4 pi x) / 2, compared against direct sampling.
  auto sc = from_function(g, [](double x) { return std::sin(2 * kPi * x) * std::cos(2 * kPi * x); });
  auto half = from_function(g, [](double x) { return 0.5 * std::sin(4 * kPi * x); });
  CHECK(max_abs_diff(sc, half) < 1e-15);
  CHECK(std::abs(sc.coeff(2) - Complex(0, -0.25)) < 1e-15);
  CHECK(std::abs(sc.coeff(-2) - Complex(0, 0.25)) < 1e-15);

  std::vector<double> wrong(15);
  CHECK_THROWS_AS(from_samples(g, wrong), std::invalid_argument);
}

TEST_CASE("derivative of trigonometric fields") {
  const auto g = make_grid(32);
  auto s = from_function(g, [](double x) { return std::sin(2 * kPi * x); });
  auto c1 = from_function(g, [](double x) { return 2 * kPi * std::cos(2 * kPi * x); });
  auto c3 = from_function(g, [](double x) { return -std::pow(2 * kPi, 3) * std::cos(2 * kPi * x); });
  CHECK(max_abs_diff(derivative(s, 1), c1) < 1e-13);
  CHECK(max_abs_diff(derivative(s, 3), c3) < 1e-10);
  CHECK(max_abs_diff(derivative(s, 0), s) == 0.0);
  CHECK(max_abs_diff(derivative(constant_field(g, 2.5), 1), SpectralField(g)) == 0.0);
}

TEST_CASE("integral") {
  const auto g = make_grid(32);
  CHECK(integral(constant_field(g, 3.0)) == doctest::Approx(3.0));
  auto s = from_function(g, [](double x) { return std::sin(2 * kPi * x); });
  CHECK(std::abs(integral(s)) < 1e-16);
  // Closed form: int sin^2 = 1/2.
  CHECK(integral(pointwise_product(s, s)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("pointwise_product") {
  const auto g = make_grid(64);
  auto s = from_function(g, [](double x) { return std::sin(2 * kPi * x); });
  auto two = constant_field(g, 2.0);
  CHECK(max_abs_diff(pointwise_product(two, s), 2.0 * s) < 1e-15);

  auto expected = from_function(g, [](double x) { return 0.5 - 0.5 * std::cos(4 * kPi * x); });
  CHECK(max_abs_diff(pointwise_product(s, s), expected) < 1e-15);

  const double cut = static_cast<double>(g.dealias_cutoff);
  auto top = from_function(g, [cut](double x) { return std::cos(2 * kPi * cut * x); });
  auto sq = pointwise_product(top, top);
  CHECK(sq.coeff(0).real() == doctest::Approx(0.5));
  for (long k = 1; k <= static_cast<long>(g.n_modes); ++k) CHECK(std::abs(sq.coeff(k)) < 1e-15);

  CHECK_THROWS_AS(pointwise_product(s, SpectralField(make_grid(32))), std::invalid_argument);
}

TEST_CASE("round trip through collocation values") {
  std::mt19937_64 rng(7);
  const auto g = make_grid(48);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(g.n_points);
    for (auto& v : x) v = unif(rng);
    const auto back = from_samples(g, x).samples();
    for (std::size_t j = 0; j < x.size(); ++j)
      CHECK(std::abs(back[j] - x[j]) <= 1e-12 * std::max(1.0, std::abs(x[j])));
  }
}

TEST_CASE("Parseval and integration-by-parts properties") {
  std::mt19937_64 rng(11);
  const auto g = make_grid(64);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_field(g, 10, rng);
    const auto h = random_field(g, 10, rng);

    // Quadrature route vs coefficient route.
    const double quad = integrate_product({&f, &f});
    double coeff_sum = 0;
    for (long k = -static_cast<long>(g.n_modes) + 1; k <= static_cast<long>(g.n_modes); ++k)
      coeff_sum += std::norm(f.coeff(k));
    CHECK(std::abs(quad - coeff_sum) <= 1e-12 * coeff_sum);
    CHECK(std::abs(parseval_sum(f) - coeff_sum) <= 1e-12 * coeff_sum);

    const auto fx = derivative(f, 1), hx = derivative(h, 1);
    CHECK(std::abs(integrate_product({&fx, &h}) + integrate_product({&f, &hx})) < 1e-12);

    for (unsigned n = 1; n <= 5; ++n) CHECK(integral(derivative(f, n)) == 0.0);

    // int f^n f_x = 0 for n = 0..3 on a dealiased field.
    const auto fd = random_field(g, 6, rng);
    const auto fdx = derivative(fd, 1);
    CHECK(std::abs(integral(fdx)) < 1e-10);
    CHECK(std::abs(integrate_product({&fd, &fdx})) < 1e-10);
    CHECK(std::abs(integrate_product({&fd, &fd, &fdx})) < 1e-10);
    CHECK(std::abs(integrate_product({&fd, &fd, &fd, &fdx})) < 1e-10);
  }
}

TEST_CASE("integrate_product matches collocation on a much finer grid") {
  std::mt19937_64 rng(3);
  const auto g = make_grid(32);
  const auto a = random_field(g, 10, rng);
  const auto b = random_field(g, 10, rng);
  const auto c = random_field(g, 10, rng);
  const auto sa = a.samples_padded(512), sb = b.samples_padded(512), sc = c.samples_padded(512);
  double fine = 0;
  for (std::size_t j = 0; j < 512; ++j) fine += sa[j] * sb[j] * sc[j];
  fine /= 512;
  CHECK(integrate_product({&a, &b, &c}) == doctest::Approx(fine).epsilon(1e-13));
}

TEST_CASE("shift translates the field") {
  const auto g = make_grid(32);
  auto s = from_function(g, [](double x) { return std::sin(2 * kPi * x) + 0.3 * std::cos(6 * kPi * x); });
  auto shifted = from_function(g, [](double x) {
    const double y = x + 0.17;
    return std::sin(2 * kPi * y) + 0.3 * std::cos(6 * kPi * y);
  });
  CHECK(max_abs_diff(shift(s, 0.17), shifted) < 1e-14);
}
