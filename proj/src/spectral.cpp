#include "gg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace gg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Highest wavenumber carrying a nonzero coefficient.
std::size_t bandwidth(const SpectralField& f) {
  auto c = f.coeffs();
  for (std::size_t k = c.size(); k-- > 0;)
    if (c[k] != Complex{}) return k;
  return 0;
}

}  // namespace

GridSpec make_grid(std::size_t n_points) {
  if (n_points < 8 || n_points % 2 != 0)
    throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n_points));
  GridSpec g;
  g.n_points = n_points;
  g.n_modes = n_points / 2;
  g.dealias_cutoff = (g.n_modes * 2) / 3;
  return g;
}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(grid.n_modes + 1) {}

SpectralField::SpectralField(const GridSpec& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.n_modes + 1)
    throw std::invalid_argument("coefficient array does not match grid");
  coeffs_.front().imag(0.0);
  coeffs_.back().imag(0.0);
}

Complex SpectralField::coeff(long kappa) const {
  const long n = static_cast<long>(grid_.n_modes);
  if (kappa > n || kappa <= -n) return {};
  if (kappa >= 0) return coeffs_[static_cast<std::size_t>(kappa)];
  return std::conj(coeffs_[static_cast<std::size_t>(-kappa)]);
}

void SpectralField::set_coeff(long kappa, Complex value) {
  const long n = static_cast<long>(grid_.n_modes);
  if (kappa > n || kappa <= -n) throw std::out_of_range("wavenumber outside grid");
  if (kappa < 0) {
    kappa = -kappa;
    value = std::conj(value);
  }
  if (kappa == 0 || kappa == n) value.imag(0.0);
  coeffs_[static_cast<std::size_t>(kappa)] = value;
}

std::vector<double> SpectralField::samples() const {
  std::vector<double> out(grid_.n_points);
  detail::inverse_real(coeffs_, out);
  return out;
}

std::vector<double> SpectralField::samples_padded(std::size_t m) const {
  if (m == grid_.n_points) return samples();
  if (m < grid_.n_points || m % 2 != 0)
    throw std::invalid_argument("padded size must be even and not below the grid size");
  std::vector<Complex> padded(m / 2 + 1);
  std::copy(coeffs_.begin(), coeffs_.end(), padded.begin());
  // The Nyquist entry stands for a cosine; on the finer grid it splits evenly
  // between +n_modes and -n_modes.
  padded[grid_.n_modes] *= 0.5;
  std::vector<double> out(m);
  detail::inverse_real(padded, out);
  return out;
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void require_same_grid(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("fields live on different grids");
}

SpectralField from_samples(const GridSpec& grid, std::span<const double> samples) {
  if (samples.size() != grid.n_points)
    throw std::invalid_argument("expected " + std::to_string(grid.n_points) + " samples, got " +
                                std::to_string(samples.size()));
  std::vector<Complex> c(grid.n_modes + 1);
  detail::forward_real(samples, c);
  const double scale = 1.0 / static_cast<double>(grid.n_points);
  for (auto& z : c) z *= scale;
  return SpectralField(grid, std::move(c));
}

SpectralField from_function(const GridSpec& grid, const std::function<double(double)>& fn) {
  std::vector<double> s(grid.n_points);
  for (std::size_t j = 0; j < s.size(); ++j)
    s[j] = fn(static_cast<double>(j) / static_cast<double>(grid.n_points));
  return from_samples(grid, s);
}

SpectralField constant_field(const GridSpec& grid, double value) {
  SpectralField f(grid);
  f.set_coeff(0, value);
  return f;
}

SpectralField derivative(const SpectralField& f, unsigned order) {
  if (order == 0) return f;
  SpectralField out = f;
  auto c = out.coeffs();
  // (i)^order cycles through 1, i, -1, -i.
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kIPow[order % 4];
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] *= phase * std::pow(kTwoPi * static_cast<double>(k), static_cast<double>(order));
  if (order % 2 == 1) c.back() = 0.0;
  return out;
}

double integral(const SpectralField& f) { return f.coeffs().front().real(); }

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g);
  auto a = f.samples();
  const auto b = g.samples();
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
  SpectralField out = from_samples(f.grid(), a);
  auto c = out.coeffs();
  std::fill(c.begin() + static_cast<std::ptrdiff_t>(f.grid().dealias_cutoff) + 1, c.end(),
            Complex{});
  return out;
}

double inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g);
  auto a = f.coeffs();
  auto b = g.coeffs();
  const std::size_t nyq = a.size() - 1;
  double s = (a[0] * std::conj(b[0])).real() + (a[nyq] * std::conj(b[nyq])).real();
  for (std::size_t k = 1; k < nyq; ++k) s += 2.0 * (a[k] * std::conj(b[k])).real();
  return s;
}

double parseval_sum(const SpectralField& f) {
  auto a = f.coeffs();
  const std::size_t nyq = a.size() - 1;
  double s = std::norm(a[0]) + std::norm(a[nyq]);
  for (std::size_t k = 1; k < nyq; ++k) s += 2.0 * std::norm(a[k]);
  return s;
}

double integrate_product(std::span<const SpectralField* const> factors) {
  if (factors.empty()) return 1.0;
  const GridSpec& grid = factors.front()->grid();
  std::size_t band = 0;
  for (const auto* f : factors) {
    require_same_grid(*factors.front(), *f);
    band += bandwidth(*f);
  }
  // The product's spectrum stays below `band`; the mean on m > band points
  // is then free of aliasing.
  const std::size_t m = detail::fast_size(std::max(grid.n_points, band + 1));
  std::vector<double> acc = factors.front()->samples_padded(m);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    const auto s = factors[i]->samples_padded(m);
    for (std::size_t j = 0; j < m; ++j) acc[j] *= s[j];
  }
  double sum = 0.0;
  for (double x : acc) sum += x;
  return sum / static_cast<double>(m);
}

double integrate_product(std::initializer_list<const SpectralField*> factors) {
  return integrate_product(std::span<const SpectralField* const>(factors.begin(), factors.size()));
}

SpectralField shift(const SpectralField& f, double s) {
  SpectralField out = f;
  auto c = out.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] *= std::polar(1.0, kTwoPi * static_cast<double>(k) * s);
  // Keep the field real: a shifted Nyquist cosine is not representable.
  c.back() = Complex(c.back().real(), 0.0);
  return out;
}

}  // namespace gg
