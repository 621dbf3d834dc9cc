#pragma once

// Fourier representation of real 1-periodic fields on [0,1).
//
// Coefficients are stored one-sided (wavenumbers 0..n_modes); the negative
// half is implied by Hermitian symmetry. The forward transform is normalized
// so that coeff(0) is the mean value of the field.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace gg {

using Complex = std::complex<double>;

struct GridSpec {
  std::size_t n_points = 0;
  std::size_t n_modes = 0;
  std::size_t dealias_cutoff = 0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws std::invalid_argument unless n_points is even and at least 8.
GridSpec make_grid(std::size_t n_points);

class SpectralField {
 public:
  SpectralField() = default;
  /// Zero field on `grid`.
  explicit SpectralField(const GridSpec& grid);
  /// Takes one-sided coefficients (size n_modes + 1); imaginary parts of the
  /// mean and Nyquist entries are discarded so the field stays real.
  SpectralField(const GridSpec& grid, std::vector<Complex> coeffs);

  const GridSpec& grid() const { return grid_; }

  /// Coefficient for any wavenumber in [-n_modes + 1, n_modes].
  Complex coeff(long kappa) const;
  void set_coeff(long kappa, Complex value);

  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  /// Collocation values at x_j = j / n_points.
  std::vector<double> samples() const;
  /// Values on a finer uniform grid of `m` points (m >= n_points) by zero
  /// padding; exact trigonometric interpolation.
  std::vector<double> samples_padded(std::size_t m) const;

  bool is_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

SpectralField from_samples(const GridSpec& grid, std::span<const double> samples);

/// Samples `fn` at the collocation points and transforms.
SpectralField from_function(const GridSpec& grid, const std::function<double(double)>& fn);

/// Constant field.
SpectralField constant_field(const GridSpec& grid, double value);

/// Multiplies coeff(kappa) by (2 pi i kappa)^order. For odd orders the
/// Nyquist coefficient is dropped, as its derivative is not a real field.
SpectralField derivative(const SpectralField& f, unsigned order);

/// Mean value over the period, i.e. Re coeff(0).
double integral(const SpectralField& f);

/// Dealiased product: multiply at collocation points, transform back, zero
/// every wavenumber above the 2/3 cutoff.
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g);

/// Integral of f*g from the coefficients (Parseval sum).
double inner(const SpectralField& f, const SpectralField& g);

/// Sum of |coeff(kappa)|^2 over all wavenumbers, negative ones included.
double parseval_sum(const SpectralField& f);

/// Integral of the product of all factors, evaluated on a zero-padded grid
/// large enough that the product is integrated without aliasing.
double integrate_product(std::span<const SpectralField* const> factors);
double integrate_product(std::initializer_list<const SpectralField*> factors);

/// Translates the field by s: result(x) = f(x + s).
SpectralField shift(const SpectralField& f, double s);

void require_same_grid(const SpectralField& f, const SpectralField& g);

}  // namespace gg
