#pragma once

#include <cmath>
#include <random>

#include "gg/model.hpp"

namespace gg::test {

inline ValidatedCoefficients coeffs(double a1, double a2, double a3, double k) {
  return validate_coefficients({0.0, a1, a2, a3, 1.0, 1.0, k}).get();
}

/// Zero-mean field with coefficients scale * exp(-kappa) * complex normal.
inline SpectralField smooth_field(const GridSpec& grid, std::size_t band, double scale,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SpectralField f(grid);
  for (std::size_t k = 1; k <= band; ++k)
    f.set_coeff(static_cast<long>(k),
                scale * std::exp(-static_cast<double>(k)) * Complex(normal(rng), normal(rng)));
  return f;
}

inline double sup_norm(const SpectralField& f) {
  double m = 0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

inline double l2_sq(const SimState& s) { return parseval_sum(s.u) + parseval_sum(s.v); }

inline double l2_distance(const SimState& a, const SimState& b) {
  return std::sqrt(parseval_sum(a.u - b.u) + parseval_sum(a.v - b.v));
}

}  // namespace gg::test
