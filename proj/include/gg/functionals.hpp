#pragma once

// Scalar functionals of a reduced state: energy, H^n seminorms, and the
// Lyapunov functionals used for the H^1 and H^2 decay estimates.

#include <vector>

#include "gg/model.hpp"

namespace gg {

inline constexpr unsigned kDefaultMaxOrder = 4;

struct FunctionalRecord {
  double t = 0.0;
  double energy = 0.0;
  std::vector<double> seminorm_sq;  // index n = 0..n_max
  double f1 = 0.0;
  double g1 = 0.0;
  double f2 = 0.0;
  double g2 = 0.0;
  double h2 = 0.0;
};

/// (b2 * int u^2 + b1 * int v^2) / 2.
double energy(const SimState& s, const ValidatedCoefficients& c);

/// int (d^n u)^2 + (d^n v)^2, summed modewise.
double hs_seminorm_sq(const SimState& s, unsigned n);

struct H1Functionals {
  double f = 0.0;  // int u1^2 + v1^2 + 2 a3 u1 v1
  double g = 0.0;  // -(1/3) int (u^3 + v^3) + 3 (a1 u v^2 + a2 u^2 v)
};

struct H2Functionals {
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
};

H1Functionals lyapunov_h1(const SimState& s, const ValidatedCoefficients& c);
H2Functionals lyapunov_h2(const SimState& s, const ValidatedCoefficients& c);

FunctionalRecord evaluate_functionals(const SimState& s, const ValidatedCoefficients& c,
                                      unsigned n_max = kDefaultMaxOrder);

}  // namespace gg
