#include "gg/functionals.hpp"

#include <cmath>
#include <numbers>

namespace gg {

double energy(const SimState& s, const ValidatedCoefficients& c) {
  const auto& cs = c.values();
  return 0.5 * (cs.b2 * parseval_sum(s.u) + cs.b1 * parseval_sum(s.v));
}

double hs_seminorm_sq(const SimState& s, unsigned n) {
  auto cu = s.u.coeffs();
  auto cv = s.v.coeffs();
  const std::size_t nyq = cu.size() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) {
    if (k == nyq && n % 2 == 1) continue;  // odd derivatives drop the Nyquist cosine
    if (k == 0 && n > 0) continue;
    const double w = std::pow(2.0 * std::numbers::pi * static_cast<double>(k), 2.0 * n);
    const double mult = (k == 0 || k == nyq) ? 1.0 : 2.0;
    sum += mult * w * (std::norm(cu[k]) + std::norm(cv[k]));
  }
  return sum;
}

H1Functionals lyapunov_h1(const SimState& s, const ValidatedCoefficients& c) {
  const auto& u = s.u;
  const auto& v = s.v;
  const auto u1 = derivative(u, 1);
  const auto v1 = derivative(v, 1);
  H1Functionals out;
  out.f = inner(u1, u1) + inner(v1, v1) + 2.0 * c.a3() * inner(u1, v1);
  const double cubes = integrate_product({&u, &u, &u}) + integrate_product({&v, &v, &v});
  const double mixed =
      c.a1() * integrate_product({&u, &v, &v}) + c.a2() * integrate_product({&u, &u, &v});
  out.g = -(cubes + 3.0 * mixed) / 3.0;
  return out;
}

H2Functionals lyapunov_h2(const SimState& s, const ValidatedCoefficients& c) {
  const auto& u = s.u;
  const auto& v = s.v;
  const auto u1 = derivative(u, 1), v1 = derivative(v, 1);
  const auto u2 = derivative(u, 2), v2 = derivative(v, 2);
  const auto u3 = derivative(u, 3), v3 = derivative(v, 3);
  const double a1 = c.a1(), a2 = c.a2(), a3 = c.a3();

  H2Functionals out;
  out.f = inner(u2, u2) + inner(v2, v2) + 2.0 * a3 * inner(u2, v2);

  const double base = integrate_product({&u1, &u1, &u}) + integrate_product({&v1, &v1, &v});
  const double with_a1 =
      2.0 * integrate_product({&u1, &v1, &v}) + integrate_product({&v1, &v1, &u});
  const double with_a2 =
      2.0 * integrate_product({&u1, &v1, &u}) + integrate_product({&u1, &u1, &v});
  out.g = -5.0 / 3.0 * (base + a1 * with_a1 + a2 * with_a2);

  if (a3 != 0.0) {
    const double pu =
        2.0 * integrate_product({&u3, &v2, &u}) + integrate_product({&u2, &v2, &u1});
    const double pv =
        2.0 * integrate_product({&v3, &u2, &v}) + integrate_product({&u2, &v2, &v1});
    out.h = 2.0 / 3.0 * a3 * ((1.0 - a1) * pu + (1.0 - a2) * pv);
  }
  return out;
}

FunctionalRecord evaluate_functionals(const SimState& s, const ValidatedCoefficients& c,
                                      unsigned n_max) {
  FunctionalRecord r;
  r.t = s.t;
  r.energy = energy(s, c);
  r.seminorm_sq.resize(n_max + 1);
  for (unsigned n = 0; n <= n_max; ++n) r.seminorm_sq[n] = hs_seminorm_sq(s, n);
  const auto h1 = lyapunov_h1(s, c);
  r.f1 = h1.f;
  r.g1 = h1.g;
  const auto h2 = lyapunov_h2(s, c);
  r.f2 = h2.f;
  r.g2 = h2.g;
  r.h2 = h2.h;
  return r;
}

}  // namespace gg
