#include "gg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fft.hpp"

namespace gg {

namespace {

constexpr double kNormalizerFloor = 1e-30;

// Derivatives of (u, v) and of their time derivatives (du, dv) = rhs.
struct Jet {
  std::vector<SpectralField> u, v, du, dv;
};

Jet make_jet(const SimState& s, const ValidatedCoefficients& c, unsigned order,
             unsigned time_order) {
  Jet j;
  const auto d = rhs(s, c);
  for (unsigned m = 0; m <= order; ++m) {
    j.u.push_back(derivative(s.u, m));
    j.v.push_back(derivative(s.v, m));
  }
  for (unsigned m = 0; m <= time_order; ++m) {
    j.du.push_back(derivative(d.u, m));
    j.dv.push_back(derivative(d.v, m));
  }
  return j;
}

double I(const SpectralField& a, const SpectralField& b) { return integrate_product({&a, &b}); }
double I(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  return integrate_product({&a, &b, &c});
}
double I(const SpectralField& a, const SpectralField& b, const SpectralField& c,
         const SpectralField& d) {
  return integrate_product({&a, &b, &c, &d});
}

// Right side accumulated term by term.
struct Terms {
  double value = 0.0;
  double abs = 0.0;
  void add(double x) {
    value += x;
    abs += std::abs(x);
  }
};

IdentityReport exact_report(std::string id, double lhs, const Terms& rhs) {
  IdentityReport r;
  r.id = std::move(id);
  r.exact = true;
  r.lhs = lhs;
  r.rhs = rhs.value;
  r.residual = lhs - rhs.value;
  r.normalizer = std::abs(lhs) + rhs.abs;
  r.relative_residual = std::abs(r.residual) / std::max(r.normalizer, kNormalizerFloor);
  return r;
}

IdentityReport approx_report(std::string id, double lhs, double rhs, double scale) {
  IdentityReport r;
  r.id = std::move(id);
  r.exact = false;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = lhs - rhs;
  r.normalizer = scale;
  r.relative_residual = std::abs(r.residual) / std::max(scale, kNormalizerFloor);
  return r;
}

void require_zero_means(const SimState& s, const char* what) {
  if (s.mean_u != 0.0 || s.mean_v != 0.0)
    throw std::invalid_argument(std::string(what) + " requires M = N = 0");
}

double binomial(unsigned n, unsigned k) {
  double b = 1.0;
  for (unsigned i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// int w * (a b)_n by the Leibniz rule, with a = x[ia + j], b = y[ib + n - j].
double leibniz(const SpectralField& w, const std::vector<SpectralField>& x, unsigned ia,
               const std::vector<SpectralField>& y, unsigned ib, unsigned n) {
  double sum = 0.0;
  for (unsigned j = 0; j <= n; ++j) sum += binomial(n, j) * I(w, x[ia + j], y[ib + n - j]);
  return sum;
}

std::string gen_n_id(unsigned n) { return "GEN_N(" + std::to_string(n) + ")"; }
std::string gen_n_approx_id(unsigned n) { return "GEN_N_APPROX(" + std::to_string(n) + ")"; }

}  // namespace

IdentityReport residual_l2(const SimState& s, const ValidatedCoefficients& c) {
  const auto j = make_jet(s, c, 0, 0);
  const double lhs = 2.0 * (I(j.u[0], j.du[0]) + I(j.v[0], j.dv[0]));
  Terms rhs;
  rhs.add(-2.0 * c.k() * I(j.u[0], j.u[0]));
  rhs.add(-2.0 * c.k() * I(j.v[0], j.v[0]));
  return exact_report("L2", lhs, rhs);
}

IdentityReport residual_general_n(const SimState& s, const ValidatedCoefficients& c, unsigned n,
                                  unsigned n_max) {
  if (n > n_max) throw std::invalid_argument("identity order exceeds n_max");
  const auto j = make_jet(s, c, n + 1, n);
  const auto &u = j.u, &v = j.v;
  const double k = c.k(), a1 = c.a1(), a2 = c.a2();

  const double lhs = 2.0 * (I(u[n], j.du[n]) + I(v[n], j.dv[n]));
  Terms rhs;
  rhs.add(-2.0 * k * I(u[n], u[n]));
  rhs.add(-2.0 * k * I(v[n], v[n]));
  rhs.add(-2.0 * leibniz(u[n], u, 1, u, 0, n));
  rhs.add(-2.0 * leibniz(v[n], v, 1, v, 0, n));
  rhs.add(-2.0 * a1 * leibniz(u[n], v, 0, v, 1, n));
  rhs.add(-2.0 * a1 * leibniz(v[n], u, 0, v, 0, n + 1));
  rhs.add(-2.0 * a2 * leibniz(v[n], u, 0, u, 1, n));
  rhs.add(-2.0 * a2 * leibniz(u[n], u, 0, v, 0, n + 1));
  return exact_report(gen_n_id(n), lhs, rhs);
}

IdentityReport residual_general_n_approx(const SimState& s, const ValidatedCoefficients& c,
                                         unsigned n, unsigned n_max) {
  if (n > n_max) throw std::invalid_argument("identity order exceeds n_max");
  const auto j = make_jet(s, c, n, n);
  const double sn = I(j.u[n], j.u[n]) + I(j.v[n], j.v[n]);
  const double lhs = 2.0 * (I(j.u[n], j.du[n]) + I(j.v[n], j.dv[n]));
  return approx_report(gen_n_approx_id(n), lhs, -2.0 * c.k() * sn, sn);
}

std::vector<IdentityReport> residual_h1(const SimState& s, const ValidatedCoefficients& c) {
  require_zero_means(s, "the H1 identities");
  const auto j = make_jet(s, c, 2, 1);
  const auto &u = j.u[0], &u1 = j.u[1], &u2 = j.u[2];
  const auto &v = j.v[0], &v1 = j.v[1], &v2 = j.v[2];
  const auto &du = j.du[0], &du1 = j.du[1];
  const auto &dv = j.dv[0], &dv1 = j.dv[1];
  const double k = c.k(), a1 = c.a1(), a2 = c.a2(), a3 = c.a3();

  // Chain-rule derivatives.
  const double d_grad_sq = 2.0 * (I(u1, du1) + I(v1, dv1));
  const double d_grad_cross = I(du1, v1) + I(u1, dv1);
  const double d_cubic = 3.0 * (I(u, u, du) + I(v, v, dv));
  const double d_mixed = a1 * (I(du, v, v) + 2.0 * I(u, v, dv)) +
                         a2 * (2.0 * I(u, v, du) + I(u, u, dv));
  const double d_main = d_grad_sq + 2.0 * a3 * d_grad_cross - d_cubic / 3.0 - d_mixed;

  std::vector<IdentityReport> out;

  Terms main;
  main.add(-2.0 * k * I(u1, u1));
  main.add(-2.0 * k * I(v1, v1));
  main.add(-4.0 * k * a3 * I(u1, v1));
  main.add(k * I(u, u, u));
  main.add(k * I(v, v, v));
  main.add(3.0 * k * a1 * I(u, v, v));
  main.add(3.0 * k * a2 * I(u, u, v));
  out.push_back(exact_report("H1_MAIN", d_main, main));

  Terms grad_sq;
  grad_sq.add(-2.0 * k * I(u1, u1));
  grad_sq.add(-2.0 * k * I(v1, v1));
  grad_sq.add(-I(u1, u1, u1));
  grad_sq.add(-I(v1, v1, v1));
  grad_sq.add(-3.0 * a1 * I(u1, v1, v1));
  grad_sq.add(-3.0 * a2 * I(u1, u1, v1));
  out.push_back(exact_report("H1_SUB:grad_sq", d_grad_sq, grad_sq));

  Terms cross;
  cross.add(-2.0 * k * I(u1, v1));
  cross.add(I(u, u1, v2));
  cross.add(I(v, v1, u2));
  cross.add(-a1 * I(v2, u1, u));
  cross.add(-1.5 * a1 * I(v1, u1, u1));
  cross.add(-0.5 * a1 * I(v1, v1, v1));
  cross.add(-a2 * I(u2, v1, v));
  cross.add(-1.5 * a2 * I(u1, v1, v1));
  cross.add(-0.5 * a2 * I(u1, u1, u1));
  out.push_back(exact_report("H1_SUB:grad_cross", d_grad_cross, cross));

  Terms cubic;
  cubic.add(-3.0 * k * I(u, u, u));
  cubic.add(-3.0 * k * I(v, v, v));
  cubic.add(-3.0 * I(u1, u1, u1));
  cubic.add(-3.0 * I(v1, v1, v1));
  cubic.add(-3.0 * a1 * I(u, u, v, v1));
  cubic.add(-2.0 * a1 * I(v, v, v, u1));
  cubic.add(-3.0 * a2 * I(v, v, u, u1));
  cubic.add(-2.0 * a2 * I(u, u, u, v1));
  cubic.add(6.0 * a3 * I(u, u1, v2));
  cubic.add(6.0 * a3 * I(v, v1, u2));
  out.push_back(exact_report("H1_SUB:cubic", d_cubic, cubic));

  Terms mixed;
  mixed.add(-3.0 * k * a1 * I(u, v, v));
  mixed.add(-3.0 * k * a2 * I(u, u, v));
  mixed.add(2.0 / 3.0 * a1 * I(v, v, v, u1));
  mixed.add(a1 * I(u, u, v, v1));
  mixed.add(-3.0 * a1 * I(v1, v1, u1));
  mixed.add(2.0 / 3.0 * a2 * I(u, u, u, v1));
  mixed.add(a2 * I(v, v, u, u1));
  mixed.add(-3.0 * a2 * I(u1, u1, v1));
  mixed.add(-2.0 * a1 * a3 * I(v2, u1, u));
  mixed.add(-3.0 * a1 * a3 * I(v1, u1, u1));
  mixed.add(-a1 * a3 * I(v1, v1, v1));
  mixed.add(-2.0 * a2 * a3 * I(u2, v1, v));
  mixed.add(-3.0 * a2 * a3 * I(u1, v1, v1));
  mixed.add(-a2 * a3 * I(u1, u1, u1));
  out.push_back(exact_report("H1_SUB:mixed_cubic", d_mixed, mixed));

  return out;
}

std::vector<IdentityReport> residual_h2(const SimState& s, const ValidatedCoefficients& c) {
  require_zero_means(s, "the H2 identities");
  const auto j = make_jet(s, c, 3, 2);
  const auto &u = j.u[0], &u1 = j.u[1], &u2 = j.u[2], &u3 = j.u[3];
  const auto &v = j.v[0], &v1 = j.v[1], &v2 = j.v[2], &v3 = j.v[3];
  const auto &du = j.du[0], &du1 = j.du[1], &du2 = j.du[2];
  const auto &dv = j.dv[0], &dv1 = j.dv[1], &dv2 = j.dv[2];
  const double k = c.k(), a1 = c.a1(), a2 = c.a2(), a3 = c.a3();

  const double d_hess_sq = 2.0 * (I(u2, du2) + I(v2, dv2));
  const double d_hess_cross = I(du2, v2) + I(u2, dv2);
  const double d_weighted =
      2.0 * I(u1, du1, u) + I(u1, u1, du) + 2.0 * I(v1, dv1, v) + I(v1, v1, dv);
  const double d_mixed_v = 2.0 * (I(du1, v1, v) + I(u1, dv1, v) + I(u1, v1, dv)) +
                           2.0 * I(v1, dv1, u) + I(v1, v1, du);
  const double d_mixed_u = 2.0 * (I(dv1, u1, u) + I(v1, du1, u) + I(v1, u1, du)) +
                           2.0 * I(u1, du1, v) + I(u1, u1, dv);
  const double d_main = d_hess_sq + 2.0 * a3 * d_hess_cross -
                        5.0 / 3.0 * (d_weighted + a1 * d_mixed_v + a2 * d_mixed_u);

  const double s2 = I(u2, u2) + I(v2, v2);
  std::vector<IdentityReport> out;

  Terms hess_sq;
  hess_sq.add(-2.0 * k * I(u2, u2));
  hess_sq.add(-2.0 * k * I(v2, v2));
  hess_sq.add(-5.0 * I(u2, u2, u1));
  hess_sq.add(-5.0 * I(v2, v2, v1));
  hess_sq.add(-10.0 * a1 * I(u2, v2, v1));
  hess_sq.add(-5.0 * a1 * I(v2, v2, u1));
  hess_sq.add(-10.0 * a2 * I(u2, v2, u1));
  hess_sq.add(-5.0 * a2 * I(u2, u2, v1));
  out.push_back(exact_report("H2_SUB:hess_sq", d_hess_sq, hess_sq));

  Terms cross;
  cross.add(-2.0 * k * I(u2, v2));
  cross.add(-I(u3, v2, u));
  cross.add(-I(v3, u2, v));
  cross.add(-3.0 * I(u2, v2, u1));
  cross.add(-3.0 * I(u2, v2, v1));
  cross.add(-2.5 * a1 * I(u2, u2, v1));
  cross.add(-2.5 * a1 * I(v2, v2, v1));
  cross.add(-2.0 * a1 * I(u2, v2, u1));
  cross.add(a1 * I(u3, v2, u));
  cross.add(-2.5 * a2 * I(u2, u2, u1));
  cross.add(-2.5 * a2 * I(v2, v2, u1));
  cross.add(-2.0 * a2 * I(u2, v2, v1));
  cross.add(a2 * I(v3, u2, v));
  out.push_back(exact_report("H2_SUB:hess_cross", d_hess_cross, cross));

  const double weighted_rhs =
      -3.0 * (I(u2, u2, u1) + I(v2, v2, v1)) -
      2.0 * a3 * (I(u3, v2, u) + I(v3, u2, v) + 2.0 * I(u2, v2, u1) + 2.0 * I(u2, v2, v1));
  out.push_back(approx_report("H2_SUB:grad_sq_weighted", d_weighted, weighted_rhs, s2));

  const double mixed_v_rhs =
      -3.0 * (2.0 * I(u2, v2, v1) + I(v2, v2, u1)) +
      a3 * (-3.0 * (I(u2, u2, v1) + I(v2, v2, v1)) + 2.0 * I(u3, v2, u) - 2.0 * I(u2, v2, u1));
  out.push_back(approx_report("H2_SUB:mixed_v", d_mixed_v, mixed_v_rhs, s2));

  const double mixed_u_rhs =
      -3.0 * (2.0 * I(u2, v2, u1) + I(u2, u2, v1)) +
      a3 * (-3.0 * (I(u2, u2, u1) + I(v2, v2, u1)) + 2.0 * I(v3, u2, v) - 2.0 * I(u2, v2, v1));
  out.push_back(approx_report("H2_SUB:mixed_u", d_mixed_u, mixed_u_rhs, s2));

  const auto h2 = lyapunov_h2(s, c);
  out.push_back(approx_report("H2_MAIN", d_main, -2.0 * k * h2.f + h2.h, s2));
  return out;
}

std::vector<std::string> identity_ids(unsigned n_max) {
  std::vector<std::string> ids{"L2"};
  for (unsigned n = 0; n <= n_max; ++n) ids.push_back(gen_n_id(n));
  for (const char* id : {"H1_MAIN", "H1_SUB:grad_sq", "H1_SUB:grad_cross", "H1_SUB:cubic",
                         "H1_SUB:mixed_cubic", "H2_SUB:hess_sq", "H2_SUB:hess_cross",
                         "H2_SUB:grad_sq_weighted", "H2_SUB:mixed_v", "H2_SUB:mixed_u",
                         "H2_MAIN"})
    ids.emplace_back(id);
  for (unsigned n = 3; n <= n_max; ++n) ids.push_back(gen_n_approx_id(n));
  return ids;
}

std::vector<IdentityReport> identity_battery(const SimState& s, const ValidatedCoefficients& c,
                                             unsigned n_max, std::span<const std::string> only) {
  const auto known = identity_ids(n_max);
  for (const auto& id : only)
    if (std::find(known.begin(), known.end(), id) == known.end())
      throw std::invalid_argument("unknown identity id: " + id);
  auto wanted = [&](const std::string& id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  auto wanted_prefix = [&](const std::string& prefix) {
    if (only.empty()) return true;
    return std::any_of(only.begin(), only.end(),
                       [&](const std::string& id) { return id.rfind(prefix, 0) == 0; });
  };

  std::vector<IdentityReport> out;
  if (wanted("L2")) out.push_back(residual_l2(s, c));
  for (unsigned n = 0; n <= n_max; ++n)
    if (wanted(gen_n_id(n))) out.push_back(residual_general_n(s, c, n, n_max));
  // The H1/H2 statements hold for the zero-mean system only; without an
  // explicit request they are skipped for states with nonzero means.
  const bool zero_means = s.mean_u == 0.0 && s.mean_v == 0.0;
  if (wanted_prefix("H1") && (zero_means || !only.empty()))
    for (auto& r : residual_h1(s, c))
      if (wanted(r.id)) out.push_back(std::move(r));
  if (wanted_prefix("H2") && (zero_means || !only.empty()))
    for (auto& r : residual_h2(s, c))
      if (wanted(r.id)) out.push_back(std::move(r));
  for (unsigned n = 3; n <= n_max; ++n)
    if (wanted(gen_n_approx_id(n))) out.push_back(residual_general_n_approx(s, c, n, n_max));
  return out;
}

ScalingReport amplitude_scaling(const std::string& id, const SimState& s,
                                const ValidatedCoefficients& c, std::span<const double> amplitudes,
                                unsigned n_max) {
  ScalingReport out;
  out.id = id;
  const std::vector<std::string> only{id};
  for (double a : amplitudes) {
    SimState scaled{a * s.u, a * s.v, s.t, s.mean_u, s.mean_v};
    const auto reports = identity_battery(scaled, c, n_max, only);
    out.amplitudes.push_back(a);
    out.relative_residuals.push_back(reports.at(0).relative_residual);
  }
  for (std::size_t i = 1; i < out.relative_residuals.size(); ++i)
    out.ratios.push_back(out.relative_residuals[i] /
                         std::max(out.relative_residuals[i - 1], kNormalizerFloor));
  return out;
}

SimState normalize_seminorm(const SimState& s, unsigned n) {
  const double norm = std::sqrt(hs_seminorm_sq(s, n));
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a state with zero seminorm");
  return {(1.0 / norm) * s.u, (1.0 / norm) * s.v, s.t, s.mean_u, s.mean_v};
}

double lp_norm(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("Lp norm needs p >= 1");
  const auto x = f.samples_padded(4 * f.grid().n_points);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double y : x) m = std::max(m, std::abs(y));
    return m;
  }
  double sum = 0.0;
  for (double y : x) sum += std::pow(std::abs(y), p);
  return std::pow(sum / static_cast<double>(x.size()), 1.0 / p);
}

bool check_poincare_holder(const SpectralField& f, double p, double q) {
  constexpr double kSlack = 1e-10;
  auto le = [](double a, double b) { return a <= b + kSlack * std::max(1.0, std::abs(b)); };
  if (p <= q && !le(lp_norm(f, p), lp_norm(f, q))) return false;
  const auto fluct = f - constant_field(f.grid(), integral(f));
  return le(lp_norm(fluct, p), lp_norm(derivative(f, 1), q));
}

DerivativeTable derivative_table(const SpectralField& u, const SpectralField& v, unsigned n,
                                 unsigned max_factors) {
  require_same_grid(u, v);
  if (n < 1) throw HypothesisError("product bound needs n >= 1");
  double scale = 0.0;
  std::size_t band = 0;
  for (const auto* f : {&u, &v}) {
    const auto c = f->coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
      scale = std::max(scale, std::abs(c[k]));
      if (c[k] != Complex{}) band = std::max(band, k);
    }
  }
  if (std::abs(u.coeff(0)) > 1e-12 * scale || std::abs(v.coeff(0)) > 1e-12 * scale)
    throw HypothesisError("product bound needs zero-mean fields");

  const std::size_t m =
      std::max(u.grid().n_points, detail::fast_size(max_factors * band + 1));
  DerivativeTable t;
  t.n = n;
  for (unsigned k = 0; k <= n; ++k) {
    t.u.push_back(derivative(u, k).samples_padded(m));
    t.v.push_back(derivative(v, k).samples_padded(m));
  }
  const auto un = derivative(u, n), vn = derivative(v, n);
  const auto ub = derivative(u, n - 1), vb = derivative(v, n - 1);
  t.seminorm_n = parseval_sum(un) + parseval_sum(vn);
  t.seminorm_below = parseval_sum(ub) + parseval_sum(vb);
  return t;
}

ProductBound evaluate_product_bound(const DerivativeTable& t, std::span<const unsigned> alphas,
                                    std::span<const unsigned> betas) {
  const unsigned n = t.n;
  if (alphas.size() != n + 1 || betas.size() != n + 1)
    throw HypothesisError("exponent arrays must have n + 1 entries");
  unsigned d = 0;
  for (unsigned m = 0; m <= n; ++m) d += alphas[m] + betas[m];
  if (2 * (alphas[n] + betas[n]) + alphas[n - 1] + betas[n - 1] > 4)
    throw HypothesisError("2(alpha_n + beta_n) + alpha_{n-1} + beta_{n-1} exceeds 4");
  if (d < 2) throw HypothesisError("total degree d must be at least 2");

  const std::size_t size = t.u[0].size();
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double prod = 1.0;
    for (unsigned m = 0; m <= n; ++m) {
      for (unsigned a = 0; a < alphas[m]; ++a) prod *= t.u[m][i];
      for (unsigned b = 0; b < betas[m]; ++b) prod *= t.v[m][i];
    }
    sum += prod;
  }
  ProductBound r;
  r.integral = sum / static_cast<double>(size);
  r.bound = t.seminorm_n * std::pow(t.seminorm_below, 0.5 * (static_cast<double>(d) - 2.0));
  r.holds = std::abs(r.integral) <= r.bound * (1.0 + 1e-10);
  return r;
}

bool check_product_bound(const SpectralField& u, const SpectralField& v,
                         std::span<const unsigned> alphas, std::span<const unsigned> betas,
                         unsigned n) {
  unsigned d = 0;
  for (auto a : alphas) d += a;
  for (auto b : betas) d += b;
  return evaluate_product_bound(derivative_table(u, v, n, std::max(d, 2u)), alphas, betas).holds;
}

std::vector<std::pair<std::vector<unsigned>, std::vector<unsigned>>> admissible_exponents(
    unsigned n, unsigned max_degree) {
  std::vector<std::pair<std::vector<unsigned>, std::vector<unsigned>>> out;
  if (n < 1) return out;
  const unsigned slots = 2 * (n + 1);
  std::vector<unsigned> e(slots, 0);
  // Slot 2m holds alpha_m, slot 2m + 1 holds beta_m.
  auto rec = [&](auto&& self, unsigned slot, unsigned left) -> void {
    if (slot == slots) {
      const unsigned d = max_degree - left;
      const unsigned top = e[2 * n] + e[2 * n + 1];
      const unsigned below = e[2 * n - 2] + e[2 * n - 1];
      if (d >= 2 && 2 * top + below <= 4) {
        std::vector<unsigned> a(n + 1), b(n + 1);
        for (unsigned m = 0; m <= n; ++m) {
          a[m] = e[2 * m];
          b[m] = e[2 * m + 1];
        }
        out.emplace_back(std::move(a), std::move(b));
      }
      return;
    }
    for (unsigned x = 0; x <= left; ++x) {
      e[slot] = x;
      self(self, slot + 1, left - x);
    }
    e[slot] = 0;
  };
  rec(rec, 0, max_degree);
  return out;
}

double quantity_value(const FunctionalRecord& r, const std::string& id) {
  if (id == "energy") return r.energy;
  if (id == "f1") return r.f1;
  if (id == "f2") return r.f2;
  const std::string prefix = "seminorm_sq_";
  if (id.rfind(prefix, 0) == 0) {
    std::size_t pos = 0;
    const std::string digits = id.substr(prefix.size());
    unsigned long n = 0;
    try {
      n = std::stoul(digits, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == digits.size() && !digits.empty() && n < r.seminorm_sq.size())
      return r.seminorm_sq[n];
  }
  throw std::invalid_argument("unknown quantity: " + id);
}

DecayFit fit_decay_rate(const DiagnosticSeries& series, const std::string& quantity_id,
                        double t_start, double t_end, double k) {
  if (series.records.empty()) throw std::invalid_argument("empty series");
  const double floor = 1e-13 * quantity_value(series.records.front(), quantity_id);
  const double tol = 1e-9 * std::max(1.0, std::abs(t_end));
  std::vector<double> t, y;
  for (const auto& r : series.records) {
    if (r.t < t_start - tol || r.t > t_end + tol) continue;
    const double q = quantity_value(r, quantity_id);
    if (!(q > 0.0) || q <= floor) continue;
    t.push_back(r.t);
    y.push_back(std::log(q));
  }
  if (t.size() < 2)
    throw std::invalid_argument("fewer than two usable points for " + quantity_id);

  const double n = static_cast<double>(t.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (stt == 0.0) throw std::invalid_argument("degenerate fit window");
  DecayFit fit;
  fit.quantity_id = quantity_id;
  fit.t_start = t_start;
  fit.t_end = t_end;
  fit.fitted_rate = sty / stt;
  fit.target_rate = -2.0 * k;
  fit.r_squared = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  fit.points = t.size();
  return fit;
}

SimState random_smooth_state(const GridSpec& grid, std::uint64_t seed, double amplitude,
                             std::size_t band) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  band = std::min(band, grid.n_modes - 1);
  auto field = [&] {
    SpectralField f(grid);
    for (std::size_t k = 1; k <= band; ++k) {
      const double re = normal(rng), im = normal(rng);
      f.set_coeff(static_cast<long>(k),
                  amplitude * std::exp(-static_cast<double>(k)) * Complex(re, im));
    }
    return f;
  };
  SpectralField u = field();
  SpectralField v = field();
  return {std::move(u), std::move(v)};
}

}  // namespace gg
