#include "gg/integrator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gg {

namespace {

constexpr int kContourNodes = 32;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

using Modes = std::vector<Complex>;

struct EigenState {
  Modes plus;
  Modes minus;
};

EigenState to_eigen(const SpectralField& u, const SpectralField& v) {
  auto cu = u.coeffs();
  auto cv = v.coeffs();
  EigenState w{Modes(cu.size()), Modes(cu.size())};
  for (std::size_t k = 0; k < cu.size(); ++k) {
    w.plus[k] = (cu[k] + cv[k]) * kInvSqrt2;
    w.minus[k] = (cu[k] - cv[k]) * kInvSqrt2;
  }
  return w;
}

FieldPair from_eigen(const GridSpec& grid, const EigenState& w) {
  Modes cu(w.plus.size()), cv(w.plus.size());
  for (std::size_t k = 0; k < cu.size(); ++k) {
    cu[k] = (w.plus[k] + w.minus[k]) * kInvSqrt2;
    cv[k] = (w.plus[k] - w.minus[k]) * kInvSqrt2;
  }
  return {SpectralField(grid, std::move(cu)), SpectralField(grid, std::move(cv))};
}

void zero_mean(SimState& s, double* drift) {
  if (drift != nullptr)
    *drift = std::max({*drift, std::abs(s.u.coeff(0)), std::abs(s.v.coeff(0))});
  s.u.set_coeff(0, 0.0);
  s.v.set_coeff(0, 0.0);
}

}  // namespace

std::array<Complex, 3> phi_functions(Complex z) {
  std::array<Complex, 3> sum{};
  for (int j = 0; j < kContourNodes; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) * 2.0 / kContourNodes;
    const Complex r = z + std::polar(1.0, theta);
    const Complex e = std::exp(r);
    sum[0] += (e - 1.0) / r;
    sum[1] += (e - 1.0 - r) / (r * r);
    sum[2] += (e - 1.0 - r - 0.5 * r * r) / (r * r * r);
  }
  for (auto& s : sum) s /= static_cast<double>(kContourNodes);
  return sum;
}

EtdWeights etd_weights(Complex lambda, double dt) {
  const Complex z = lambda * dt;
  const auto phi = phi_functions(z);
  const auto phi_half = phi_functions(0.5 * z);
  EtdWeights w;
  w.e = std::exp(z);
  w.e_half = std::exp(0.5 * z);
  w.q = 0.5 * dt * phi_half[0];
  w.f1 = dt * (phi[0] - 3.0 * phi[1] + 4.0 * phi[2]);
  w.f2 = dt * (phi[1] - 2.0 * phi[2]);
  w.f3 = dt * (4.0 * phi[2] - phi[1]);
  return w;
}

std::pair<Complex, Complex> grid_eigenvalues(const GridSpec& grid, const ValidatedCoefficients& c,
                                             std::size_t kappa) {
  if (kappa == grid.n_modes) return {Complex(-c.k()), Complex(-c.k())};
  const auto sym = linear_symbol(c, static_cast<long>(kappa));
  return {sym.lambda_plus, sym.lambda_minus};
}

EtdTables::EtdTables(const GridSpec& grid, const ValidatedCoefficients& c, double dt)
    : grid_(grid), coeffs_(c.values()), dt_(dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  plus_.resize(grid.n_modes + 1);
  minus_.resize(grid.n_modes + 1);
  // Zero eigenvalue: exact limits exp(0) = 1, phi_j(0) = 1/j!.
  const EtdWeights identity{1.0, 1.0, 0.5 * dt, dt / 6.0, dt / 6.0, dt / 6.0};
  plus_[0] = minus_[0] = identity;
  for (std::size_t k = 1; k <= grid.n_modes; ++k) {
    const auto [lp, lm] = grid_eigenvalues(grid, c, k);
    plus_[k] = etd_weights(lp, dt);
    minus_[k] = etd_weights(lm, dt);
  }
}

EtdTables build_tables(const GridSpec& grid, const ValidatedCoefficients& c, double dt) {
  return EtdTables(grid, c, dt);
}

SimState step(const SimState& s, const EtdTables& tables, const ValidatedCoefficients& c,
              Nonlinearity nl, double* mean_drift) {
  if (!(tables.grid() == s.grid()) || !(tables.coefficients() == c.values()))
    throw std::invalid_argument("time-step tables do not match the state or coefficients");
  const GridSpec& grid = s.grid();
  const std::size_t n = grid.n_modes + 1;

  auto nonlinear = [&](const EigenState& w) {
    if (nl == Nonlinearity::disabled) return EigenState{Modes(n), Modes(n)};
    auto fields = from_eigen(grid, w);
    SimState stage{std::move(fields.u), std::move(fields.v), s.t, s.mean_u, s.mean_v};
    const auto d = nonlinear_terms(stage, c);
    return to_eigen(d.u, d.v);
  };

  const EigenState w0 = to_eigen(s.u, s.v);
  const EigenState n0 = nonlinear(w0);

  EigenState a{Modes(n), Modes(n)}, b{Modes(n), Modes(n)}, cst{Modes(n), Modes(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = tables.plus(k);
    const auto& m = tables.minus(k);
    a.plus[k] = p.e_half * w0.plus[k] + p.q * n0.plus[k];
    a.minus[k] = m.e_half * w0.minus[k] + m.q * n0.minus[k];
  }
  const EigenState na = nonlinear(a);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = tables.plus(k);
    const auto& m = tables.minus(k);
    b.plus[k] = p.e_half * w0.plus[k] + p.q * na.plus[k];
    b.minus[k] = m.e_half * w0.minus[k] + m.q * na.minus[k];
  }
  const EigenState nb = nonlinear(b);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = tables.plus(k);
    const auto& m = tables.minus(k);
    cst.plus[k] = p.e_half * a.plus[k] + p.q * (2.0 * nb.plus[k] - n0.plus[k]);
    cst.minus[k] = m.e_half * a.minus[k] + m.q * (2.0 * nb.minus[k] - n0.minus[k]);
  }
  const EigenState nc = nonlinear(cst);

  EigenState w1{Modes(n), Modes(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = tables.plus(k);
    const auto& m = tables.minus(k);
    w1.plus[k] = p.e * w0.plus[k] + p.f1 * n0.plus[k] + 2.0 * p.f2 * (na.plus[k] + nb.plus[k]) +
                 p.f3 * nc.plus[k];
    w1.minus[k] = m.e * w0.minus[k] + m.f1 * n0.minus[k] +
                  2.0 * m.f2 * (na.minus[k] + nb.minus[k]) + m.f3 * nc.minus[k];
  }

  auto fields = from_eigen(grid, w1);
  SimState out{std::move(fields.u), std::move(fields.v), s.t + tables.dt(), s.mean_u, s.mean_v};
  zero_mean(out, mean_drift);
  return out;
}

SimState linear_exact_solution(const SimState& initial, const ValidatedCoefficients& c, double t) {
  const GridSpec& grid = initial.grid();
  EigenState w = to_eigen(initial.u, initial.v);
  for (std::size_t k = 1; k < w.plus.size(); ++k) {
    const auto [lp, lm] = grid_eigenvalues(grid, c, k);
    w.plus[k] *= std::exp(lp * t);
    w.minus[k] *= std::exp(lm * t);
  }
  auto fields = from_eigen(grid, w);
  return {std::move(fields.u), std::move(fields.v), initial.t + t, initial.mean_u,
          initial.mean_v};
}

double default_time_step(const ValidatedCoefficients& c, unsigned resolved_modes) {
  const double w = 2.0 * std::numbers::pi * std::max(1u, resolved_modes);
  return 0.4 / (w * w * w * (1.0 + std::abs(c.a3())));
}

namespace {

long whole_steps(double span, double dt, const char* what) {
  const double ratio = span / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-8 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << what << " (" << span << ") is not a multiple of dt (" << dt << ")";
    throw std::invalid_argument(msg.str());
  }
  return static_cast<long>(rounded);
}

}  // namespace

EvolveResult evolve(SimState state, const ValidatedCoefficients& c, const EvolveOptions& opts,
                    std::span<const Observer> observers) {
  if (!(opts.t_final > state.t)) throw std::invalid_argument("t_final must exceed the start time");
  const double t0 = state.t;
  double dt = opts.dt;
  if (!(dt > 0)) {
    // Largest step below the default that divides the observation interval.
    const double interval = opts.observe_every > 0 ? opts.observe_every : opts.t_final - t0;
    dt = interval / std::ceil(interval / default_time_step(c, opts.resolved_modes));
  }
  const long n_steps = std::max(1L, whole_steps(opts.t_final - t0, dt, "integration span"));
  long stride = n_steps;
  if (opts.observe_every > 0)
    stride = opts.observe_every < dt ? 1L
                                     : std::max(1L, whole_steps(opts.observe_every, dt,
                                                                "observation interval"));

  const EtdTables tables(state.grid(), c, dt);
  EvolveResult result;
  result.series.n_max = opts.n_max;
  result.dt = dt;
  result.steps = n_steps;
  double drift = 0.0;
  zero_mean(state, &drift);

  auto observe = [&](const SimState& s) {
    result.series.records.push_back(evaluate_functionals(s, c, opts.n_max));
    for (const auto& obs : observers) obs(s);
  };
  observe(state);

  const double decay = std::exp(-2.0 * c.k() * dt);
  double l2_prev = parseval_sum(state.u) + parseval_sum(state.v);
  for (long i = 1; i <= n_steps; ++i) {
    state = step(state, tables, c, opts.nonlinearity, &drift);
    state.t = t0 + static_cast<double>(i) * dt;
    if (!state.u.is_finite() || !state.v.is_finite()) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "blow-up: non-finite Fourier mode at t = " << state.t << " (dt = " << dt << ")";
      throw BlowUpError(state.t, msg.str());
    }
    const double l2 = parseval_sum(state.u) + parseval_sum(state.v);
    const double expected = decay * l2_prev;
    if (std::abs(l2 - expected) > opts.l2_step_tolerance * expected) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "blow-up: step broke the L2 decay law at t = " << state.t << " (int u^2+v^2 = " << l2
          << ", expected " << expected << ", dt = " << dt << ")";
      throw BlowUpError(state.t, msg.str());
    }
    l2_prev = l2;
    if (i % stride == 0 || i == n_steps) observe(state);
  }
  result.series.max_mean_drift = drift;
  result.final_state = std::move(state);
  return result;
}

}  // namespace gg
