#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <json.hpp>

#include "gg/cli.hpp"

namespace gg {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kExactTolerance = 1e-8;
constexpr double kScalingLow = 0.35;
constexpr double kScalingHigh = 0.65;

std::string num(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json nullable(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json fit_json(const DecayFit& f) {
  return {{"quantity", f.quantity_id}, {"t_start", f.t_start},
          {"t_end", f.t_end},          {"fitted_rate", nullable(f.fitted_rate)},
          {"target_rate", f.target_rate}, {"r_squared", nullable(f.r_squared)},
          {"points", f.points}};
}

// A fit that could not be formed (e.g. a series that is identically zero).
DecayFit empty_fit(const FitSpec& spec, double k) {
  DecayFit f;
  f.quantity_id = spec.quantity;
  f.t_start = spec.t_start;
  f.t_end = spec.t_end;
  f.fitted_rate = NAN;
  f.r_squared = NAN;
  f.target_rate = -2.0 * k;
  return f;
}

DecayFit try_fit(const DiagnosticSeries& series, const FitSpec& spec, double k) {
  try {
    return fit_decay_rate(series, spec.quantity, spec.t_start, spec.t_end, k);
  } catch (const std::invalid_argument&) {
    return empty_fit(spec, k);
  }
}

std::optional<ValidatedCoefficients> checked_coefficients(const CoefficientSet& set,
                                                          bool allow_undamped, std::ostream& log,
                                                          Json* violations = nullptr) {
  auto vr = validate_coefficients(set, {allow_undamped});
  if (vr.ok()) return *vr.value;
  log << "invalid coefficients:\n";
  for (const auto& v : vr.violations) {
    log << "  " << to_string(v.constraint) << ": " << v.message << "\n";
    if (violations != nullptr)
      violations->push_back({{"constraint", to_string(v.constraint)}, {"message", v.message}});
  }
  return std::nullopt;
}

fs::path prepare_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& out_dir) {
  const fs::path dir = out_dir.value_or(fs::path(cfg.output_dir));
  fs::create_directories(dir);
  return dir;
}

bool selected(const ExperimentConfig& cfg, const std::string& id) {
  return cfg.checks.empty() || std::find(cfg.checks.begin(), cfg.checks.end(), id) != cfg.checks.end();
}

std::vector<std::string> selected_identities(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& id : identity_ids(cfg.n_max))
    if (selected(cfg, id)) out.push_back(id);
  return out;
}

bool is_zero_mean_identity(const std::string& id) { return id.rfind("H", 0) == 0; }

EvolveOptions evolve_options(const ExperimentConfig& cfg) {
  EvolveOptions o;
  o.t_final = cfg.t_final;
  o.dt = cfg.dt;
  o.resolved_modes = cfg.resolved_modes;
  o.observe_every = cfg.observe_every;
  o.n_max = cfg.n_max;
  return o;
}

SimState reference_state(const GridSpec& g) {
  using std::numbers::pi;
  const auto u = from_function(g, [](double x) {
    return std::cos(2 * pi * x) + 0.5 * std::sin(4 * pi * x + 0.4);
  });
  const auto v = from_function(g, [](double x) {
    return 0.5 * std::cos(2 * pi * x + 1.0) - 0.3 * std::sin(6 * pi * x);
  });
  return normalize_seminorm({u, v}, 1);
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& contents) {
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string diagnostics_csv(const DiagnosticSeries& series) {
  std::ostringstream out;
  out << "t,energy";
  for (unsigned n = 0; n <= series.n_max; ++n) out << ",seminorm_sq_" << n;
  out << ",f1,g1,f2,g2,h2\n";
  for (const auto& r : series.records) {
    out << num(r.t) << ',' << num(r.energy);
    for (double s : r.seminorm_sq) out << ',' << num(s);
    out << ',' << num(r.f1) << ',' << num(r.g1) << ',' << num(r.f2) << ',' << num(r.g2) << ','
        << num(r.h2) << '\n';
  }
  return out.str();
}

std::string energy_svg(const DiagnosticSeries& series) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 30, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : series.records)
    if (r.energy > 0 && std::isfinite(r.energy)) pts.emplace_back(r.t, std::log10(r.energy));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">log10 energy vs t</text>\n";
  if (pts.size() < 2) {
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no positive energy to plot</text>\n"
        << "</svg>\n";
    return svg.str();
  }
  double t0 = pts.front().first, t1 = pts.back().first;
  double y0 = pts.front().second, y1 = y0;
  for (const auto& [t, y] : pts) {
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  if (t1 <= t0) t1 = t0 + 1;
  auto px = [&](double t) { return L + (t - t0) / (t1 - t0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n"
      << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = t0 + (t1 - t0) * i / 4, y = y0 + (y1 - y0) * i / 4;
    char lt[32], ly[32];
    std::snprintf(lt, sizeof lt, "%.3g", t);
    std::snprintf(ly, sizeof ly, "%.3g", y);
    svg << "<text x=\"" << px(t) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << lt
        << "</text>\n"
        << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << ly
        << "</text>\n";
  }
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\">t</text>\n</g>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (const auto& [t, y] : pts) svg << px(t) << ',' << py(y) << ' ';
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log, const std::optional<fs::path>& out_dir) {
  const auto c = checked_coefficients(cfg.coefficients, cfg.allow_undamped, log);
  if (!c) return kExitConfigError;

  SimState state;
  try {
    state = initial_state(cfg);
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const bool zero_means = state.mean_u == 0.0 && state.mean_v == 0.0;
  std::vector<std::string> ids;
  for (const auto& id : selected_identities(cfg)) {
    if (is_zero_mean_identity(id) && !zero_means) {
      if (cfg.checks.empty()) continue;
      log << "config error: identity " << id << " needs zero-mean initial data\n";
      return kExitConfigError;
    }
    ids.push_back(id);
  }

  struct Track {
    bool exact = true;
    double worst = 0.0;
  };
  std::map<std::string, Track> tracks;
  std::vector<Observer> observers;
  if (!ids.empty()) {
    observers.push_back([&](const SimState& s) {
      for (const auto& r : identity_battery(s, *c, cfg.n_max, ids)) {
        auto& t = tracks[r.id];
        t.exact = r.exact;
        t.worst = std::max(t.worst, r.relative_residual);
      }
    });
  }

  const fs::path dir = prepare_dir(cfg, out_dir);
  Json summary;
  summary["command"] = "run";
  EvolveResult result;
  try {
    result = evolve(state, *c, evolve_options(cfg), observers);
  } catch (const BlowUpError& e) {
    log << e.what() << "\n";
    summary["status"] = "blow_up";
    summary["exit_code"] = static_cast<int>(kExitBlowUp);
    summary["branch"] = to_string(c->branch());
    summary["blow_up"] = {{"t", e.time()}, {"message", e.what()}};
    summary["config"] = Json::parse(dump_config(cfg));
    write_atomic(dir / cfg.summary, summary.dump(2) + "\n");
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  bool pass = true;
  Json identities = Json::array();
  for (const auto& id : ids) {
    const auto& t = tracks[id];
    const bool ok = !t.exact || t.worst <= kExactTolerance;
    if (!ok) {
      pass = false;
      log << "identity " << id << " failed: max relative residual " << num(t.worst) << "\n";
    }
    identities.push_back({{"id", id},
                          {"exact", t.exact},
                          {"max_relative_residual", t.worst},
                          {"tolerance", t.exact ? Json(kExactTolerance) : Json(nullptr)},
                          {"passed", ok}});
  }
  Json fits = Json::array();
  for (const auto& spec : effective_fits(cfg)) fits.push_back(fit_json(try_fit(result.series, spec, c->k())));

  const int code = pass ? kExitPass : kExitVerificationFailure;
  summary["status"] = pass ? "pass" : "fail";
  summary["exit_code"] = code;
  summary["branch"] = to_string(c->branch());
  summary["dt"] = result.dt;
  summary["steps"] = result.steps;
  summary["observations"] = result.series.records.size();
  summary["max_mean_drift"] = result.series.max_mean_drift;
  summary["fits"] = fits;
  summary["identities"] = identities;
  summary["blow_up"] = nullptr;
  summary["config"] = Json::parse(dump_config(cfg));

  write_atomic(dir / cfg.csv, diagnostics_csv(result.series));
  write_atomic(dir / cfg.summary, summary.dump(2) + "\n");
  if (!cfg.svg.empty()) write_atomic(dir / cfg.svg, energy_svg(result.series));
  log << "run " << (pass ? "passed" : "failed") << ": " << result.steps << " steps of dt = "
      << num(result.dt) << ", outputs in " << dir.string() << "\n";
  return code;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log,
               const std::optional<fs::path>& out_dir) {
  const fs::path dir = prepare_dir(cfg, out_dir);
  Json report;
  report["command"] = "verify";
  Json violations = Json::array();
  const auto c = checked_coefficients(cfg.coefficients, cfg.allow_undamped, log, &violations);
  if (!c) {
    report["status"] = "invalid_config";
    report["exit_code"] = static_cast<int>(kExitConfigError);
    report["violations"] = violations;
    report["checks"] = Json::array();
    write_atomic(dir / cfg.report, report.dump(2) + "\n");
    return kExitConfigError;
  }

  const auto grid = make_grid(cfg.n_points);
  Json checks = Json::array();
  std::vector<std::string> failed;
  auto record = [&](Json entry) {
    if (!entry["passed"].get<bool>()) failed.push_back(entry["id"].get<std::string>());
    checks.push_back(std::move(entry));
  };

  std::vector<std::string> exact_ids, approx_ids;
  for (const auto& id : selected_identities(cfg))
    (id.find("APPROX") != std::string::npos || id == "H2_MAIN" ||
             id == "H2_SUB:grad_sq_weighted" || id == "H2_SUB:mixed_v" || id == "H2_SUB:mixed_u"
         ? approx_ids
         : exact_ids)
        .push_back(id);

  if (!exact_ids.empty()) {
    std::map<std::string, double> worst;
    for (unsigned i = 0; i < cfg.verify_states; ++i) {
      const auto s = random_smooth_state(grid, cfg.verify_seed + i, 1.0);
      for (const auto& r : identity_battery(s, *c, cfg.n_max, exact_ids))
        worst[r.id] = std::max(worst[r.id], r.relative_residual);
    }
    for (const auto& id : exact_ids)
      record({{"id", id},
              {"kind", "identity"},
              {"passed", worst[id] <= kExactTolerance},
              {"value", worst[id]},
              {"tolerance", kExactTolerance},
              {"detail", "max relative residual over " + std::to_string(cfg.verify_states) +
                             " random states"}});
  }

  if (!approx_ids.empty()) {
    const auto base = reference_state(grid);
    const double amps[] = {0.2, 0.1, 0.05};
    for (const auto& id : approx_ids) {
      const auto sc = amplitude_scaling(id, base, *c, amps, cfg.n_max);
      bool ok = true;
      double farthest = 0.5;
      for (double r : sc.ratios) {
        ok = ok && r >= kScalingLow && r <= kScalingHigh;
        if (std::abs(r - 0.5) > std::abs(farthest - 0.5)) farthest = r;
      }
      record({{"id", id},
              {"kind", "scaling"},
              {"passed", ok},
              {"value", farthest},
              {"tolerance", Json::array({kScalingLow, kScalingHigh})},
              {"detail", "residual ratio under amplitude halving"},
              {"amplitudes", sc.amplitudes},
              {"ratios", sc.ratios}});
    }
  }

  if (selected(cfg, kCheckPoincare)) {
    std::mt19937_64 rng(cfg.verify_seed);
    std::uniform_real_distribution<double> mean(-1.0, 1.0);
    const double ps[] = {1, 2, 4, INFINITY};
    std::size_t violations_found = 0, cases = 0;
    const auto g = make_grid(32);
    for (unsigned i = 0; i < 200; ++i) {
      auto f = random_smooth_state(g, cfg.verify_seed + 1000 + i, 1.0, 6).u;
      f.set_coeff(0, mean(rng));
      for (double p : ps)
        for (double q : ps) {
          ++cases;
          if (!check_poincare_holder(f, p, q)) ++violations_found;
        }
    }
    record({{"id", kCheckPoincare},
            {"kind", "inequality"},
            {"passed", violations_found == 0},
            {"value", violations_found},
            {"tolerance", 0},
            {"detail", std::to_string(cases) + " (field, p, q) cases"}});
  }

  if (selected(cfg, kCheckProduct)) {
    std::size_t violations_found = 0, cases = 0;
    const auto g = make_grid(32);
    for (unsigned i = 0; i < 50; ++i) {
      const auto s = random_smooth_state(g, cfg.verify_seed + 2000 + i, 1.0, 6);
      for (unsigned n = 1; n <= 3; ++n) {
        const auto table = derivative_table(s.u, s.v, n);
        for (const auto& [a, b] : admissible_exponents(n, 4)) {
          ++cases;
          if (!evaluate_product_bound(table, a, b).holds) ++violations_found;
        }
      }
    }
    record({{"id", kCheckProduct},
            {"kind", "inequality"},
            {"passed", violations_found == 0},
            {"value", violations_found},
            {"tolerance", 0},
            {"detail", std::to_string(cases) + " (field, exponent tuple) cases"}});
  }

  if (selected(cfg, kCheckDecayFit)) {
    // Near-linear short run: every quantity decays at exactly 2k.
    const auto s = random_smooth_state(make_grid(32), cfg.verify_seed, 1e-6, 4);
    EvolveOptions o;
    o.t_final = 1.0;
    o.observe_every = 0.1;
    o.n_max = cfg.n_max;
    const auto r = evolve(s, *c, o);
    const double tol = 1e-3 * std::max(1.0, 2 * c->k());
    std::vector<std::string> qs{"energy"};
    for (unsigned n = 0; n <= cfg.n_max; ++n) qs.push_back("seminorm_sq_" + std::to_string(n));
    double worst = 0;
    Json fits = Json::array();
    for (const auto& q : qs) {
      const auto f = fit_decay_rate(r.series, q, 0.0, 1.0, c->k());
      worst = std::max(worst, std::abs(f.fitted_rate - f.target_rate));
      fits.push_back(fit_json(f));
    }
    record({{"id", kCheckDecayFit},
            {"kind", "decay_fit"},
            {"passed", worst <= tol},
            {"value", worst},
            {"tolerance", tol},
            {"detail", "largest |fitted - target| rate on a short small-amplitude run"},
            {"fits", fits}});
  }

  const bool pass = failed.empty();
  const int code = pass ? kExitPass : kExitVerificationFailure;
  report["status"] = pass ? "pass" : "fail";
  report["exit_code"] = code;
  report["branch"] = to_string(c->branch());
  report["violations"] = violations;
  report["checks"] = checks;
  report["config"] = Json::parse(dump_config(cfg));
  write_atomic(dir / cfg.report, report.dump(2) + "\n");
  for (const auto& id : failed) log << "check failed: " << id << "\n";
  log << "verify " << (pass ? "passed" : "failed") << ": " << checks.size() << " checks, report in "
      << (dir / cfg.report).string() << "\n";
  return code;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log,
              const std::optional<fs::path>& out_dir) {
  std::vector<std::pair<std::string, std::vector<double>>> axes(cfg.sweep.begin(), cfg.sweep.end());
  std::erase_if(axes, [](const auto& a) { return a.second.empty(); });
  if (axes.empty()) {
    log << "config error: empty sweep (give sweep axes in the config or with --axis)\n";
    return kExitConfigError;
  }

  struct Point {
    ExperimentConfig cfg;
    std::optional<ValidatedCoefficients> coeffs;
    std::vector<DecayFit> fits;
    std::string status = "pending";
    std::string message;
  };
  std::vector<Point> points;
  std::vector<std::size_t> index(axes.size(), 0);
  for (;;) {
    Point p;
    p.cfg = cfg;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].second[index[a]];
      if (axes[a].first == "k") p.cfg.coefficients.k = v;
      if (axes[a].first == "a3") p.cfg.coefficients.a3 = v;
      if (axes[a].first == "amplitude") p.cfg.amplitude = v;
    }
    points.push_back(std::move(p));
    std::size_t a = 0;
    while (a < axes.size() && ++index[a] == axes[a].second.size()) index[a++] = 0;
    if (a == axes.size()) break;
  }

  bool invalid = false;
  for (auto& p : points) {
    std::ostringstream why;
    p.coeffs = checked_coefficients(p.cfg.coefficients, p.cfg.allow_undamped, why);
    if (!p.coeffs) {
      invalid = true;
      log << "sweep point k = " << p.cfg.coefficients.k << ", a3 = " << p.cfg.coefficients.a3
          << ": " << why.str();
    }
  }
  if (invalid) return kExitConfigError;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) {
      auto& p = points[i];
      try {
        const auto r = evolve(initial_state(p.cfg), *p.coeffs, evolve_options(p.cfg));
        for (const auto& spec : effective_fits(p.cfg)) p.fits.push_back(try_fit(r.series, spec, p.coeffs->k()));
        p.status = "ok";
      } catch (const BlowUpError& e) {
        p.status = "blow_up";
        p.message = e.what();
      } catch (const std::exception& e) {
        p.status = "error";
        p.message = e.what();
      }
    }
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(sweep_threads(), points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "point,k,a3,amplitude,quantity,t_start,t_end,fitted_rate,target_rate,r_squared,points,"
         "status\n";
  int code = kExitPass;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto prefix = std::to_string(i) + ',' + num(p.cfg.coefficients.k) + ',' +
                        num(p.cfg.coefficients.a3) + ',' + num(p.cfg.amplitude) + ',';
    if (p.status != "ok") {
      csv << prefix << ",,,,,,," << p.status << '\n';
      log << "sweep point " << i << ": " << p.message << "\n";
      code = std::max(code, p.status == "blow_up" ? int(kExitBlowUp) : int(kExitConfigError));
      continue;
    }
    for (const auto& f : p.fits) {
      csv << prefix << f.quantity_id << ',' << num(f.t_start) << ',' << num(f.t_end) << ','
          << (std::isfinite(f.fitted_rate) ? num(f.fitted_rate) : "") << ',' << num(f.target_rate)
          << ',' << (std::isfinite(f.r_squared) ? num(f.r_squared) : "") << ',' << f.points
          << ",ok\n";
    }
  }
  const fs::path dir = prepare_dir(cfg, out_dir);
  write_atomic(dir / cfg.sweep_csv, csv.str());
  log << "sweep of " << points.size() << " points on " << n_threads << " threads, results in "
      << (dir / cfg.sweep_csv).string() << "\n";
  return code;
}

}  // namespace gg
