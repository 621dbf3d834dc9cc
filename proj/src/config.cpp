#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gg/cli.hpp"

namespace gg {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown(const Json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail("wrong type for '" + std::string(key) + "' in " + where);
  }
}

void read_double(const Json& obj, const char* key, double& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) fail("'" + std::string(key) + "' in " + where + " must be a number");
  out = obj.at(key).get<double>();
  if (!std::isfinite(out)) fail("'" + std::string(key) + "' in " + where + " must be finite");
}

void read_unsigned(const Json& obj, const char* key, unsigned& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  out = v.get<unsigned>();
}

Json section(const Json& root, const char* key) {
  return root.contains(key) ? root.at(key) : Json::object();
}

struct Preset {
  enum Kind { single_mode, random_smooth, two_soliton } kind;
  std::uint64_t seed = 0;
};

Preset parse_preset(const std::string& s) {
  if (s == "single-mode") return {Preset::single_mode};
  if (s == "two-soliton-like") return {Preset::two_soliton};
  static const std::regex random_re(R"(random-smooth(?:\s+seed=(\d+))?)");
  std::smatch m;
  if (std::regex_match(s, m, random_re)) {
    Preset p{Preset::random_smooth};
    if (m[1].matched) p.seed = std::stoull(m[1].str());
    return p;
  }
  fail("unknown initial-condition preset '" + s +
       "' (expected single-mode, random-smooth seed=<n>, two-soliton-like)");
}

bool valid_quantity(const std::string& q, unsigned n_max) {
  if (q == "energy" || q == "f1" || q == "f2") return true;
  static const std::regex re(R"(seminorm_sq_(\d+))");
  std::smatch m;
  return std::regex_match(q, m, re) && std::stoul(m[1].str()) <= n_max;
}

void validate(const ExperimentConfig& c) {
  try {
    make_grid(c.n_points);
  } catch (const std::invalid_argument& e) {
    fail(std::string("grid: ") + e.what());
  }
  if (!(c.t_final > 0)) fail("time.t_final must be positive");
  if (c.dt < 0) fail("time.dt must be non-negative (0 selects the default)");
  if (c.observe_every < 0) fail("time.observe_every must be non-negative");
  if (c.resolved_modes == 0) fail("time.resolved_modes must be positive");
  if (c.n_max > 8) fail("n_max must not exceed 8");
  parse_preset(c.preset);

  std::set<std::string> known;
  for (const auto& id : identity_ids(c.n_max)) known.insert(id);
  known.insert({kCheckPoincare, kCheckProduct, kCheckDecayFit});
  for (const auto& id : c.checks)
    if (!known.contains(id)) fail("unknown check '" + id + "'");

  for (const auto& f : c.fits) {
    if (!valid_quantity(f.quantity, c.n_max)) fail("unknown fit quantity '" + f.quantity + "'");
    const double end = f.t_end > 0 ? f.t_end : c.t_final;
    if (f.t_start < 0 || !(end > f.t_start) || end > c.t_final)
      fail("fit window for '" + f.quantity + "' must satisfy 0 <= t_start < t_end <= t_final");
  }
  for (const auto& [axis, values] : c.sweep) {
    if (axis != "k" && axis != "a3" && axis != "amplitude") fail("unknown sweep axis '" + axis + "'");
    for (double v : values)
      if (!std::isfinite(v)) fail("sweep axis '" + axis + "' has a non-finite value");
  }
}

double sech2(double z) {
  const double s = 1.0 / std::cosh(z);
  return s * s;
}

// sech^2 bump of width w centred at x0, summed over neighbouring periods.
double periodic_bump(double x, double x0, double w) {
  double sum = 0;
  for (int j = -3; j <= 3; ++j) sum += sech2((x - x0 + j) / w);
  return sum;
}

void truncate(SpectralField& f) {
  const auto& g = f.grid();
  for (std::size_t k = g.dealias_cutoff + 1; k <= g.n_modes; ++k) f.set_coeff(static_cast<long>(k), 0.0);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"grid", "coefficients", "initial", "time", "n_max", "output", "checks", "sweep"});
  ExperimentConfig c;

  const auto grid = section(root, "grid");
  reject_unknown(grid, "grid", {"n_points"});
  unsigned n_points = static_cast<unsigned>(c.n_points);
  read_unsigned(grid, "n_points", n_points, "grid");
  c.n_points = n_points;

  const auto co = section(root, "coefficients");
  reject_unknown(co, "coefficients", {"r", "a1", "a2", "a3", "b1", "b2", "k", "allow_undamped"});
  read_double(co, "r", c.coefficients.r, "coefficients");
  read_double(co, "a1", c.coefficients.a1, "coefficients");
  read_double(co, "a2", c.coefficients.a2, "coefficients");
  read_double(co, "a3", c.coefficients.a3, "coefficients");
  read_double(co, "b1", c.coefficients.b1, "coefficients");
  read_double(co, "b2", c.coefficients.b2, "coefficients");
  read_double(co, "k", c.coefficients.k, "coefficients");
  read(co, "allow_undamped", c.allow_undamped, "coefficients");

  const auto init = section(root, "initial");
  reject_unknown(init, "initial", {"preset", "amplitude"});
  read(init, "preset", c.preset, "initial");
  read_double(init, "amplitude", c.amplitude, "initial");

  const auto time = section(root, "time");
  reject_unknown(time, "time", {"dt", "resolved_modes", "t_final", "observe_every"});
  read_double(time, "dt", c.dt, "time");
  read_unsigned(time, "resolved_modes", c.resolved_modes, "time");
  read_double(time, "t_final", c.t_final, "time");
  read_double(time, "observe_every", c.observe_every, "time");

  read_unsigned(root, "n_max", c.n_max, "config");

  const auto out = section(root, "output");
  reject_unknown(out, "output", {"directory", "csv", "summary", "svg", "report", "sweep_csv"});
  read(out, "directory", c.output_dir, "output");
  read(out, "csv", c.csv, "output");
  read(out, "summary", c.summary, "output");
  read(out, "svg", c.svg, "output");
  read(out, "report", c.report, "output");
  read(out, "sweep_csv", c.sweep_csv, "output");

  const auto checks = section(root, "checks");
  reject_unknown(checks, "checks", {"ids", "fits", "verify_states", "verify_seed"});
  read(checks, "ids", c.checks, "checks");
  if (checks.contains("fits")) {
    if (!checks.at("fits").is_array()) fail("checks.fits must be an array");
    for (const auto& f : checks.at("fits")) {
      reject_unknown(f, "checks.fits entry", {"quantity", "t_start", "t_end"});
      FitSpec spec;
      read(f, "quantity", spec.quantity, "checks.fits entry");
      read_double(f, "t_start", spec.t_start, "checks.fits entry");
      read_double(f, "t_end", spec.t_end, "checks.fits entry");
      c.fits.push_back(spec);
    }
  }
  read_unsigned(checks, "verify_states", c.verify_states, "checks");
  read(checks, "verify_seed", c.verify_seed, "checks");

  const auto sweep = section(root, "sweep");
  if (!sweep.is_object()) fail("sweep must be an object");
  for (const auto& [axis, values] : sweep.items()) {
    std::vector<double> v;
    read(sweep, axis.c_str(), v, "sweep");
    c.sweep[axis] = v;
  }

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
  Json root;
  root["grid"] = {{"n_points", c.n_points}};
  const auto& co = c.coefficients;
  root["coefficients"] = {{"r", co.r},   {"a1", co.a1}, {"a2", co.a2},
                          {"a3", co.a3}, {"b1", co.b1}, {"b2", co.b2},
                          {"k", co.k},   {"allow_undamped", c.allow_undamped}};
  root["initial"] = {{"preset", c.preset}, {"amplitude", c.amplitude}};
  root["time"] = {{"dt", c.dt},
                  {"resolved_modes", c.resolved_modes},
                  {"t_final", c.t_final},
                  {"observe_every", c.observe_every}};
  root["n_max"] = c.n_max;
  root["output"] = {{"directory", c.output_dir}, {"csv", c.csv},       {"summary", c.summary},
                    {"svg", c.svg},              {"report", c.report}, {"sweep_csv", c.sweep_csv}};
  Json fits = Json::array();
  for (const auto& f : c.fits)
    fits.push_back({{"quantity", f.quantity}, {"t_start", f.t_start}, {"t_end", f.t_end}});
  root["checks"] = {{"ids", c.checks},
                    {"fits", fits},
                    {"verify_states", c.verify_states},
                    {"verify_seed", c.verify_seed}};
  Json sweep = Json::object();
  for (const auto& [axis, values] : c.sweep) sweep[axis] = values;
  root["sweep"] = sweep;
  return root.dump(2) + "\n";
}

SimState initial_state(const ExperimentConfig& cfg) {
  const auto grid = make_grid(cfg.n_points);
  const auto preset = parse_preset(cfg.preset);
  const double a = cfg.amplitude;
  SpectralField u(grid), v(grid);
  switch (preset.kind) {
    case Preset::single_mode:
      u = from_function(grid, [a](double x) { return a * std::sin(2 * kPi * x); });
      break;
    case Preset::random_smooth: {
      auto s = random_smooth_state(grid, preset.seed, a);
      u = s.u;
      v = s.v;
      break;
    }
    case Preset::two_soliton:
      u = from_function(grid, [a](double x) {
        return a * (periodic_bump(x, 0.3, 0.05) + 0.5 * periodic_bump(x, 0.65, 0.07));
      });
      v = from_function(grid, [a](double x) {
        return a * (0.6 * periodic_bump(x, 0.3, 0.05) - 0.4 * periodic_bump(x, 0.65, 0.07));
      });
      break;
  }
  truncate(u);
  truncate(v);
  return reduce_mean(u, v);
}

std::vector<FitSpec> effective_fits(const ExperimentConfig& cfg) {
  std::vector<FitSpec> fits = cfg.fits;
  if (fits.empty()) {
    fits.push_back({"energy", cfg.t_final / 2, cfg.t_final});
    if (cfg.n_max >= 1) fits.push_back({"seminorm_sq_1", cfg.t_final / 2, cfg.t_final});
  }
  for (auto& f : fits)
    if (f.t_end <= 0) f.t_end = cfg.t_final;
  return fits;
}

std::pair<std::string, std::vector<double>> parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) fail("axis must look like name=v1,v2,...: '" + text + "'");
  const std::string name = text.substr(0, eq);
  if (name != "k" && name != "a3" && name != "amplitude") fail("unknown sweep axis '" + name + "'");
  std::vector<double> values;
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0' || !std::isfinite(v))
      fail("bad value '" + item + "' on axis " + name);
    values.push_back(v);
  }
  return {name, values};
}

unsigned sweep_threads() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GG_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return hw;
}

}  // namespace gg
