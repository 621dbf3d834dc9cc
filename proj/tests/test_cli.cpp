#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "gg/cli.hpp"

using namespace gg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("gg_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("no column " + name);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_points = 64;
  c.t_final = 0.5;
  c.observe_every = 0.05;
  return c;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto c = parse_config("{}");
  CHECK(c.n_points == 256);
  CHECK(c.dt == 0.0);
  CHECK(c.t_final == 10.0);
  CHECK(c.n_max == 4);
  CHECK(c.preset == "single-mode");
  CHECK(c == ExperimentConfig{});
}

TEST_CASE("config round-trips losslessly") {
  ExperimentConfig c;
  c.n_points = 128;
  c.coefficients = {0.0, 1.0, 1.0, 0.3, 1.0, 1.0, 0.1 + 0.2};
  c.allow_undamped = true;
  c.preset = "random-smooth seed=12345678901";
  c.amplitude = 1.0 / 3.0;
  c.dt = 1e-4 / 7;
  c.resolved_modes = 3;
  c.t_final = 2.5;
  c.observe_every = 0.125;
  c.n_max = 5;
  c.output_dir = "some dir/x";
  c.svg = "plot.svg";
  c.checks = {"L2", "H2_MAIN", "PRODUCT_BOUND"};
  c.fits = {{"seminorm_sq_5", 0.5, 2.0}, {"f2", 0.0, 0.0}};
  c.verify_states = 3;
  c.verify_seed = 18446744073709551615ull;
  c.sweep = {{"k", {0.25, 0.5}}, {"amplitude", {std::nextafter(0.1, 1.0)}}};

  const auto text = dump_config(c);
  const auto back = parse_config(text);
  CHECK(back == c);
  CHECK(dump_config(back) == text);
  CHECK(parse_config(dump_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("shipped configs load") {
  for (const auto& entry : fs::directory_iterator(GG_CONFIG_DIR)) {
    INFO(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config errors") {
  const char* bad[] = {
      "not json",
      "[]",
      R"({"bogus": 1})",
      R"({"grid": {"n_points": 7}})",
      R"({"grid": {"n_points": -8}})",
      R"({"grid": {"points": 64}})",
      R"({"coefficients": {"a3": "half"}})",
      R"({"coefficients": {"c": 1}})",
      R"({"initial": {"preset": "three-soliton"}})",
      R"({"initial": {"preset": "random-smooth seed=x"}})",
      R"({"time": {"t_final": 0}})",
      R"({"time": {"dt": -1}})",
      R"({"n_max": -1})",
      R"({"n_max": 1.5})",
      R"({"checks": {"ids": ["H3_MAIN"]}})",
      R"({"checks": {"fits": [{"quantity": "seminorm_sq_9"}]}})",
      R"({"checks": {"fits": [{"quantity": "energy", "t_start": 5, "t_end": 20}]}})",
      R"({"checks": {"fits": [{"quantity": "energy", "t_start": 5, "t_end": 5}]}})",
      R"({"sweep": {"b1": [1, 2]}})",
      R"({"sweep": {"k": 1}})",
  };
  for (const char* text : bad) {
    INFO(std::string(text));
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
  // Coefficient validity is the command's business, not the parser's.
  CHECK_NOTHROW(parse_config(R"({"coefficients": {"a3": 1.0}})"));
}

TEST_CASE("sweep axis parsing") {
  const auto [name, values] = parse_axis("k=0.25,0.5,1.0");
  CHECK(name == "k");
  CHECK(values == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(parse_axis("a3=").second.empty());
  CHECK_THROWS_AS(parse_axis("k"), ConfigError);
  CHECK_THROWS_AS(parse_axis("=1"), ConfigError);
  CHECK_THROWS_AS(parse_axis("b1=1"), ConfigError);
  CHECK_THROWS_AS(parse_axis("k=1,x"), ConfigError);
}

TEST_CASE("GG_THREADS caps sweep parallelism") {
  ::setenv("GG_THREADS", "3", 1);
  CHECK(sweep_threads() == 3);
  ::setenv("GG_THREADS", "zero", 1);
  CHECK(sweep_threads() >= 1);
  ::unsetenv("GG_THREADS");
  CHECK(sweep_threads() >= 1);
}

TEST_CASE("initial-condition presets") {
  auto c = small_config();
  const auto single = initial_state(c);
  CHECK(std::abs(single.u.coeff(1) - Complex(0, -0.05)) < 1e-15);
  CHECK(parseval_sum(single.v) == 0.0);

  c.preset = "random-smooth seed=4";
  const auto a = initial_state(c), b = initial_state(c);
  CHECK(parseval_sum(a.u - b.u) == 0.0);
  c.preset = "random-smooth seed=5";
  CHECK(parseval_sum(initial_state(c).u - a.u) > 0.0);

  c.preset = "two-soliton-like";
  const auto t = initial_state(c);
  CHECK(t.mean_u > 0.0);
  CHECK(t.u.coeff(0) == Complex{});
  for (std::size_t k = t.grid().dealias_cutoff + 1; k <= t.grid().n_modes; ++k) {
    CHECK(t.u.coeff(static_cast<long>(k)) == Complex{});
    CHECK(t.v.coeff(static_cast<long>(k)) == Complex{});
  }
}

TEST_CASE("diagnostics CSV layout") {
  DiagnosticSeries s;
  s.n_max = 2;
  FunctionalRecord r;
  r.t = 0.1;
  r.energy = 1.0 / 3.0;
  r.seminorm_sq = {1, 2, 3};
  r.g1 = -1.0 / 3e300;
  s.records.push_back(r);
  const auto csv = diagnostics_csv(s);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,energy,seminorm_sq_0,seminorm_sq_1,seminorm_sq_2,f1,g1,f2,g2,h2");
  CHECK(row == "0.10000000000000001,0.33333333333333331,1,2,3,0,-3.333333333333333e-301,0,0,0");
  CHECK(std::stod("0.33333333333333331") == 1.0 / 3.0);
}

TEST_CASE("atomic writes leave no temporaries") {
  TempDir dir;
  write_atomic(dir.path / "a.txt", "one");
  write_atomic(dir.path / "a.txt", "two");
  CHECK(slurp(dir.path / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
}

TEST_CASE("run: single mode energy decays as exp(-2t)") {
  TempDir dir;
  auto c = small_config();
  c.t_final = 2.0;
  c.observe_every = 0.1;
  c.coefficients.k = 1.0;
  c.svg = "energy.svg";
  std::ostringstream log;
  REQUIRE(cmd_run(c, log, dir.path) == kExitPass);

  const auto rows = read_csv(dir.path / c.csv);
  REQUIRE(rows.size() == 22);
  const auto ie = column(rows[0], "energy");
  CHECK(rows[0].size() == 2 + 5 + 5);
  const double e0 = std::stod(rows[1][ie]);
  CHECK(e0 == doctest::Approx(0.0025).epsilon(1e-14));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    CHECK(std::stod(rows[i][ie]) == doctest::Approx(e0 * std::exp(-2 * t)).epsilon(1e-6));
  }

  const auto summary = nlohmann::json::parse(slurp(dir.path / c.summary));
  CHECK(summary["status"] == "pass");
  CHECK(summary["blow_up"].is_null());
  CHECK(summary["fits"][0]["fitted_rate"].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(summary["observations"] == 21);
  for (const auto& id : summary["identities"])
    if (id["exact"].get<bool>()) CHECK(id["max_relative_residual"].get<double>() <= 1e-8);
  CHECK(parse_config(summary["config"].dump()) == c);

  const auto svg = slurp(dir.path / "energy.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("run: zero initial data") {
  TempDir dir;
  auto c = small_config();
  c.amplitude = 0.0;
  std::ostringstream log;
  REQUIRE(cmd_run(c, log, dir.path) == kExitPass);
  const auto rows = read_csv(dir.path / c.csv);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t j = 1; j < rows[i].size(); ++j) CHECK(rows[i][j] == "0");
  const auto summary = nlohmann::json::parse(slurp(dir.path / c.summary));
  CHECK(summary["fits"][0]["fitted_rate"].is_null());
  CHECK(summary["fits"][0]["points"] == 0);
}

TEST_CASE("run: absurd time step is reported as a blow-up") {
  TempDir dir;
  ExperimentConfig c;
  c.preset = "random-smooth seed=1";
  c.amplitude = 1.0;
  c.dt = 10.0;
  std::ostringstream log;
  CHECK(cmd_run(c, log, dir.path) == kExitBlowUp);
  CHECK(log.str().find("blow-up") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(dir.path / c.summary));
  CHECK(summary["status"] == "blow_up");
  CHECK(summary["blow_up"]["t"].get<double>() == 10.0);
  CHECK_FALSE(fs::exists(dir.path / c.csv));
}

TEST_CASE("run: configuration errors") {
  TempDir dir;
  auto c = small_config();
  c.coefficients.a3 = 1.0;
  std::ostringstream log;
  CHECK(cmd_run(c, log, dir.path) == kExitConfigError);
  CHECK(log.str().find("|a3| < 1") != std::string::npos);

  c = small_config();
  c.observe_every = 0.0123;
  c.dt = 0.001;
  CHECK(cmd_run(c, log, dir.path) == kExitConfigError);

  c = small_config();
  c.preset = "two-soliton-like";
  c.checks = {"H1_MAIN"};
  CHECK(cmd_run(c, log, dir.path) == kExitConfigError);
}

TEST_CASE("verify: default config passes every check") {
  TempDir dir;
  ExperimentConfig c = load_config(fs::path(GG_CONFIG_DIR) / "default.json");
  std::ostringstream log;
  REQUIRE(cmd_verify(c, log, dir.path) == kExitPass);
  const auto report = nlohmann::json::parse(slurp(dir.path / c.report));
  CHECK(report["status"] == "pass");
  std::set<std::string> ids;
  for (const auto& check : report["checks"]) {
    CHECK(check["passed"].get<bool>());
    ids.insert(check["id"].get<std::string>());
  }
  for (const auto& id : identity_ids(c.n_max)) CHECK(ids.contains(id));
  CHECK(ids.contains(kCheckPoincare));
  CHECK(ids.contains(kCheckProduct));
  CHECK(ids.contains(kCheckDecayFit));
}

TEST_CASE("verify: invalid coefficients and filtering") {
  TempDir dir;
  ExperimentConfig c;
  c.coefficients.a3 = 1.0;
  std::ostringstream log;
  CHECK(cmd_verify(c, log, dir.path) == kExitConfigError);
  auto report = nlohmann::json::parse(slurp(dir.path / c.report));
  CHECK(report["status"] == "invalid_config");
  REQUIRE(report["violations"].size() == 1);
  CHECK(report["violations"][0]["constraint"] == "|a3| < 1");

  c = ExperimentConfig{};
  c.checks = {"L2"};
  CHECK(cmd_verify(c, log, dir.path) == kExitPass);
  report = nlohmann::json::parse(slurp(dir.path / c.report));
  REQUIRE(report["checks"].size() == 1);
  CHECK(report["checks"][0]["id"] == "L2");
}

TEST_CASE("sweep: linearized decay rates follow 2k") {
  TempDir dir;
  auto c = load_config(fs::path(GG_CONFIG_DIR) / "sweep_rates.json");
  c.sweep.erase("a3");
  std::ostringstream log;
  REQUIRE(cmd_sweep(c, log, dir.path) == kExitPass);
  const auto rows = read_csv(dir.path / c.sweep_csv);
  REQUIRE(rows.size() == 4);
  const auto& h = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double k = std::stod(rows[i][column(h, "k")]);
    CHECK(rows[i][column(h, "status")] == "ok");
    CHECK(std::stod(rows[i][column(h, "fitted_rate")]) == doctest::Approx(-2 * k).epsilon(1e-3));
  }
}

TEST_CASE("sweep: rate does not depend on a3") {
  TempDir dir;
  auto c = load_config(fs::path(GG_CONFIG_DIR) / "sweep_rates.json");
  c.sweep.erase("k");
  c.coefficients.k = 0.5;
  std::ostringstream log;
  REQUIRE(cmd_sweep(c, log, dir.path) == kExitPass);
  const auto rows = read_csv(dir.path / c.sweep_csv);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][column(rows[0], "fitted_rate")]) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("sweep: errors") {
  TempDir dir;
  auto c = small_config();
  std::ostringstream log;
  CHECK(cmd_sweep(c, log, dir.path) == kExitConfigError);
  c.sweep["k"] = {};
  CHECK(cmd_sweep(c, log, dir.path) == kExitConfigError);
  c.sweep["a3"] = {1.0};
  c.sweep["k"] = {1.0};
  CHECK(cmd_sweep(c, log, dir.path) == kExitConfigError);
  CHECK_FALSE(fs::exists(dir.path / c.sweep_csv));
}
