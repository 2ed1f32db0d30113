#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "oracles.hpp"
#include "sttcbf/commands.hpp"
#include "sttcbf/parser.hpp"

using namespace sttcbf;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(STTCBF_SOURCE_DIR) / "scenarios";

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sttcbf_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const ScenarioConfig& cfg, const fs::path& dir) {
  auto p = dir / "config.json";
  std::ofstream(p) << to_json(cfg).dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STTCBF_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Log of an omni robot at the given positions, one row per time.
void write_log(const fs::path& p, const std::vector<double>& t,
               const std::vector<std::vector<double>>& xs) {
  std::ofstream os(p);
  os << "t,x_1,x_2,u_1,u_2,b,psi,active\n";
  for (std::size_t k = 0; k < t.size(); ++k)
    os << t[k] << ',' << xs[k][0] << ',' << xs[k][1] << ",0,0,1,0,0\n";
}

ScenarioConfig monitor_config(const std::string& formula, double tf) {
  auto cfg = load_scenario(kScenarios / "stlfrag2.json");
  cfg.name = "monitor";
  cfg.tf = tf;
  cfg.formula = formula;
  cfg.predicates = {{"T", Predicate::box({5.0, 5.0}, 1.0)}, {"O", Predicate::box({3.0, 3.0}, 0.5)}};
  cfg.cover.tf = tf;
  cfg.solver.waypoints.clear();
  return cfg;
}

}  // namespace

TEST_CASE("every shipped scenario loads, validates and round-trips") {
  int count = 0;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() != ".json") continue;
    ++count;
    const auto cfg = load_scenario(e.path());
    CHECK_NOTHROW(validate(cfg));
    const auto text = to_json(cfg).dump();
    CHECK(scenario_from_json(nlohmann::json::parse(text)) == cfg);
  }
  CHECK(count >= 7);
}

TEST_CASE("config errors name the offending key") {
  auto j = to_json(load_scenario(kScenarios / "omni_example.json"));
  j["t_f"] = "six";
  CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("t_f"), ConfigError);
  auto k = to_json(load_scenario(kScenarios / "omni_example.json"));
  k["predicates"]["T"]["kind"] = "polygon";
  CHECK_THROWS_AS(scenario_from_json(k), ConfigError);
}

TEST_CASE("check reports the horizon of stlfrag-2") {
  std::ostringstream out, err;
  CHECK(cmd_check(kScenarios / "stlfrag2.json", out, err) == exit_code::ok);
  CHECK(out.str().find("horizon: 10\n") != std::string::npos);
}

TEST_CASE("check: input errors exit 2") {
  const auto dir = scratch("check");
  auto cfg = monitor_config("", 5.0);
  std::ostringstream out, err;
  CHECK(cmd_check(write_config(cfg, dir), out, err) == exit_code::input_error);
  CHECK(err.str().find("parse") != std::string::npos);

  cfg.formula = "F[0,5] T & G[0,5] !Wall & !Moat";
  std::ostringstream out2, err2;
  CHECK(cmd_check(write_config(cfg, dir), out2, err2) == exit_code::input_error);
  CHECK(err2.str().find("Wall") != std::string::npos);
  CHECK(err2.str().find("Moat") != std::string::npos);

  cfg.formula = "F[0,9] T";  // horizon beyond t_f
  std::ostringstream out3, err3;
  CHECK(cmd_check(write_config(cfg, dir), out3, err3) == exit_code::input_error);

  std::ostringstream out4, err4;
  CHECK(cmd_check(dir / "missing.json", out4, err4) == exit_code::input_error);
}

TEST_CASE("synthesize: tiny coefficient box exits 3") {
  const auto dir = scratch("tiny_box");
  auto cfg = load_scenario(kScenarios / "stlfrag2.json");
  const std::size_t q = 2 * cfg.tube.center_terms + cfg.tube.radius_terms;
  // every control point pinned near (1, 1): the tube cannot reach Y
  cfg.tube.coeff_lo = std::vector<double>(q, 0.9);
  cfg.tube.coeff_hi = std::vector<double>(q, 1.1);
  cfg.tube.start.reset();
  cfg.solver.max_evaluations = 300;
  CommandOptions o;
  o.out = dir;
  std::ostringstream out, err;
  CHECK(cmd_synthesize(write_config(cfg, dir), o, out, err) == exit_code::infeasible);
  const auto res = result_from_json(nlohmann::json::parse(slurp(dir / "result.json")));
  CHECK(res.eta_star > 0.0);
  CHECK_FALSE(res.certificate_ok);
}

TEST_CASE("synthesize: same seed gives byte-identical results") {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  CommandOptions o;
  o.seed = 5;
  o.out = a;
  std::ostringstream out, err;
  CHECK(cmd_synthesize(kScenarios / "stlfrag2.json", o, out, err) == exit_code::ok);
  o.out = b;
  o.workers = 2;
  CHECK(cmd_synthesize(kScenarios / "stlfrag2.json", o, out, err) == exit_code::ok);
  CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
  CHECK(!slurp(a / "result.json").empty());
}

TEST_CASE("verify: parked in the target") {
  const auto dir = scratch("verify_park");
  const auto cfg_path = write_config(monitor_config("G[0,5] T", 5.0), dir);
  std::vector<double> t;
  std::vector<std::vector<double>> xs;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.05 * k);
    xs.push_back({5.0 + 0.2 * std::sin(0.3 * k), 5.0 - 0.1 * std::cos(0.2 * k)});
  }
  write_log(dir / "log.csv", t, xs);
  std::ostringstream out, err;
  CHECK(cmd_verify(cfg_path, dir / "log.csv", out, err) == exit_code::ok);
  CHECK(out.str().find("satisfied: yes") != std::string::npos);
}

TEST_CASE("verify: crossing the obstacle once") {
  const auto dir = scratch("verify_cross");
  const auto cfg = monitor_config("G[0,5] !O", 5.0);
  const auto cfg_path = write_config(cfg, dir);
  oracle::Trace tr;
  for (int k = 0; k <= 50; ++k) {
    tr.t.push_back(0.1 * k);
    tr.x.push_back({1.0 + 0.8 * k * 0.1, 3.1});  // passes through O around t = 2.5
  }
  write_log(dir / "log.csv", tr.t, tr.x);
  const auto log = [&] {
    std::ifstream in(dir / "log.csv");
    return read_trace_csv(in);
  }();
  const auto v = verify_trace(cfg, log);
  const auto f = scenario_formula(cfg);
  CHECK(v.robustness < 0.0);
  CHECK(v.robustness == doctest::Approx(oracle::robustness(*f, tr, 0.0, true)).epsilon(1e-12));
  std::ostringstream out, err;
  CHECK(cmd_verify(cfg_path, dir / "log.csv", out, err) == exit_code::infeasible);
}

TEST_CASE("verify: inconsistent inputs exit 2") {
  const auto dir = scratch("verify_bad");
  const auto cfg_path = write_config(monitor_config("G[0,5] T", 5.0), dir);
  // horizon not covered
  write_log(dir / "short.csv", {0.0, 1.0}, {{5.0, 5.0}, {5.0, 5.0}});
  std::ostringstream out, err;
  CHECK(cmd_verify(cfg_path, dir / "short.csv", out, err) == exit_code::input_error);
  // three state columns for a 2-D omni task
  std::ofstream(dir / "wide.csv") << "t,x_1,x_2,x_3,u_1,u_2,u_3,b,psi,active\n0,5,5,0,0,0,0,1,0,0\n5,5,5,0,0,0,0,1,0,0\n";
  CHECK(cmd_verify(cfg_path, dir / "wide.csv", out, err) == exit_code::input_error);
  CHECK(cmd_verify(cfg_path, dir / "none.csv", out, err) == exit_code::input_error);
}

TEST_CASE("simulate after synthesize, then verify agrees") {
  const auto dir = scratch("pipeline");
  CommandOptions o;
  o.out = dir;
  o.emit_plot_data = true;
  std::ostringstream out, err;
  const auto cfg = kScenarios / "stlfrag1.json";
  REQUIRE(cmd_synthesize(cfg, o, out, err) == exit_code::ok);
  CHECK(fs::exists(dir / "tube.csv"));
  REQUIRE(cmd_simulate(cfg, std::nullopt, o, out, err) == exit_code::ok);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  std::ostringstream vout;
  CHECK(cmd_verify(cfg, dir / "trajectory.csv", vout, err) == exit_code::ok);
  std::ifstream in(dir / "trajectory.csv");
  const auto v = verify_trace(load_scenario(cfg), read_trace_csv(in));
  CHECK(v.robustness == summary["final_robustness"].get<double>());
}

TEST_CASE("binary exit codes") {
  CHECK(run_cli("check --config " + (kScenarios / "stlfrag2.json").string()) == 0);
  CHECK(run_cli("check") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("check --config /nonexistent.json") == 2);
  CHECK(run_cli("verify --config " + (kScenarios / "stlfrag2.json").string()) == 2);
}

TEST_CASE("bench table layout") {
  std::ostringstream os;
  write_bench_table(os, {{"stlfrag-2", 0.5, 0.01, -0.7, true, 1.3}});
  std::string header, row;
  std::istringstream is(os.str());
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "task,synthesis_s,simulation_s,eta_star,certified,final_robustness");
  CHECK(row.rfind("stlfrag-2,", 0) == 0);
}
