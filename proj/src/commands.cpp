#include "sttcbf/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "sttcbf/parser.hpp"

namespace sttcbf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << text;
}

template <class F>
void write_with(const fs::path& path, F&& fn) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  fn(os);
}

ScenarioConfig load_valid(const fs::path& path) {
  auto cfg = load_scenario(path);
  validate(cfg);
  return cfg;
}

// Maps exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const SemanticError& e) {
    err << "semantic error: " << e.what() << "\n";
  } catch (const IntervalError& e) {
    err << "interval error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const CoverBudgetError& e) {
    err << "cover error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const InfeasibleStep& e) {
    err << "runtime failure: " << e.what() << "\n";
    return exit_code::runtime_failure;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return exit_code::runtime_failure;
  }
  return exit_code::input_error;
}

}  // namespace

ScenarioConfig apply_overrides(ScenarioConfig cfg, const CommandOptions& opts) {
  if (opts.seed) {
    cfg.solver.seed = *opts.seed;
    cfg.simulation.seed = *opts.seed;
  }
  return cfg;
}

fs::path output_dir(const ScenarioConfig& cfg, const CommandOptions& opts) {
  return opts.out ? *opts.out : fs::path(cfg.output_dir);
}

SynthesisResult synthesize(const ScenarioConfig& cfg, int workers) {
  auto opts = make_solver_options(cfg);
  opts.workers = workers;
  return solve_sop(make_instance(cfg), cfg.cover, opts);
}

RunReport simulate(const ScenarioConfig& cfg, const Tube& tube) {
  if (tube.n != cfg.dimension) throw ConfigError("tube dimension does not match the config");
  if (std::abs(tube.tf - cfg.tf) > 1e-9) throw ConfigError("tube t_f does not match the config");
  const auto dyn = make_dynamics(cfg);
  const Barrier barrier{tube, cfg.simulation.kappa};
  const auto x0 = initial_state(cfg, *dyn, tube);
  return run_closed_loop(*dyn, barrier, x0, scenario_formula(cfg), make_sim_options(cfg));
}

VerifyReport verify_trace(const ScenarioConfig& cfg, const TraceLog& log) {
  const auto dyn = make_dynamics(cfg);
  if (log.n != dyn->state_dim())
    throw ConfigError("log has " + std::to_string(log.n) + " state columns, config expects " +
                      std::to_string(dyn->state_dim()));
  if (log.m != dyn->input_dim())
    throw ConfigError("log has " + std::to_string(log.m) + " input columns, config expects " +
                      std::to_string(dyn->input_dim()));
  if (std::abs(log.t.front()) > 1e-9 || std::abs(log.t.back() - cfg.tf) > 1e-9)
    throw ConfigError("log spans [" + fmt_short(log.t.front()) + ", " + fmt_short(log.t.back()) +
                      "], config t_f is " + fmt_short(cfg.tf));

  std::vector<double> ys;
  ys.reserve(log.t.size() * cfg.dimension);
  for (const auto& row : log.x) {
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    const Eigen::VectorXd y = dyn->output(x);
    ys.insert(ys.end(), y.data(), y.data() + y.size());
  }
  const Signal sig(log.t, std::move(ys), dyn->output_dim());
  RobustnessOptions ro;
  ro.until = cfg.until;
  const auto r = robustness(scenario_formula(cfg), sig, 0.0, ro);
  return {r.value, r.satisfied, log.t.size()};
}

BenchRecord bench_task(const ScenarioConfig& cfg, int workers) {
  BenchRecord rec;
  rec.task = cfg.name;
  auto t0 = std::chrono::steady_clock::now();
  const auto res = synthesize(cfg, workers);
  rec.synthesis_s = seconds_since(t0);
  rec.eta_star = res.eta_star;
  rec.certified = res.certificate_ok;
  t0 = std::chrono::steady_clock::now();
  const auto rep = simulate(cfg, res.tube);
  rec.simulation_s = seconds_since(t0);
  rec.final_robustness = rep.final_robustness;
  return rec;
}

void write_bench_table(std::ostream& os, const std::vector<BenchRecord>& rows) {
  os << "task,synthesis_s,simulation_s,eta_star,certified,final_robustness\n";
  for (const auto& r : rows)
    os << r.task << ',' << fmt_short(r.synthesis_s) << ',' << fmt_short(r.simulation_s) << ','
       << fmt_short(r.eta_star) << ',' << (r.certified ? "yes" : "no") << ','
       << fmt_short(r.final_robustness) << '\n';
}

void write_tube_csv(std::ostream& os, const Tube& tube, int intervals) {
  os << "t";
  for (std::size_t i = 1; i <= tube.n; ++i) os << ",c_" << i;
  os << ",r\n";
  for (int k = 0; k <= intervals; ++k) {
    const double t = k == intervals ? tube.tf : tube.tf * k / intervals;
    const auto c = eval_center(tube, t);
    os << fmt(t);
    for (Eigen::Index i = 0; i < c.size(); ++i) os << ',' << fmt(c[i]);
    os << ',' << fmt(eval_radius(tube, t)) << '\n';
  }
}

int cmd_check(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_scenario(config);
    const auto f = scenario_formula(cfg);
    validate(cfg);
    out << "task: " << cfg.name << (cfg.canonical ? "" : " (placeholder geometry)") << "\n";
    out << "formula: " << to_string(f) << "\n";
    out << "predicates:";
    for (const auto& name : predicate_names(f)) out << ' ' << name;
    out << "\n";
    out << "horizon: " << fmt_short(horizon(f)) << "\n";
    out << "t_f: " << fmt_short(cfg.tf) << "\n";
    out << "L_rho: " << fmt_short(robustness_lipschitz(f)) << "\n";
    out << "ok\n";
    return exit_code::ok;
  });
}

int cmd_synthesize(const fs::path& config, const CommandOptions& opts, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = apply_overrides(load_valid(config), opts);
    const auto dir = output_dir(cfg, opts);
    const auto res = synthesize(cfg, opts.workers.value_or(1));

    write_text(dir / "result.json", result_to_json(res).dump(2) + "\n");
    const json timings = {{"wall_time_s", res.diagnostics.wall_time_s},
                          {"certify_time_s", res.diagnostics.certify_time_s}};
    write_text(dir / "timings.json", timings.dump(2) + "\n");
    if (opts.emit_plot_data) write_with(dir / "tube.csv", [&](std::ostream& os) { write_tube_csv(os, res.tube); });

    out << "eta*: " << fmt_short(res.eta_star) << "\n";
    out << "L: " << fmt_short(res.lipschitz.combined) << "  eps: " << fmt_short(res.epsilon)
        << "  eta* + L eps: " << fmt_short(res.margin()) << "\n";
    out << "certificate: " << (res.certificate_ok ? "ok" : "FAILED")
        << (res.diagnostics.certificate_budget_limited ? " (eps limited by sample budget)" : "") << "\n";
    out << "evaluations: " << res.diagnostics.evaluations << "  time: " << fmt_short(res.diagnostics.wall_time_s)
        << " s\n";
    out << "wrote " << (dir / "result.json").string() << "\n";
    return res.certificate_ok ? exit_code::ok : exit_code::infeasible;
  });
}

int cmd_simulate(const fs::path& config, const std::optional<fs::path>& tube_file,
                 const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = apply_overrides(load_valid(config), opts);
    const auto dir = output_dir(cfg, opts);
    const fs::path src = tube_file ? *tube_file : dir / "result.json";
    std::ifstream in(src);
    if (!in) throw ConfigError("cannot open tube file '" + src.string() + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("tube file '" + src.string() + "' is not valid JSON: " + e.what());
    }
    const auto res = result_from_json(j);
    const auto rep = simulate(cfg, res.tube);

    write_with(dir / "trajectory.csv", [&](std::ostream& os) { write_trace_csv(os, rep); });
    const json summary = {{"min_b", rep.min_b},
                          {"tube_violations", rep.tube_violations},
                          {"final_robustness", rep.final_robustness},
                          {"satisfied", rep.satisfied},
                          {"steps", rep.trace.size()},
                          {"wall_time_s", rep.wall_time_s}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    if (opts.emit_plot_data) write_with(dir / "tube.csv", [&](std::ostream& os) { write_tube_csv(os, res.tube); });

    out << "steps: " << rep.trace.size() << "  min b: " << fmt_short(rep.min_b)
        << "  tube violations: " << rep.tube_violations << "\n";
    out << "robustness: " << fmt_short(rep.final_robustness) << "  satisfied: " << (rep.satisfied ? "yes" : "no")
        << "\n";
    out << "wrote " << (dir / "trajectory.csv").string() << "\n";
    return rep.satisfied ? exit_code::ok : exit_code::infeasible;
  });
}

int cmd_verify(const fs::path& config, const fs::path& log, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_valid(config);
    std::ifstream in(log);
    if (!in) throw ConfigError("cannot open log '" + log.string() + "'");
    TraceLog tl;
    try {
      tl = read_trace_csv(in);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    const auto v = verify_trace(cfg, tl);
    out << "samples: " << v.samples << "\n";
    out << "robustness: " << fmt(v.robustness) << "\n";
    out << "satisfied: " << (v.satisfied ? "yes" : "no") << "\n";
    return v.satisfied ? exit_code::ok : exit_code::infeasible;
  });
}

int cmd_bench(const std::vector<fs::path>& configs, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    if (configs.empty()) throw ConfigError("bench needs at least one config");
    std::vector<ScenarioConfig> cfgs;
    for (const auto& c : configs) cfgs.push_back(apply_overrides(load_valid(c), opts));
    std::vector<BenchRecord> rows;
    bool all = true;
    for (const auto& cfg : cfgs) {
      rows.push_back(bench_task(cfg, opts.workers.value_or(1)));
      all = all && rows.back().certified && rows.back().final_robustness > 0.0;
    }
    write_bench_table(out, rows);
    if (opts.out) write_with(*opts.out / "bench.csv", [&](std::ostream& os) { write_bench_table(os, rows); });
    return all ? exit_code::ok : exit_code::infeasible;
  });
}

}  // namespace sttcbf
