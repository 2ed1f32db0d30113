// Command-line front end: check | synthesize | simulate | verify | bench.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sttcbf/commands.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Tube synthesis and barrier-function control for STL tasks"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  bool plot = false;

  auto global = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "scenario config (JSON)");
    if (needs_config) c->required();
    sub->add_option("--seed", seed, "seed for solver and initial state");
    sub->add_option("--workers", workers, "threads for objective evaluation")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--emit-plot-data", plot, "also write c(t), r(t) samples");
  };

  auto* check = app.add_subcommand("check", "parse and validate a scenario");
  global(check, true);
  auto* synth = app.add_subcommand("synthesize", "solve for a certified tube");
  global(synth, true);
  auto* sim = app.add_subcommand("simulate", "closed-loop run inside a synthesized tube");
  global(sim, true);
  std::string tube_file;
  sim->add_option("--tube", tube_file, "result file (default <out>/result.json)");
  auto* verify = app.add_subcommand("verify", "recompute robustness of a trajectory log");
  global(verify, true);
  std::string log;
  verify->add_option("--log", log, "trajectory CSV")->required();
  auto* bench = app.add_subcommand("bench", "synthesize and simulate several scenarios");
  global(bench, false);
  std::vector<std::string> bench_configs;
  bench->add_option("configs", bench_configs, "scenario configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sttcbf::exit_code::input_error;
  }

  sttcbf::CommandOptions opts;
  auto* used = app.get_subcommands().front();
  if (used->count("--seed")) opts.seed = seed;
  opts.workers = workers;
  if (!out.empty()) opts.out = fs::path(out);
  opts.emit_plot_data = plot;

  if (check->parsed()) return sttcbf::cmd_check(config, std::cout, std::cerr);
  if (synth->parsed()) return sttcbf::cmd_synthesize(config, opts, std::cout, std::cerr);
  if (sim->parsed())
    return sttcbf::cmd_simulate(config, tube_file.empty() ? std::nullopt : std::optional<fs::path>(tube_file),
                                opts, std::cout, std::cerr);
  if (verify->parsed()) return sttcbf::cmd_verify(config, log, std::cout, std::cerr);

  std::vector<fs::path> paths(bench_configs.begin(), bench_configs.end());
  if (!config.empty()) paths.insert(paths.begin(), config);
  return sttcbf::cmd_bench(paths, opts, std::cout, std::cerr);
}
