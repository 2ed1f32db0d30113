#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sttcbf/scenario.hpp"

namespace sttcbf {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 2;
inline constexpr int infeasible = 3;  // uncertified tube or violated task
inline constexpr int runtime_failure = 4;
}  // namespace exit_code

struct CommandOptions {
  std::optional<std::uint64_t> seed;  // overrides solver and simulation seeds
  std::optional<int> workers;
  std::optional<std::filesystem::path> out;
  bool emit_plot_data = false;
};

/// Apply --seed and pick the output directory.
ScenarioConfig apply_overrides(ScenarioConfig cfg, const CommandOptions& opts);
std::filesystem::path output_dir(const ScenarioConfig& cfg, const CommandOptions& opts);

SynthesisResult synthesize(const ScenarioConfig& cfg, int workers = 1);
RunReport simulate(const ScenarioConfig& cfg, const Tube& tube);

struct VerifyReport {
  double robustness = 0.0;
  bool satisfied = false;
  std::size_t samples = 0;
};

/// Recomputes robustness from the raw logged states alone. Throws
/// ConfigError on dimension or horizon mismatch with the config.
VerifyReport verify_trace(const ScenarioConfig& cfg, const TraceLog& log);

struct BenchRecord {
  std::string task;
  double synthesis_s = 0.0;
  double simulation_s = 0.0;
  double eta_star = 0.0;
  bool certified = false;
  double final_robustness = 0.0;
};

BenchRecord bench_task(const ScenarioConfig& cfg, int workers = 1);
void write_bench_table(std::ostream& os, const std::vector<BenchRecord>& rows);

/// c(t), r(t) on an even grid, one row per time.
void write_tube_csv(std::ostream& os, const Tube& tube, int intervals = 500);

int cmd_check(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_synthesize(const std::filesystem::path& config, const CommandOptions& opts,
                   std::ostream& out, std::ostream& err);
/// Tube from `tube_file`, or from result.json in the output directory.
int cmd_simulate(const std::filesystem::path& config,
                 const std::optional<std::filesystem::path>& tube_file, const CommandOptions& opts,
                 std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& log,
               std::ostream& out, std::ostream& err);
int cmd_bench(const std::vector<std::filesystem::path>& configs, const CommandOptions& opts,
              std::ostream& out, std::ostream& err);

}  // namespace sttcbf
