#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sttcbf/basis.hpp"
#include "sttcbf/cover.hpp"
#include "sttcbf/formula.hpp"
#include "sttcbf/simulate.hpp"
#include "sttcbf/solver.hpp"

namespace sttcbf {

/// Malformed or inconsistent scenario input.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TubeSettings {
  BasisKind center_basis = BasisKind::Bernstein;
  BasisKind radius_basis = BasisKind::Bernstein;
  int center_terms = 5;
  int radius_terms = 4;
  double radius_max = 3.0;
  std::optional<std::vector<double>> start;  // pins c(0)
  std::optional<std::vector<double>> coeff_lo;
  std::optional<std::vector<double>> coeff_hi;
  bool operator==(const TubeSettings&) const = default;
};

struct SolverSettings {
  std::uint64_t seed = 1;
  double bisection_lo = -2.0;
  double bisection_hi = 2.0;
  double tolerance = 1e-3;
  std::size_t max_evaluations = 4000;
  int restarts = 3;
  std::vector<Waypoint> waypoints;
  std::optional<std::vector<double>> initial_q;
  bool operator==(const SolverSettings&) const = default;
};

struct CertificateSettings {
  CertificateMode mode = CertificateMode::Adaptive;
  double margin = 0.05;
  double epsilon = 0.0;
  std::size_t max_samples = 20'000'000;
  bool operator==(const CertificateSettings&) const = default;
};

struct DynamicsSettings {
  std::string model = "omni";
  double lookahead = 0.1;
  bool operator==(const DynamicsSettings&) const = default;
};

struct SimulationSettings {
  double dt = 0.05;
  double kappa = 5.0;
  std::vector<double> k_diag;  // empty means identity
  std::optional<std::vector<double>> x0;  // full state
  std::optional<std::vector<double>> y0;  // initial output point, mapped with the heading
  std::uint64_t seed = 1;
  std::optional<double> heading;  // differential drive; unset aligns with c'(0)
  std::optional<double> tracking_gain;
  std::optional<std::vector<double>> u_lo;
  std::optional<std::vector<double>> u_hi;
  bool operator==(const SimulationSettings&) const = default;
};

/// Everything needed to synthesize, simulate and verify one task.
struct ScenarioConfig {
  std::string name;
  std::string description;
  bool canonical = true;  // false when region geometry is a placeholder
  std::size_t dimension = 2;
  double tf = 1.0;
  std::vector<std::pair<double, double>> state_bounds;
  PredicateTable predicates;
  std::string formula;
  UntilConvention until = UntilConvention::Paper;
  double r_d = 0.25;
  TubeSettings tube;
  CoverSpec cover;
  CertificateSettings certificate;
  SolverSettings solver;
  DynamicsSettings dynamics;
  SimulationSettings simulation;
  std::string output_dir = "out";

  bool operator==(const ScenarioConfig&) const = default;
};

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Throws ConfigError with the offending key on bad structure.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Parsed, bound formula. Throws ParseError, IntervalError or SemanticError.
FormulaPtr scenario_formula(const ScenarioConfig& cfg);

/// Cross-field checks: predicate and tube dimensions, dynamics output
/// dimension, formula horizon within t_f. Throws ConfigError or the
/// formula errors above.
void validate(const ScenarioConfig& cfg);

SopInstance make_instance(const ScenarioConfig& cfg);
SolverOptions make_solver_options(const ScenarioConfig& cfg);
std::unique_ptr<Dynamics> make_dynamics(const ScenarioConfig& cfg);
SimOptions make_sim_options(const ScenarioConfig& cfg);

/// Configured x0 or y0, or a seeded draw from the inner half of the initial ball.
Eigen::VectorXd initial_state(const ScenarioConfig& cfg, const Dynamics& dyn, const Tube& tube);

/// Result record without timings, so equal inputs give equal bytes.
nlohmann::json result_to_json(const SynthesisResult& r);
SynthesisResult result_from_json(const nlohmann::json& j);

}  // namespace sttcbf
