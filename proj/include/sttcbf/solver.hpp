#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sttcbf/certificate.hpp"
#include "sttcbf/cover.hpp"
#include "sttcbf/sop.hpp"

namespace sttcbf {

struct Waypoint {
  double t = 0.0;
  std::vector<double> point;
  bool operator==(const Waypoint&) const = default;
};

enum class CertificateMode {
  Adaptive,      // eps from the final L and the target margin, within the budget
  Fixed,         // eps given explicitly
  Optimization,  // certify on the optimization cover itself
};

struct SolverOptions {
  std::uint64_t seed = 1;
  double bisection_lo = -2.0;
  double bisection_hi = 2.0;
  double tolerance = 1e-3;
  std::size_t max_evaluations = 20000;
  int restarts = 3;
  int workers = 1;

  /// Warm-start override; otherwise a line through waypoints.
  std::optional<std::vector<double>> initial_q;
  /// Waypoints for the default warm start; extracted from the formula when empty.
  std::vector<Waypoint> waypoints;
  std::optional<std::vector<double>> start;

  CertificateMode certificate = CertificateMode::Adaptive;
  double certificate_epsilon = 0.0;  // Fixed mode
  double certificate_margin = 0.05;  // Adaptive: target L * eps
  std::size_t certificate_max_samples = 20'000'000;
};

struct SynthesisDiagnostics {
  std::size_t evaluations = 0;
  std::size_t bisection_steps = 0;
  double wall_time_s = 0.0;
  double certify_time_s = 0.0;
  ConstraintId worst;
  double eta_optimization = 0.0;  // objective on the optimization cover
  double epsilon_optimization = 0.0;
  std::size_t optimization_samples = 0;
  std::size_t certificate_samples = 0;
  bool certificate_budget_limited = false;
};

struct SynthesisResult {
  Tube tube;
  std::vector<double> q;
  double eta_star = 0.0;  // objective on the certification cover
  CertificateConstants lipschitz;
  double epsilon = 0.0;
  bool certificate_ok = false;
  SynthesisDiagnostics diagnostics;

  double margin() const { return eta_star + lipschitz.combined * epsilon; }
};

/// Centers of the regions an Eventually must reach, with target times.
/// Conjunctions and implication consequents are searched; a nested
/// F[a,b] G[c,d] phi yields two waypoints spanning the dwell.
std::vector<Waypoint> extract_waypoints(const FormulaPtr& formula);

/// Antecedent region center of a top-level implication, if any.
std::optional<std::vector<double>> extract_start(const FormulaPtr& formula);

/// Coefficients of a tube whose center follows the piecewise-linear path
/// through the waypoints (least squares within the coefficient box, waypoint
/// rows weighted up) and whose radius is constant 2 r_d.
std::vector<double> warm_start(const SopInstance& inst, const std::vector<double>& start,
                               std::vector<Waypoint> waypoints);

/// Minimax solve: multi-start pattern search with annealing restarts
/// minimizes the objective, bisection on eta refines the feasibility level,
/// then the result is certified on a cover sized from the final tube's
/// Lipschitz constant.
SynthesisResult solve_sop(const SopInstance& inst, const CoverSpec& cover,
                          const SolverOptions& opts = {});

/// Cover used for certification given the constants of the final tube.
ScenarioCover certification_cover(const SopInstance& inst, const ScenarioCover& optimization,
                                  double eta, double lipschitz, const SolverOptions& opts,
                                  bool* budget_limited = nullptr);

}  // namespace sttcbf
