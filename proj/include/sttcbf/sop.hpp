#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sttcbf/cover.hpp"
#include "sttcbf/formula.hpp"
#include "sttcbf/robustness.hpp"
#include "sttcbf/tube.hpp"

namespace sttcbf {

/// Scenario optimization problem over tube coefficients q = [q_c, q_r]:
///   min eta  s.t.  r_d - r(tau_s) <= eta,  -rho(x_s) <= eta  for every sample.
struct SopInstance {
  FormulaPtr formula;  // predicates bound
  RobustnessOptions robustness;
  std::size_t n = 2;
  double tf = 1.0;
  BasisSet center_basis;
  BasisSet radius_basis;
  double r_d = 0.25;
  std::vector<std::pair<double, double>> state_bounds;
  std::vector<double> coeff_lo;  // box on q, length n * z_c + z_r
  std::vector<double> coeff_hi;

  std::size_t coefficient_count() const;
  void validate() const;
  Tube make_tube(std::span<const double> q) const;
};

/// Search box for q. Bernstein center control points may leave the state
/// bounds by half their width on each side (control points overshoot the
/// curve on sharp turns); radius control points lie in [0, radius_max].
/// Monomial coefficients of order k >= 1 get +-2 range / t_f^k.
void set_default_boxes(SopInstance& inst, double radius_max);

/// Pin c(0) = start. Works for both bases, since only the first basis
/// function is nonzero at t = 0 and it equals 1 there.
void pin_start(SopInstance& inst, std::span<const double> start);

struct ConstraintId {
  enum class Kind { Radius, Robustness };
  Kind kind = Kind::Radius;
  std::size_t index = 0;  // tau sample, or trajectory (direction * lambdas + lambda)
  bool operator==(const ConstraintId&) const = default;
};

struct SopValue {
  double eta = 0.0;
  ConstraintId worst;
};

/// Objective evaluator bound to one instance and one cover. Each
/// (theta_s, lambda_s) pair defines a trajectory sampled at every tau_s; on
/// a midpoint tau grid the trajectory is extended to [0, t_f] by holding the
/// nearest sample.
class SopProblem {
 public:
  SopProblem(SopInstance inst, ScenarioCover cover);

  const SopInstance& instance() const { return inst_; }
  const ScenarioCover& cover() const { return cover_; }
  std::size_t trajectory_count() const { return directions_.size() * lambdas_.size(); }
  std::size_t tau_count() const { return tau_.size(); }

  void set_workers(int workers) { workers_ = workers; }
  int workers() const { return workers_; }

  /// OpenMP reduction over trajectories. Result does not depend on the
  /// worker count: terms land in a per-trajectory buffer reduced serially.
  SopValue evaluate(std::span<const double> q) const;
  /// Serial reference for the same quantity.
  SopValue evaluate_serial(std::span<const double> q) const;

  Signal trajectory(std::span<const double> q, std::size_t j) const;

 private:
  struct Frame {
    std::vector<double> center;  // grid x n
    std::vector<double> radius;  // grid
  };
  Frame frame(std::span<const double> q) const;
  void fill_states(const Frame& fr, std::size_t j, std::vector<double>& states) const;
  double robustness_term(const Frame& fr, std::size_t j, std::vector<double>& states,
                         RobustnessPlan::Workspace& ws) const;
  SopValue reduce(const Frame& fr, std::span<const double> terms) const;

  SopInstance inst_;
  ScenarioCover cover_;
  std::vector<double> tau_;    // cover tau samples
  std::vector<double> grid_;   // signal time grid
  std::vector<int> tau_row_;   // grid row of each tau sample
  Interpolation interp_;
  std::vector<double> center_vals_;  // grid x z_c
  std::vector<double> radius_vals_;  // grid x z_r
  std::vector<std::vector<double>> directions_;
  std::vector<double> lambdas_;
  RobustnessPlan plan_;
  int workers_ = 1;
};

/// One-shot evaluation, building the problem on the fly.
SopValue sop_objective(const SopInstance& inst, const ScenarioCover& cover,
                       std::span<const double> q);

}  // namespace sttcbf
