#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sttcbf/barrier.hpp"
#include "sttcbf/dynamics.hpp"
#include "sttcbf/robustness.hpp"
#include "sttcbf/signal.hpp"

namespace sttcbf {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Classical RK4 with u held constant over [t, t + dt].
Eigen::VectorXd step_rk4(const Dynamics& dyn, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, double dt);

struct SimOptions {
  double dt = 0.05;
  Eigen::MatrixXd K;  // empty means identity
  SafetyQpOptions qp;
  RobustnessOptions robustness;
  /// When set, the QP cost becomes (u - u_ref)' K (u - u_ref) with u_ref
  /// steering the output along c'(t) + gain (c(t) - y). Unset keeps the
  /// plain minimum-norm cost.
  std::optional<double> tracking_gain;
};

/// Input whose output velocity best matches c'(t) + gain (c(t) - y).
Eigen::VectorXd center_tracking_input(const Dynamics& dyn, const Tube& tube, double gain, double t,
                                      const Eigen::VectorXd& x);

struct RunReport {
  Signal trajectory;  // barrier output y(t_k), the signal the formula is judged on
  Signal states;      // full state x(t_k)
  std::vector<QPStep> trace;
  double min_b = 0.0;
  std::size_t tube_violations = 0;  // steps with ||y - c|| > r
  double final_robustness = 0.0;
  bool satisfied = false;
  double wall_time_s = 0.0;
};

/// Closed loop over [0, t_f] of the barrier's tube: at every step solve the
/// safety QP, then integrate with RK4. The last step is shortened to land
/// on t_f exactly. Throws DomainError if b(0, y0) < 0.
RunReport run_closed_loop(const Dynamics& dyn, const Barrier& barrier, const Eigen::VectorXd& x0,
                          const FormulaPtr& formula, const SimOptions& opts = {});

/// Uniform draw from the ball of radius r(0)/2 about c(0), mapped to a full
/// state (heading `phi` for the differential drive).
Eigen::VectorXd sample_initial_state(const Dynamics& dyn, const Tube& tube, std::uint64_t seed,
                                     double phi = 0.0);

/// Trajectory log: header t,x_1..x_n,u_1..u_m,b,psi,active, one row per
/// step, values with 17 significant digits.
void write_trace_csv(std::ostream& os, const RunReport& report);

struct TraceLog {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> u;
  std::vector<double> b;
  std::vector<double> psi;
  std::vector<bool> active;
};

/// Throws std::runtime_error on a malformed log.
TraceLog read_trace_csv(std::istream& is);

}  // namespace sttcbf
