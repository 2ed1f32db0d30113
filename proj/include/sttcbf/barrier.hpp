#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "sttcbf/dynamics.hpp"
#include "sttcbf/tube.hpp"

namespace sttcbf {

/// Time-varying barrier b(t, x) = 1 - ||x - c(t)||^2 / r(t)^2 with linear
/// class-K gain alpha(s) = kappa s.
struct Barrier {
  Tube tube;
  double kappa = 5.0;

  double alpha(double b) const { return kappa * b; }
};

struct BarrierGradient {
  double value = 0.0;
  Eigen::VectorXd dx;  // db/dx
  double dt = 0.0;     // db/dt
};

double eval_barrier(const Barrier& barrier, double t, const Eigen::VectorXd& x);
BarrierGradient barrier_gradients(const Barrier& barrier, double t, const Eigen::VectorXd& x);

/// Raised when L_g b = 0 while the drift alone violates the constraint.
struct InfeasibleStep : std::runtime_error {
  explicit InfeasibleStep(const std::string& what) : std::runtime_error(what) {}
};

struct QpSolution {
  Eigen::VectorXd u;
  bool active = false;
};

/// min (u - u_ref)' K (u - u_ref)  s.t.  a u + psi >= 0, in closed form.
/// With u_ref = 0 (the default) and psi >= 0 the result is exactly zero.
QpSolution solve_single_constraint_qp(const Eigen::MatrixXd& K, const Eigen::RowVectorXd& a,
                                      double psi, const Eigen::VectorXd* u_ref = nullptr);

struct QPStep {
  double t = 0.0;
  Eigen::VectorXd x;  // full state
  Eigen::VectorXd y;  // barrier output
  double b = 0.0;
  Eigen::VectorXd dbdx;
  double dbdt = 0.0;
  double lfb = 0.0;
  Eigen::RowVectorXd lgb;
  double psi = 0.0;  // L_f b + db/dt + alpha(b)
  Eigen::VectorXd u_star;
  bool constraint_active = false;
  bool saturated = false;
};

struct SafetyQpOptions {
  std::optional<Eigen::VectorXd> u_ref;  // nominal input, zero when unset
  std::optional<Eigen::VectorXd> u_lo;   // optional clamp applied after solving
  std::optional<Eigen::VectorXd> u_hi;
};

/// One safety-filter step on the dynamics' output. K must be m x m
/// positive definite.
QPStep solve_safety_qp(const Barrier& barrier, const Dynamics& dyn, const Eigen::MatrixXd& K,
                       double t, const Eigen::VectorXd& x, const SafetyQpOptions& opts = {});

}  // namespace sttcbf
