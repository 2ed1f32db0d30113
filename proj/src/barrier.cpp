#include "sttcbf/barrier.hpp"

#include <cmath>
#include <sstream>

namespace sttcbf {

double eval_barrier(const Barrier& barrier, double t, const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x - eval_center(barrier.tube, t);
  const double r = eval_radius(barrier.tube, t);
  return 1.0 - d.squaredNorm() / (r * r);
}

BarrierGradient barrier_gradients(const Barrier& barrier, double t, const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x - eval_center(barrier.tube, t);
  const Eigen::VectorXd cdot = eval_center_dot(barrier.tube, t);
  const double r = eval_radius(barrier.tube, t);
  const double rdot = eval_radius_dot(barrier.tube, t);
  const double r2 = r * r;
  const double dd = d.squaredNorm();

  BarrierGradient g;
  g.value = 1.0 - dd / r2;
  g.dx = -2.0 * d / r2;
  g.dt = 2.0 * cdot.dot(d) / r2 + 2.0 * rdot * dd / (r2 * r);
  return g;
}

QpSolution solve_single_constraint_qp(const Eigen::MatrixXd& K, const Eigen::RowVectorXd& a,
                                      double psi, const Eigen::VectorXd* u_ref) {
  const auto m = K.rows();
  if (K.cols() != m || a.size() != m) throw std::invalid_argument("safety QP: dimension mismatch");
  QpSolution s;
  s.u = u_ref ? *u_ref : Eigen::VectorXd::Zero(m);
  const double slack = psi + (u_ref ? (a * *u_ref)(0) : 0.0);
  if (slack >= 0.0) return s;

  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("safety QP: K is not positive definite");
  const Eigen::VectorXd kinv_at = llt.solve(a.transpose());
  const double denom = a.dot(kinv_at);
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "safety QP infeasible: L_g b = 0 with psi = " << psi;
    throw InfeasibleStep(os.str());
  }
  s.u += kinv_at * (-slack / denom);
  s.active = true;
  return s;
}

QPStep solve_safety_qp(const Barrier& barrier, const Dynamics& dyn, const Eigen::MatrixXd& K,
                       double t, const Eigen::VectorXd& x, const SafetyQpOptions& opts) {
  QPStep step;
  step.t = t;
  step.x = x;
  step.y = dyn.output(x);
  const auto g = barrier_gradients(barrier, t, step.y);
  step.b = g.value;
  step.dbdx = g.dx;
  step.dbdt = g.dt;
  step.lfb = g.dx.dot(dyn.output_drift(t, x));
  step.lgb = g.dx.transpose() * dyn.output_gain(t, x);
  step.psi = step.lfb + step.dbdt + barrier.alpha(step.b);

  const auto sol = solve_single_constraint_qp(K, step.lgb, step.psi,
                                              opts.u_ref ? &*opts.u_ref : nullptr);
  step.u_star = sol.u;
  step.constraint_active = sol.active;
  if (opts.u_lo || opts.u_hi) {
    Eigen::VectorXd u = step.u_star;
    if (opts.u_lo) u = u.cwiseMax(*opts.u_lo);
    if (opts.u_hi) u = u.cwiseMin(*opts.u_hi);
    step.saturated = u != step.u_star;
    step.u_star = u;
  }
  return step;
}

}  // namespace sttcbf
