#include "sttcbf/simulate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace sttcbf {

Eigen::VectorXd step_rk4(const Dynamics& dyn, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const Eigen::VectorXd k1 = dyn.rhs(t, x, u);
  const Eigen::VectorXd k2 = dyn.rhs(t + dt / 2, x + dt / 2 * k1, u);
  const Eigen::VectorXd k3 = dyn.rhs(t + dt / 2, x + dt / 2 * k2, u);
  const Eigen::VectorXd k4 = dyn.rhs(t + dt, x + dt * k3, u);
  Eigen::VectorXd next = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  if (!next.allFinite()) throw NumericalError("step_rk4: non-finite state");
  return next;
}

Eigen::VectorXd center_tracking_input(const Dynamics& dyn, const Tube& tube, double gain, double t,
                                      const Eigen::VectorXd& x) {
  const Eigen::VectorXd v =
      eval_center_dot(tube, t) + gain * (eval_center(tube, t) - dyn.output(x)) - dyn.output_drift(t, x);
  return dyn.output_gain(t, x).colPivHouseholderQr().solve(v);
}

RunReport run_closed_loop(const Dynamics& dyn, const Barrier& barrier, const Eigen::VectorXd& x0,
                          const FormulaPtr& formula, const SimOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (!(opts.dt > 0.0)) throw std::invalid_argument("run_closed_loop: dt must be positive");
  if (static_cast<std::size_t>(x0.size()) != dyn.state_dim())
    throw std::invalid_argument("run_closed_loop: x0 has wrong dimension");
  if (dyn.output_dim() != barrier.tube.n)
    throw std::invalid_argument("run_closed_loop: dynamics output and tube dimension differ");
  if (!x0.allFinite()) throw NumericalError("run_closed_loop: non-finite initial state");
  const double b0 = eval_barrier(barrier, 0.0, dyn.output(x0));
  if (b0 < 0.0) {
    std::ostringstream os;
    os << "initial state outside the tube: b(0, x0) = " << b0;
    throw DomainError(os.str());
  }

  const auto m = static_cast<Eigen::Index>(dyn.input_dim());
  const Eigen::MatrixXd K = opts.K.size() ? opts.K : Eigen::MatrixXd::Identity(m, m);
  const double tf = barrier.tube.tf;
  const auto steps = static_cast<std::size_t>(std::ceil(tf / opts.dt - 1e-9));

  RunReport rep;
  std::vector<double> times, ys, xs;
  times.reserve(steps + 1);
  rep.trace.reserve(steps + 1);
  rep.min_b = std::numeric_limits<double>::infinity();

  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = k == steps ? tf : static_cast<double>(k) * opts.dt;
    SafetyQpOptions qp = opts.qp;
    if (opts.tracking_gain) qp.u_ref = center_tracking_input(dyn, barrier.tube, *opts.tracking_gain, t, x);
    QPStep s = solve_safety_qp(barrier, dyn, K, t, x, qp);
    rep.min_b = std::min(rep.min_b, s.b);
    if (s.b < 0.0) ++rep.tube_violations;
    times.push_back(t);
    ys.insert(ys.end(), s.y.data(), s.y.data() + s.y.size());
    xs.insert(xs.end(), x.data(), x.data() + x.size());
    if (k < steps) {
      const double t_next = k + 1 == steps ? tf : static_cast<double>(k + 1) * opts.dt;
      x = step_rk4(dyn, t, x, s.u_star, t_next - t);
    }
    rep.trace.push_back(std::move(s));
  }

  rep.trajectory = Signal(times, std::move(ys), dyn.output_dim());
  rep.states = Signal(std::move(times), std::move(xs), dyn.state_dim());
  rep.final_robustness = robustness(formula, rep.trajectory, 0.0, opts.robustness).value;
  rep.satisfied = rep.final_robustness > 0.0;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Eigen::VectorXd sample_initial_state(const Dynamics& dyn, const Tube& tube, std::uint64_t seed,
                                     double phi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const auto n = static_cast<Eigen::Index>(tube.n);
  Eigen::VectorXd dir(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) dir[i] = normal(rng);
  } while (dir.norm() == 0.0);
  const double rad = 0.5 * eval_radius(tube, 0.0) * std::pow(unit(rng), 1.0 / static_cast<double>(n));
  const Eigen::VectorXd y = eval_center(tube, 0.0) + rad * dir.normalized();
  if (const auto* dd = dynamic_cast<const DiffDrive*>(&dyn)) return dd->state_for_output(y, phi);
  return y;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunReport& report) {
  const std::size_t n = report.states.dim();
  const std::size_t m = report.trace.empty() ? 0 : static_cast<std::size_t>(report.trace[0].u_star.size());
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",x_" << i;
  for (std::size_t i = 1; i <= m; ++i) os << ",u_" << i;
  os << ",b,psi,active\n";
  for (const auto& s : report.trace) {
    put(os, s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) os << ',', put(os, s.x[i]);
    for (Eigen::Index i = 0; i < s.u_star.size(); ++i) os << ',', put(os, s.u_star[i]);
    os << ',';
    put(os, s.b);
    os << ',';
    put(os, s.psi);
    os << ',' << (s.constraint_active ? 1 : 0) << '\n';
  }
}

TraceLog read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trajectory log: empty file");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  TraceLog log;
  for (const auto& c : cols) {
    if (c.rfind("x_", 0) == 0) ++log.n;
    if (c.rfind("u_", 0) == 0) ++log.m;
  }
  if (cols.size() != 1 + log.n + log.m + 3 || cols.front() != "t" || log.n == 0)
    throw std::runtime_error("trajectory log: unexpected header '" + line + "'");

  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) {
      char* end = nullptr;
      v.push_back(std::strtod(c.c_str(), &end));
      if (end == c.c_str() || *end != '\0')
        throw std::runtime_error("trajectory log: bad number on line " + std::to_string(row));
    }
    if (v.size() != cols.size())
      throw std::runtime_error("trajectory log: wrong column count on line " + std::to_string(row));
    log.t.push_back(v[0]);
    log.x.emplace_back(v.begin() + 1, v.begin() + 1 + static_cast<long>(log.n));
    log.u.emplace_back(v.begin() + 1 + static_cast<long>(log.n),
                       v.begin() + 1 + static_cast<long>(log.n + log.m));
    log.b.push_back(v[1 + log.n + log.m]);
    log.psi.push_back(v[2 + log.n + log.m]);
    log.active.push_back(v[3 + log.n + log.m] != 0.0);
  }
  if (log.t.empty()) throw std::runtime_error("trajectory log: no samples");
  return log;
}

}  // namespace sttcbf
