#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

namespace sttcbf {

/// Control-affine system xdot = f(t, x) + g(t, x) u. The barrier acts on an
/// output y = h(x) whose dynamics are again control affine,
/// ydot = f_y(t, x) + g_y(t, x) u. For most models y = x.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual std::string name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual Eigen::VectorXd f(double t, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd g(double t, const Eigen::VectorXd& x) const = 0;

  virtual std::size_t output_dim() const { return state_dim(); }
  virtual Eigen::VectorXd output(const Eigen::VectorXd& x) const { return x; }
  virtual Eigen::VectorXd output_drift(double t, const Eigen::VectorXd& x) const { return f(t, x); }
  virtual Eigen::MatrixXd output_gain(double t, const Eigen::VectorXd& x) const { return g(t, x); }

  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
    return f(t, x) + g(t, x) * u;
  }
};

/// Single integrator, xdot = u, in 2 or 3 dimensions.
class OmniRobot final : public Dynamics {
 public:
  explicit OmniRobot(std::size_t n = 2);
  std::string name() const override { return "omni"; }
  std::size_t state_dim() const override { return n_; }
  std::size_t input_dim() const override { return n_; }
  Eigen::VectorXd f(double, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd g(double, const Eigen::VectorXd&) const override;

 private:
  std::size_t n_;
};

/// Unicycle (px, py, phi) with inputs (v, omega). The controlled output is
/// the look-ahead point p + l (cos phi, sin phi), for which
/// ydot = A(phi) u with A = [[cos, -l sin], [sin, l cos]] and det A = l.
class DiffDrive final : public Dynamics {
 public:
  explicit DiffDrive(double lookahead = 0.1);
  std::string name() const override { return "diffdrive"; }
  std::size_t state_dim() const override { return 3; }
  std::size_t input_dim() const override { return 2; }
  std::size_t output_dim() const override { return 2; }
  Eigen::VectorXd f(double, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd g(double, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd output(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd output_drift(double, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd output_gain(double, const Eigen::VectorXd& x) const override;

  double lookahead() const { return l_; }
  /// State whose look-ahead point is y with heading phi.
  Eigen::VectorXd state_for_output(const Eigen::VectorXd& y, double phi) const;

 private:
  double l_;
};

/// Kinematic position model of a quadrotor: 3-D single integrator.
class Quadrotor3D final : public Dynamics {
 public:
  std::string name() const override { return "quadrotor"; }
  std::size_t state_dim() const override { return 3; }
  std::size_t input_dim() const override { return 3; }
  Eigen::VectorXd f(double, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd g(double, const Eigen::VectorXd&) const override;
};

/// Dynamics given by callables, mostly for tests.
class FunctionDynamics final : public Dynamics {
 public:
  using Drift = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
  using Gain = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;
  FunctionDynamics(std::size_t n, std::size_t m, Drift f, Gain g)
      : n_(n), m_(m), f_(std::move(f)), g_(std::move(g)) {}
  std::string name() const override { return "function"; }
  std::size_t state_dim() const override { return n_; }
  std::size_t input_dim() const override { return m_; }
  Eigen::VectorXd f(double t, const Eigen::VectorXd& x) const override { return f_(t, x); }
  Eigen::MatrixXd g(double t, const Eigen::VectorXd& x) const override { return g_(t, x); }

 private:
  std::size_t n_, m_;
  Drift f_;
  Gain g_;
};

std::unique_ptr<Dynamics> make_dynamics(const std::string& model, std::size_t n, double lookahead);

}  // namespace sttcbf
