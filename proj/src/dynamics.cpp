#include "sttcbf/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace sttcbf {

OmniRobot::OmniRobot(std::size_t n) : n_(n) {
  if (n != 2 && n != 3) throw std::invalid_argument("omni robot: dimension must be 2 or 3");
}

Eigen::VectorXd OmniRobot::f(double, const Eigen::VectorXd& x) const {
  return Eigen::VectorXd::Zero(x.size());
}

Eigen::MatrixXd OmniRobot::g(double, const Eigen::VectorXd&) const {
  return Eigen::MatrixXd::Identity(n_, n_);
}

DiffDrive::DiffDrive(double lookahead) : l_(lookahead) {
  if (!(lookahead > 0.0)) throw std::invalid_argument("diff drive: look-ahead must be positive");
}

Eigen::VectorXd DiffDrive::f(double, const Eigen::VectorXd&) const { return Eigen::VectorXd::Zero(3); }

Eigen::MatrixXd DiffDrive::g(double, const Eigen::VectorXd& x) const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 2);
  G(0, 0) = std::cos(x[2]);
  G(1, 0) = std::sin(x[2]);
  G(2, 1) = 1.0;
  return G;
}

Eigen::VectorXd DiffDrive::output(const Eigen::VectorXd& x) const {
  return Eigen::Vector2d(x[0] + l_ * std::cos(x[2]), x[1] + l_ * std::sin(x[2]));
}

Eigen::VectorXd DiffDrive::output_drift(double, const Eigen::VectorXd&) const {
  return Eigen::VectorXd::Zero(2);
}

Eigen::MatrixXd DiffDrive::output_gain(double, const Eigen::VectorXd& x) const {
  const double c = std::cos(x[2]), s = std::sin(x[2]);
  Eigen::MatrixXd A(2, 2);
  A << c, -l_ * s, s, l_ * c;
  return A;
}

Eigen::VectorXd DiffDrive::state_for_output(const Eigen::VectorXd& y, double phi) const {
  return Eigen::Vector3d(y[0] - l_ * std::cos(phi), y[1] - l_ * std::sin(phi), phi);
}

Eigen::VectorXd Quadrotor3D::f(double, const Eigen::VectorXd&) const { return Eigen::VectorXd::Zero(3); }

Eigen::MatrixXd Quadrotor3D::g(double, const Eigen::VectorXd&) const {
  return Eigen::MatrixXd::Identity(3, 3);
}

std::unique_ptr<Dynamics> make_dynamics(const std::string& model, std::size_t n, double lookahead) {
  if (model == "omni") return std::make_unique<OmniRobot>(n);
  if (model == "diffdrive") return std::make_unique<DiffDrive>(lookahead);
  if (model == "quadrotor") return std::make_unique<Quadrotor3D>();
  throw std::invalid_argument("unknown dynamics model '" + model + "'");
}

}  // namespace sttcbf
