#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sttcbf/basis.hpp"

namespace sttcbf {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Spatiotemporal tube: the time-varying ball B(c(t), r(t)) with the center
/// and radius expanded over polynomial bases.
struct Tube {
  std::size_t n = 2;
  double tf = 1.0;
  BasisSet center_basis;
  BasisSet radius_basis;
  std::vector<double> qc;  // n rows of center_basis.count() coefficients
  std::vector<double> qr;  // radius_basis.count() coefficients

  Tube() = default;
  Tube(std::size_t n, BasisSet center, BasisSet radius, std::vector<double> qc,
       std::vector<double> qr);

  std::span<const double> center_coeffs(std::size_t i) const {
    const auto z = static_cast<std::size_t>(center_basis.count());
    return std::span<const double>(qc).subspan(i * z, z);
  }

  bool operator==(const Tube&) const = default;
};

Eigen::VectorXd eval_center(const Tube& tube, double t);
Eigen::VectorXd eval_center_dot(const Tube& tube, double t);
double eval_radius(const Tube& tube, double t);
double eval_radius_dot(const Tube& tube, double t);

/// Unit vector for n-1 spherical angles: s1 = cos th1,
/// s_k = sin th1 ... sin th_{k-1} cos th_k, s_n = sin th1 ... sin th_{n-1}.
Eigen::VectorXd sphere_map(std::span<const double> theta);

/// c(tau) + lambda r(tau) s(theta)
Eigen::VectorXd boundary_point(const Tube& tube, std::span<const double> theta, double lambda,
                               double tau);

struct TubeLipschitz {
  double center = 0.0;      // bound on ||c'(t)||
  double radius = 0.0;      // bound on |r'(t)|
  double radius_max = 0.0;  // bound on r(t)
};

/// Certified bounds over [0, t_f]. Each quantity is maximized on a uniform
/// grid of spacing h and padded using derivative bounds taken from Bernstein
/// control points: |r'| and r by M h^2 / 8 with M bounding their second
/// derivative, ||c'|| by h/2 times a bound on ||c''||.
TubeLipschitz tube_lipschitz(const Tube& tube, int grid_intervals = 1000);

nlohmann::json tube_to_json(const Tube& tube);
Tube tube_from_json(const nlohmann::json& j);

}  // namespace sttcbf
