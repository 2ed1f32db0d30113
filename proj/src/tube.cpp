#include "sttcbf/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sttcbf {

Tube::Tube(std::size_t n_, BasisSet center, BasisSet radius, std::vector<double> qc_,
           std::vector<double> qr_)
    : n(n_), tf(center.tf()), center_basis(center), radius_basis(radius), qc(std::move(qc_)),
      qr(std::move(qr_)) {
  if (n == 0) throw std::invalid_argument("tube: dimension must be positive");
  if (center.tf() != radius.tf()) throw std::invalid_argument("tube: bases disagree on t_f");
  if (qc.size() != n * static_cast<std::size_t>(center.count()))
    throw std::invalid_argument("tube: center coefficient count mismatch");
  if (qr.size() != static_cast<std::size_t>(radius.count()))
    throw std::invalid_argument("tube: radius coefficient count mismatch");
}

namespace {

double checked_time(const Tube& tube, double t) {
  constexpr double slack = 1e-9;
  if (!(t >= -slack) || !(t <= tube.tf + slack)) {
    std::ostringstream os;
    os << "time " << t << " outside tube domain [0, " << tube.tf << "]";
    throw DomainError(os.str());
  }
  return std::clamp(t, 0.0, tube.tf);
}

Eigen::VectorXd center_order(const Tube& tube, double t, int order) {
  t = checked_time(tube, t);
  const auto vals = tube.center_basis.eval(t, order);
  Eigen::VectorXd c(tube.n);
  for (std::size_t i = 0; i < tube.n; ++i) {
    const auto q = tube.center_coeffs(i);
    double v = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) v += q[k] * vals[k];
    c[i] = v;
  }
  return c;
}

}  // namespace

Eigen::VectorXd eval_center(const Tube& tube, double t) { return center_order(tube, t, 0); }
Eigen::VectorXd eval_center_dot(const Tube& tube, double t) { return center_order(tube, t, 1); }

double eval_radius(const Tube& tube, double t) {
  return tube.radius_basis.combine(tube.qr, checked_time(tube, t), 0);
}

double eval_radius_dot(const Tube& tube, double t) {
  return tube.radius_basis.combine(tube.qr, checked_time(tube, t), 1);
}

Eigen::VectorXd sphere_map(std::span<const double> theta) {
  const std::size_t n = theta.size() + 1;
  Eigen::VectorXd s(n);
  double prod = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    s[k] = prod * std::cos(theta[k]);
    prod *= std::sin(theta[k]);
  }
  s[n - 1] = prod;
  return s;
}

Eigen::VectorXd boundary_point(const Tube& tube, std::span<const double> theta, double lambda,
                               double tau) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  if (theta.size() + 1 != tube.n) throw DomainError("need n-1 sphere angles");
  return eval_center(tube, tau) + lambda * eval_radius(tube, tau) * sphere_map(theta);
}

TubeLipschitz tube_lipschitz(const Tube& tube, int grid_intervals) {
  const double h = tube.tf / grid_intervals;
  const double pad = h * h / 8.0;

  // ||c'|| is only Lipschitz (not C^2 where c' = 0), so it gets a first-order
  // pad from ||c''||. r' and r are smooth scalars: at an interior extremum the
  // next derivative bounds the gap quadratically.
  double c2 = 0.0;
  for (std::size_t i = 0; i < tube.n; ++i) {
    const double b = tube.center_basis.derivative_bound(tube.center_coeffs(i), 2);
    c2 += b * b;
  }
  c2 = std::sqrt(c2);
  const double r3 = tube.radius_basis.derivative_bound(tube.qr, 3);
  const double r2 = tube.radius_basis.derivative_bound(tube.qr, 2);

  double max_cdot = 0.0, max_rdot = 0.0, max_r = -std::numeric_limits<double>::infinity();
  for (int g = 0; g <= grid_intervals; ++g) {
    const double t = g == grid_intervals ? tube.tf : g * h;
    max_cdot = std::max(max_cdot, eval_center_dot(tube, t).norm());
    max_rdot = std::max(max_rdot, std::abs(eval_radius_dot(tube, t)));
    max_r = std::max(max_r, eval_radius(tube, t));
  }
  TubeLipschitz out;
  out.center = max_cdot + c2 * h / 2.0;
  out.radius = max_rdot + r3 * pad;
  out.radius_max = max_r + r2 * pad;
  return out;
}

nlohmann::json tube_to_json(const Tube& tube) {
  nlohmann::json j;
  j["n"] = tube.n;
  j["t_f"] = tube.tf;
  j["basis"] = to_string(tube.center_basis.kind());
  if (tube.radius_basis.kind() != tube.center_basis.kind())
    j["radius_basis"] = to_string(tube.radius_basis.kind());
  j["z_c"] = tube.center_basis.count();
  j["z_r"] = tube.radius_basis.count();
  j["q_c"] = tube.qc;
  j["q_r"] = tube.qr;
  return j;
}

Tube tube_from_json(const nlohmann::json& j) {
  const double tf = j.at("t_f").get<double>();
  const auto kind = basis_kind_from_string(j.at("basis").get<std::string>());
  const auto rkind = j.contains("radius_basis")
                         ? basis_kind_from_string(j.at("radius_basis").get<std::string>())
                         : kind;
  return Tube(j.at("n").get<std::size_t>(), BasisSet(kind, j.at("z_c").get<int>(), tf),
              BasisSet(rkind, j.at("z_r").get<int>(), tf), j.at("q_c").get<std::vector<double>>(),
              j.at("q_r").get<std::vector<double>>());
}

}  // namespace sttcbf
