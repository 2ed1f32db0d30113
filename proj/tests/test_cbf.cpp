#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sttcbf/barrier.hpp"

using namespace sttcbf;

namespace {

Barrier moving_barrier(std::mt19937_64& rng, std::size_t n = 2) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const int zc = 5, zr = 4;
  std::vector<double> qc(n * zc), qr(zr);
  for (auto& v : qc) v = u(rng);
  for (auto& v : qr) v = 1.5 + 0.3 * u(rng);
  return {Tube(n, BasisSet(BasisKind::Bernstein, zc, 4.0), BasisSet(BasisKind::Bernstein, zr, 4.0),
               qc, qr),
          5.0};
}

Barrier static_barrier(Eigen::Vector2d c, double r) {
  return {Tube(2, BasisSet(BasisKind::Monomial, 1, 5.0), BasisSet(BasisKind::Monomial, 1, 5.0),
               {c(0), c(1)}, {r}),
          5.0};
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(rng);
  return A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(m, m);
}

}  // namespace

TEST_CASE("barrier values") {
  auto b = static_barrier({1.0, 2.0}, 2.0);
  CHECK(eval_barrier(b, 1.0, Eigen::Vector2d(1.0, 2.0)) == 1.0);
  CHECK(eval_barrier(b, 1.0, Eigen::Vector2d(3.0, 2.0)) == 0.0);
  CHECK(eval_barrier(b, 1.0, Eigen::Vector2d(1.0, 6.0)) == -3.0);
  CHECK_THROWS_AS(eval_barrier(b, 6.0, Eigen::Vector2d(1.0, 2.0)), DomainError);
}

TEST_CASE("barrier gradient examples") {
  std::mt19937_64 rng(1);
  auto b = moving_barrier(rng);
  const Eigen::VectorXd c = eval_center(b.tube, 1.3);
  auto g = barrier_gradients(b, 1.3, c);
  CHECK(g.dx.norm() == 0.0);
  CHECK(g.dt == 0.0);

  auto s = static_barrier({0.0, 0.0}, 1.0);
  CHECK(barrier_gradients(s, 2.0, Eigen::Vector2d(0.3, -0.2)).dt == 0.0);
}

TEST_CASE("property: gradients match central differences") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-6;
  for (int k = 0; k < 500; ++k) {
    auto b = moving_barrier(rng, 2 + k % 2);
    const double t = h + (4.0 - 2 * h) * u(rng);
    Eigen::VectorXd x = eval_center(b.tube, t);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 3.0 * (u(rng) - 0.5);
    const auto g = barrier_gradients(b, t, x);
    const auto fx = oracle::gradient_fd([&](const Eigen::VectorXd& y) { return eval_barrier(b, t, y); }, x, h);
    const double ft = (eval_barrier(b, t + h, x) - eval_barrier(b, t - h, x)) / (2 * h);
    CHECK((fx - g.dx).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(std::abs(ft - g.dt) <= 1e-5);
  }
}

TEST_CASE("property: level set equals the tube ball") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    auto b = moving_barrier(rng);
    const double t = 4.0 * u(rng);
    Eigen::VectorXd x = eval_center(b.tube, t);
    x += Eigen::Vector2d(6 * u(rng) - 3, 6 * u(rng) - 3);
    const double dist = (x - eval_center(b.tube, t)).norm();
    const double r = eval_radius(b.tube, t);
    if (std::abs(dist - r) < 1e-9 * r) continue;  // rounding band
    CHECK((eval_barrier(b, t, x) >= 0.0) == (dist <= r));
  }
}

TEST_CASE("qp examples") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  auto free = solve_single_constraint_qp(I, Eigen::RowVector2d(0.4, -1.0), 0.3);
  CHECK(free.u == Eigen::Vector2d::Zero());
  CHECK_FALSE(free.active);
  auto act = solve_single_constraint_qp(I, Eigen::RowVector2d(1.0, 0.0), -1.0);
  CHECK(act.u == Eigen::Vector2d(1.0, 0.0));
  CHECK(act.active);
  CHECK_THROWS_AS(solve_single_constraint_qp(I, Eigen::RowVector2d(0.0, 0.0), -0.5), InfeasibleStep);
  CHECK_NOTHROW(solve_single_constraint_qp(I, Eigen::RowVector2d(0.0, 0.0), 0.5));
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(solve_single_constraint_qp(bad, Eigen::RowVector2d(1.0, 0.0), -1.0),
                  std::invalid_argument);
}

TEST_CASE("property: qp matches KKT enumeration, equality when active, optimal") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int k = 0; k < 500; ++k) {
    const int m = 1 + k % 4;
    const Eigen::MatrixXd K = random_spd(rng, m);
    Eigen::RowVectorXd a(m);
    for (int i = 0; i < m; ++i) a(i) = g(rng);
    const double psi = 2.0 * g(rng);
    const auto s = solve_single_constraint_qp(K, a, psi);
    const auto want = oracle::qp_kkt(K, a, psi, Eigen::VectorXd::Zero(m));
    CHECK((s.u - want).cwiseAbs().maxCoeff() <= 1e-8);
    if (psi >= 0.0) CHECK(s.u.isZero(0.0));
    if (s.active) CHECK(std::abs(a.dot(s.u) + psi) <= 1e-9);
    const double best = s.u.dot(K * s.u);
    for (int j = 0; j < 20; ++j) {
      Eigen::VectorXd v = s.u;
      for (int i = 0; i < m; ++i) v(i) += 0.1 * g(rng);
      if (v.dot(K * v) < best) CHECK(a.dot(v) + psi < 0.0);
    }
  }
}

TEST_CASE("property: qp with a reference input matches KKT enumeration") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int k = 0; k < 300; ++k) {
    const int m = 1 + k % 3;
    const Eigen::MatrixXd K = random_spd(rng, m);
    Eigen::RowVectorXd a(m);
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) {
      a(i) = g(rng);
      r(i) = g(rng);
    }
    const double psi = g(rng);
    const auto s = solve_single_constraint_qp(K, a, psi, &r);
    CHECK((s.u - oracle::qp_kkt(K, a, psi, r)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("safety qp step satisfies the barrier inequality") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OmniRobot omni(2);
  DiffDrive dd(0.2);
  for (int k = 0; k < 300; ++k) {
    auto b = moving_barrier(rng);
    const double t = 4.0 * u(rng);
    Eigen::VectorXd y = eval_center(b.tube, t) + Eigen::Vector2d(4 * u(rng) - 2, 4 * u(rng) - 2);
    const bool use_dd = k % 2 == 1;
    const Dynamics& dyn = use_dd ? static_cast<const Dynamics&>(dd) : omni;
    const Eigen::VectorXd x = use_dd ? dd.state_for_output(y, 6.28 * u(rng)) : y;
    const auto K = random_spd(rng, 2);
    const auto s = solve_safety_qp(b, dyn, K, t, x);
    CHECK((s.y - y).norm() <= 1e-12);
    CHECK(s.lfb + s.lgb.dot(s.u_star) + s.dbdt + b.alpha(s.b) >= -1e-9);
  }
}

TEST_CASE("safety qp clamps and reports saturation") {
  auto b = static_barrier({0.0, 0.0}, 1.0);
  OmniRobot omni(2);
  SafetyQpOptions o;
  o.u_lo = Eigen::Vector2d(-0.1, -0.1);
  o.u_hi = Eigen::Vector2d(0.1, 0.1);
  const auto s = solve_safety_qp(b, omni, Eigen::MatrixXd::Identity(2, 2), 0.0,
                                 Eigen::Vector2d(1.5, 0.0), o);
  CHECK(s.constraint_active);
  CHECK(s.saturated);
  CHECK(s.u_star == Eigen::Vector2d(-0.1, 0.0));
}
