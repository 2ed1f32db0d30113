#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the library's evaluation code; only the data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sttcbf/formula.hpp"

namespace oracle {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Trace {
  std::vector<double> t;
  std::vector<std::vector<double>> x;

  std::vector<double> at(double s) const {
    if (s <= t.front()) return x.front();
    if (s >= t.back()) return x.back();
    std::size_t i = 0;
    while (t[i + 1] < s) ++i;
    if (t[i + 1] == s) return x[i + 1];
    const double w = (s - t[i]) / (t[i + 1] - t[i]);
    std::vector<double> v(x[i].size());
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = (1.0 - w) * x[i][d] + w * x[i + 1][d];
    return v;
  }

  // Both ends plus every sample strictly inside, by linear scan.
  std::vector<double> window(double a, double b) const {
    std::vector<double> w{a};
    for (double s : t)
      if (s > a && s < b) w.push_back(s);
    if (b > a) w.push_back(b);
    return w;
  }
};

inline double pred_value(const sttcbf::Predicate& p, const std::vector<double>& x) {
  using K = sttcbf::Predicate::Kind;
  if (p.kind == K::AffineHalfspace) {
    double v = p.b;
    for (std::size_t i = 0; i < x.size(); ++i) v += p.w[i] * x[i];
    return v;
  }
  if (p.kind == K::BoxInfNorm) {
    double v = kInf;
    for (std::size_t i = 0; i < x.size(); ++i)
      v = std::min(v, p.halfwidth[i] - std::abs(x[i] - p.center[i]));
    return v;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - p.center[i]) * (x[i] - p.center[i]);
  return p.radius - std::sqrt(s);
}

/// Plain recursive min/max, no sharing of subresults.
inline double robustness(const sttcbf::Formula& f, const Trace& x, double t, bool paper_until) {
  using sttcbf::Op;
  switch (f.op) {
    case Op::True: return kInf;
    case Op::Pred: return pred_value(*f.pred, x.at(t));
    case Op::Not: return -robustness(*f.lhs, x, t, paper_until);
    case Op::And:
      return std::min(robustness(*f.lhs, x, t, paper_until), robustness(*f.rhs, x, t, paper_until));
    case Op::Or:
      return std::max(robustness(*f.lhs, x, t, paper_until), robustness(*f.rhs, x, t, paper_until));
    case Op::Eventually: {
      double v = -kInf;
      for (double s : x.window(t + f.lo, t + f.hi))
        v = std::max(v, robustness(*f.lhs, x, s, paper_until));
      return v;
    }
    case Op::Always: {
      double v = kInf;
      for (double s : x.window(t + f.lo, t + f.hi))
        v = std::min(v, robustness(*f.lhs, x, s, paper_until));
      return v;
    }
    case Op::Until: {
      const auto& point = paper_until ? *f.lhs : *f.rhs;
      const auto& held = paper_until ? *f.rhs : *f.lhs;
      const auto w = x.window(t + f.lo, t + f.hi);
      double best = -kInf;
      for (double t1 : w) {
        double inner = robustness(point, x, t1, paper_until);
        for (double t2 : w) {
          if (t2 > t1) break;
          inner = std::min(inner, robustness(held, x, t2, paper_until));
        }
        best = std::max(best, inner);
      }
      return best;
    }
  }
  return 0.0;
}

inline sttcbf::Predicate random_predicate(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.5);
  std::vector<double> c(n);
  for (auto& v : c) v = u(rng);
  switch (rng() % 3) {
    case 0: {
      std::vector<double> w(n);
      for (auto& v : w) v = u(rng);
      return sttcbf::Predicate::affine(w, u(rng));
    }
    case 1: {
      std::vector<double> hw(n);
      for (auto& v : hw) v = pos(rng);
      return sttcbf::Predicate::box(c, hw);
    }
    default:
      return sttcbf::Predicate::ball(c, pos(rng));
  }
}

/// Random bound formula of depth <= `depth` whose horizon is at most `budget`.
inline sttcbf::FormulaPtr random_formula(std::mt19937_64& rng, int depth, double budget,
                                         std::size_t n) {
  using namespace sttcbf;
  if (depth == 0 || rng() % 5 == 0) {
    if (rng() % 12 == 0) return make_true();
    return make_pred("p", random_predicate(rng, n));
  }
  auto interval = [&](double& lo, double& hi) {
    std::uniform_real_distribution<double> u(0.0, budget / depth);
    lo = u(rng);
    hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (rng() % 6 == 0) lo = hi;  // point interval
  };
  double lo = 0.0, hi = 0.0;
  switch (rng() % 7) {
    case 0: return make_not(random_formula(rng, depth - 1, budget, n));
    case 1:
      return make_and(random_formula(rng, depth - 1, budget, n),
                      random_formula(rng, depth - 1, budget, n));
    case 2:
      return make_or(random_formula(rng, depth - 1, budget, n),
                     random_formula(rng, depth - 1, budget, n));
    case 3:
      interval(lo, hi);
      return make_eventually(lo, hi, random_formula(rng, depth - 1, budget - hi, n));
    case 4:
      interval(lo, hi);
      return make_always(lo, hi, random_formula(rng, depth - 1, budget - hi, n));
    default:
      interval(lo, hi);
      return make_until(lo, hi, random_formula(rng, depth - 1, budget - hi, n),
                        random_formula(rng, depth - 1, budget - hi, n));
  }
}

/// Strictly increasing times starting at 0 and ending at `tf`.
inline Trace random_trace(std::mt19937_64& rng, std::size_t len, double tf, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Trace x;
  std::vector<double> gaps(len - 1);
  double total = 0.0;
  for (auto& v : gaps) total += (v = 0.1 + u(rng));
  x.t.push_back(0.0);
  for (std::size_t i = 0; i + 1 < len; ++i) x.t.push_back(x.t.back() + gaps[i] * tf / total);
  x.t.back() = tf;
  std::vector<double> p(n);
  for (auto& v : p) v = g(rng);
  for (std::size_t i = 0; i < len; ++i) {
    x.x.push_back(p);
    for (auto& v : p) v += 0.5 * g(rng);
  }
  return x;
}

/// min (u - r)' K (u - r) s.t. a u + psi >= 0 by enumerating active sets and
/// solving each KKT system with a generic LU.
inline Eigen::VectorXd qp_kkt(const Eigen::MatrixXd& K, const Eigen::RowVectorXd& a, double psi,
                              const Eigen::VectorXd& r) {
  const auto m = K.rows();
  auto cost = [&](const Eigen::VectorXd& u) { return (u - r).dot(K * (u - r)); };
  Eigen::VectorXd best;
  double best_cost = kInf;
  if (a.dot(r) + psi >= 0.0) {
    best = r;
    best_cost = 0.0;
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + 1, m + 1);
  M.topLeftCorner(m, m) = 2.0 * K;
  M.block(0, m, m, 1) = -a.transpose();
  M.block(m, 0, 1, m) = a;
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = 2.0 * K * r;
  rhs(m) = -psi;
  const Eigen::VectorXd sol = M.fullPivLu().solve(rhs);
  const Eigen::VectorXd u = sol.head(m);
  if (sol(m) >= 0.0 && cost(u) < best_cost) best = u;
  return best;
}

/// Central difference of a scalar function of a vector.
template <class F>
Eigen::VectorXd gradient_fd(F&& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd p = x, q = x;
    p(i) += h;
    q(i) -= h;
    g(i) = (f(p) - f(q)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
