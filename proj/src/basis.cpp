#include "sttcbf/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sttcbf {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// n! / (n - m)!
double falling(int n, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= n - i;
  return r;
}

double bernstein(int k, int d, double s) {
  if (k < 0 || k > d) return 0.0;
  return binom(d, k) * std::pow(s, k) * std::pow(1.0 - s, d - k);
}

}  // namespace

std::string to_string(BasisKind k) { return k == BasisKind::Monomial ? "monomial" : "bernstein"; }

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "monomial") return BasisKind::Monomial;
  if (s == "bernstein") return BasisKind::Bernstein;
  throw std::invalid_argument("unknown basis kind '" + s + "'");
}

BasisSet::BasisSet(BasisKind kind, int count, double tf) : kind_(kind), count_(count), tf_(tf) {
  if (count < 1) throw std::invalid_argument("basis: need at least one function");
  if (!(tf > 0.0)) throw std::invalid_argument("basis: t_f must be positive");
}

void BasisSet::eval(double t, int order, std::span<double> out) const {
  const int d = degree();
  if (kind_ == BasisKind::Monomial) {
    for (int k = 0; k <= d; ++k)
      out[k] = k < order ? 0.0 : falling(k, order) * std::pow(t, k - order);
    return;
  }
  const double s = t / tf_;
  if (order > d) {
    std::fill(out.begin(), out.begin() + count_, 0.0);
    return;
  }
  // d^m/dt^m B_{j,d} = d!/(d-m)!/tf^m * sum_i (-1)^(m-i) C(m,i) B_{j-i,d-m}
  const double scale = falling(d, order) / std::pow(tf_, order);
  for (int j = 0; j <= d; ++j) {
    double v = 0.0;
    for (int i = 0; i <= order; ++i) {
      const double sign = ((order - i) % 2) ? -1.0 : 1.0;
      v += sign * binom(order, i) * bernstein(j - i, d - order, s);
    }
    out[j] = scale * v;
  }
}

std::vector<double> BasisSet::eval(double t, int order) const {
  std::vector<double> out(count_);
  eval(t, order, out);
  return out;
}

double BasisSet::combine(std::span<const double> q, double t, int order) const {
  double buf[32];
  std::vector<double> heap;
  std::span<double> vals;
  if (count_ <= 32) {
    vals = std::span<double>(buf, count_);
  } else {
    heap.resize(count_);
    vals = heap;
  }
  eval(t, order, vals);
  double v = 0.0;
  for (int k = 0; k < count_; ++k) v += q[k] * vals[k];
  return v;
}

std::vector<double> BasisSet::derivative_control_points(std::span<const double> q, int order) const {
  const int d = degree();
  std::vector<double> b(count_);
  if (kind_ == BasisKind::Bernstein) {
    std::copy(q.begin(), q.begin() + count_, b.begin());
  } else {
    // sum a_k t^k = sum (a_k tf^k) s^k; power -> Bernstein change of basis.
    for (int i = 0; i <= d; ++i) {
      double v = 0.0;
      for (int k = 0; k <= i; ++k) v += binom(i, k) / binom(d, k) * q[k] * std::pow(tf_, k);
      b[i] = v;
    }
  }
  if (order > d) return {0.0};
  for (int m = 0; m < order; ++m) {
    for (std::size_t k = 0; k + 1 < b.size(); ++k) b[k] = b[k + 1] - b[k];
    b.pop_back();
  }
  const double scale = falling(d, order) / std::pow(tf_, order);
  for (double& v : b) v *= scale;
  return b;
}

double BasisSet::derivative_bound(std::span<const double> q, int order) const {
  double m = 0.0;
  for (double v : derivative_control_points(q, order)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace sttcbf
