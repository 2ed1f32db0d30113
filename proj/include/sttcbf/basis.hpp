#pragma once

#include <span>
#include <string>
#include <vector>

namespace sttcbf {

enum class BasisKind { Monomial, Bernstein };

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

/// Polynomial basis on [0, t_f]. Monomials are powers of raw time t^k;
/// Bernstein polynomials use the normalized time t / t_f.
class BasisSet {
 public:
  BasisSet() = default;
  BasisSet(BasisKind kind, int count, double tf);

  BasisKind kind() const { return kind_; }
  int count() const { return count_; }
  int degree() const { return count_ - 1; }
  double tf() const { return tf_; }

  /// Values of every basis function's `order`-th time derivative at t.
  void eval(double t, int order, std::span<double> out) const;
  std::vector<double> eval(double t, int order = 0) const;

  /// sum_k q_k p_k^(order)(t)
  double combine(std::span<const double> q, double t, int order = 0) const;

  /// Bernstein control points (over [0, t_f]) of the `order`-th derivative
  /// of sum_k q_k p_k. Their largest magnitude bounds that derivative.
  std::vector<double> derivative_control_points(std::span<const double> q, int order) const;

  /// max_t |d^order/dt^order sum_k q_k p_k| over [0, t_f], upper bound.
  double derivative_bound(std::span<const double> q, int order) const;

  bool operator==(const BasisSet&) const = default;

 private:
  BasisKind kind_ = BasisKind::Bernstein;
  int count_ = 1;
  double tf_ = 1.0;
};

}  // namespace sttcbf
