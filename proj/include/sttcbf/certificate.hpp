#pragma once

#include <cstddef>

#include "sttcbf/formula.hpp"
#include "sttcbf/tube.hpp"

namespace sttcbf {

/// Constants entering the generalization bound from sampled to continuous
/// constraints.
struct CertificateConstants {
  double rho = 0.0;         // robustness w.r.t. the signal
  double center = 0.0;      // c(t) in t
  double radius = 0.0;      // r(t) in t
  double radius_max = 0.0;  // max_t r(t)
  double sphere = 0.0;      // s(theta), conservative sqrt(n (n - 1))
  double mu = 0.0;          // theta, lambda -> -rho(x)
  double combined = 0.0;    // the L in eta + L eps <= 0
};

/// L_s = sqrt(n(n-1)), L_mu = L_rho rbar sqrt(L_s^2 + 1),
/// L = max(L_r, sqrt(L_mu^2 + L_rho^2 (L_c + L_r)^2)).
CertificateConstants combined_lipschitz(double rho, double center, double radius,
                                        double radius_max, std::size_t n);
CertificateConstants combined_lipschitz(const Tube& tube, const FormulaPtr& formula);

/// eta + L eps <= 0
bool verify_certificate(double eta, double lipschitz, double epsilon);

}  // namespace sttcbf
