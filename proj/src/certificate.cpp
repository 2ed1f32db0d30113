#include "sttcbf/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace sttcbf {

CertificateConstants combined_lipschitz(double rho, double center, double radius,
                                        double radius_max, std::size_t n) {
  CertificateConstants k;
  k.rho = rho;
  k.center = center;
  k.radius = radius;
  k.radius_max = radius_max;
  const double nn = static_cast<double>(n);
  k.sphere = std::sqrt(nn * (nn - 1.0));
  k.mu = rho * radius_max * std::sqrt(k.sphere * k.sphere + 1.0);
  const double drift = rho * (center + radius);
  k.combined = std::max(radius, std::sqrt(k.mu * k.mu + drift * drift));
  return k;
}

CertificateConstants combined_lipschitz(const Tube& tube, const FormulaPtr& formula) {
  const auto t = tube_lipschitz(tube);
  return combined_lipschitz(robustness_lipschitz(formula), t.center, t.radius, t.radius_max, tube.n);
}

bool verify_certificate(double eta, double lipschitz, double epsilon) {
  return eta + lipschitz * epsilon <= 0.0;
}

}  // namespace sttcbf
