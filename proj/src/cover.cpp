#include "sttcbf/cover.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sttcbf {

double CoverAxis::spacing() const {
  if (placement == Placement::Midpoint) return (hi - lo) / count;
  return count > 1 ? (hi - lo) / (count - 1) : 2.0 * (hi - lo);
}

double CoverAxis::reach() const { return 0.5 * spacing(); }

std::vector<double> CoverAxis::points() const {
  std::vector<double> p(count);
  const double h = spacing();
  for (int i = 0; i < count; ++i) {
    if (placement == Placement::Midpoint)
      p[i] = lo + (i + 0.5) * h;
    else
      p[i] = count > 1 ? (i == count - 1 ? hi : lo + i * h) : 0.5 * (lo + hi);
  }
  return p;
}

double GridCover::radius() const {
  double s = 0.0;
  for (const auto& a : axes) s += a.reach() * a.reach();
  return std::sqrt(s);
}

std::size_t GridCover::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::vector<std::vector<double>> GridCover::samples() const {
  std::vector<std::vector<double>> pts;
  for (const auto& a : axes) pts.push_back(a.points());
  std::vector<std::vector<double>> out;
  out.reserve(size());
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t s = 0; s < size(); ++s) {
    std::vector<double> w(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) w[d] = pts[d][idx[d]];
    out.push_back(std::move(w));
    for (std::size_t d = axes.size(); d-- > 0;) {
      if (++idx[d] < static_cast<std::size_t>(axes[d].count)) break;
      idx[d] = 0;
    }
  }
  return out;
}

namespace {

// Equal spacing on every axis minimizes the product of counts under
// sum (h_j/2)^2 <= eps^2, so each axis gets h <= 2 eps / sqrt(d).
std::vector<int> counts_for(const std::vector<double>& lengths, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cover radius must be positive");
  const double h = 2.0 * eps / std::sqrt(static_cast<double>(lengths.size()));
  std::vector<int> counts;
  for (double L : lengths) {
    const double k = std::ceil(L / h - 1e-12);
    if (k > 1e9) throw CoverBudgetError("cover radius too small");
    counts.push_back(std::max(1, static_cast<int>(k)));
  }
  return counts;
}

std::size_t product(const std::vector<int>& counts, std::size_t cap) {
  std::size_t n = 1;
  for (int c : counts) {
    if (n > cap / static_cast<std::size_t>(c) + 1) return cap + 1;
    n *= static_cast<std::size_t>(c);
  }
  return n;
}

std::vector<std::pair<double, double>> domain(std::size_t n, double tf) {
  if (n < 2) throw std::invalid_argument("cover: state dimension must be at least 2");
  std::vector<std::pair<double, double>> box;
  for (std::size_t k = 0; k + 2 < n; ++k) box.emplace_back(0.0, std::numbers::pi);
  box.emplace_back(0.0, 2.0 * std::numbers::pi);
  box.emplace_back(0.0, 1.0);
  box.emplace_back(0.0, tf);
  return box;
}

std::vector<int> spec_counts(const CoverSpec& spec) {
  const auto box = domain(spec.n, spec.tf);
  if (spec.explicit_counts()) {
    if (spec.theta_counts.size() + 1 != spec.n)
      throw std::invalid_argument("cover: need n-1 theta counts");
    std::vector<int> c = spec.theta_counts;
    c.push_back(spec.lambda_count);
    c.push_back(spec.tau_count);
    for (int k : c)
      if (k < 1) throw std::invalid_argument("cover: counts must be positive");
    return c;
  }
  std::vector<double> lengths;
  for (auto [lo, hi] : box) lengths.push_back(hi - lo);
  return counts_for(lengths, spec.epsilon);
}

}  // namespace

GridCover build_grid_cover(const std::vector<std::pair<double, double>>& box, double eps,
                           std::size_t max_samples) {
  std::vector<double> lengths;
  for (auto [lo, hi] : box) lengths.push_back(hi - lo);
  const auto counts = counts_for(lengths, eps);
  if (product(counts, max_samples) > max_samples)
    throw CoverBudgetError("cover radius too small for the sample budget");
  GridCover g;
  for (std::size_t d = 0; d < box.size(); ++d)
    g.axes.push_back({box[d].first, box[d].second, counts[d], CoverAxis::Placement::Midpoint});
  return g;
}

double ScenarioCover::epsilon() const {
  double s = lambda.reach() * lambda.reach() + tau.reach() * tau.reach();
  for (const auto& a : theta) s += a.reach() * a.reach();
  return std::sqrt(s);
}

std::vector<double> ScenarioCover::lambda_points() const {
  auto p = lambda.points();
  if (lambda_boundary && p.back() != 1.0) p.push_back(1.0);
  return p;
}

std::size_t ScenarioCover::direction_count() const {
  std::size_t n = 1;
  for (const auto& a : theta) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::size_t ScenarioCover::size() const {
  return direction_count() * lambda_points().size() * static_cast<std::size_t>(tau.count);
}

std::vector<CoverSample> ScenarioCover::samples() const {
  GridCover dirs;
  dirs.axes = theta;
  const auto angles = dirs.samples();
  const auto lams = lambda_points();
  const auto taus = tau.points();
  std::vector<CoverSample> out;
  out.reserve(size());
  for (const auto& th : angles)
    for (double l : lams)
      for (double t : taus) out.push_back({th, l, t});
  return out;
}

ScenarioCover ScenarioCover::refined(int factor) const {
  ScenarioCover c = *this;
  auto refine = [&](CoverAxis& a) {
    a.count = a.count * factor + 1;
    a.placement = CoverAxis::Placement::Endpoints;
  };
  for (auto& a : c.theta) refine(a);
  refine(c.lambda);
  refine(c.tau);
  c.lambda_boundary = false;
  return c;
}

std::size_t cover_size_for(const CoverSpec& spec) {
  return product(spec_counts(spec), spec.max_samples);
}

ScenarioCover build_cover(const CoverSpec& spec) {
  if (!spec.explicit_counts() && !(spec.epsilon > 0.0))
    throw std::invalid_argument("cover radius must be positive");
  const auto counts = spec_counts(spec);
  if (product(counts, spec.max_samples) > spec.max_samples) {
    std::ostringstream os;
    os << "cover with epsilon " << spec.epsilon << " exceeds the budget of " << spec.max_samples
       << " samples";
    throw CoverBudgetError(os.str());
  }
  const auto box = domain(spec.n, spec.tf);
  ScenarioCover c;
  for (std::size_t d = 0; d + 2 < box.size(); ++d)
    c.theta.push_back({box[d].first, box[d].second, counts[d]});
  c.lambda = {0.0, 1.0, counts[counts.size() - 2]};
  c.tau = {0.0, spec.tf, counts.back()};
  c.lambda_boundary = spec.lambda_boundary;
  return c;
}

}  // namespace sttcbf
