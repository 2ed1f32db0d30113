#include "sttcbf/sop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sttcbf {

std::size_t SopInstance::coefficient_count() const {
  return n * static_cast<std::size_t>(center_basis.count()) +
         static_cast<std::size_t>(radius_basis.count());
}

void SopInstance::validate() const {
  if (!formula) throw std::invalid_argument("sop: missing formula");
  if (!(r_d > 0.0)) throw std::invalid_argument("sop: r_d must be positive");
  if (center_basis.tf() != tf || radius_basis.tf() != tf)
    throw std::invalid_argument("sop: basis t_f does not match instance t_f");
  if (state_bounds.size() != n) throw std::invalid_argument("sop: state bounds need n intervals");
  const std::size_t m = coefficient_count();
  if (coeff_lo.size() != m || coeff_hi.size() != m)
    throw std::invalid_argument("sop: coefficient box has the wrong size");
  for (std::size_t i = 0; i < m; ++i)
    if (!(coeff_lo[i] <= coeff_hi[i])) throw std::invalid_argument("sop: empty coefficient box");
}

Tube SopInstance::make_tube(std::span<const double> q) const {
  const std::size_t nc = n * static_cast<std::size_t>(center_basis.count());
  return Tube(n, center_basis, radius_basis, std::vector<double>(q.begin(), q.begin() + nc),
              std::vector<double>(q.begin() + nc, q.end()));
}

void set_default_boxes(SopInstance& inst, double radius_max) {
  const auto zc = static_cast<std::size_t>(inst.center_basis.count());
  const auto zr = static_cast<std::size_t>(inst.radius_basis.count());
  inst.coeff_lo.clear();
  inst.coeff_hi.clear();
  // Monomial coefficient k scales like range / t_f^k.
  auto push = [&](const BasisSet& basis, std::size_t k, double lo, double hi, double pad) {
    if (basis.kind() == BasisKind::Bernstein || k == 0) {
      inst.coeff_lo.push_back(lo - pad);
      inst.coeff_hi.push_back(hi + pad);
    } else {
      const double m = 2.0 * (hi - lo) / std::pow(inst.tf, static_cast<double>(k));
      inst.coeff_lo.push_back(-m);
      inst.coeff_hi.push_back(m);
    }
  };
  for (std::size_t i = 0; i < inst.n; ++i) {
    const auto [lo, hi] = inst.state_bounds.at(i);
    for (std::size_t k = 0; k < zc; ++k) push(inst.center_basis, k, lo, hi, 0.5 * (hi - lo));
  }
  for (std::size_t k = 0; k < zr; ++k) push(inst.radius_basis, k, 0.0, radius_max, 0.0);
}

void pin_start(SopInstance& inst, std::span<const double> start) {
  if (start.size() != inst.n) throw std::invalid_argument("start point has wrong dimension");
  const auto zc = static_cast<std::size_t>(inst.center_basis.count());
  for (std::size_t i = 0; i < inst.n; ++i) {
    inst.coeff_lo.at(i * zc) = start[i];
    inst.coeff_hi.at(i * zc) = start[i];
  }
}

namespace {

RobustnessPlan make_plan(const SopInstance& inst, const std::vector<double>& grid,
                         Interpolation interp) {
  inst.validate();
  return RobustnessPlan(inst.formula, grid, 0.0, interp, inst.robustness);
}

}  // namespace

SopProblem::SopProblem(SopInstance inst, ScenarioCover cover)
    : inst_(std::move(inst)),
      cover_(std::move(cover)),
      tau_(cover_.tau.points()),
      interp_(cover_.tau.placement == CoverAxis::Placement::Midpoint ? Interpolation::NearestSample
                                                                     : Interpolation::Linear),
      plan_([&] {
        grid_.clear();
        if (tau_.front() > 0.0) grid_.push_back(0.0);
        const std::size_t off = grid_.size();
        grid_.insert(grid_.end(), tau_.begin(), tau_.end());
        if (tau_.back() < inst_.tf) grid_.push_back(inst_.tf);
        tau_row_.resize(tau_.size());
        for (std::size_t k = 0; k < tau_.size(); ++k) tau_row_[k] = static_cast<int>(off + k);
        return make_plan(inst_, grid_, interp_);
      }()) {
  if (cover_.theta.size() + 1 != inst_.n)
    throw std::invalid_argument("sop: cover angles do not match state dimension");

  const auto zc = static_cast<std::size_t>(inst_.center_basis.count());
  const auto zr = static_cast<std::size_t>(inst_.radius_basis.count());
  center_vals_.resize(grid_.size() * zc);
  radius_vals_.resize(grid_.size() * zr);
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    inst_.center_basis.eval(grid_[g], 0, std::span<double>(center_vals_).subspan(g * zc, zc));
    inst_.radius_basis.eval(grid_[g], 0, std::span<double>(radius_vals_).subspan(g * zr, zr));
  }

  GridCover dirs;
  dirs.axes = cover_.theta;
  for (const auto& th : dirs.samples()) {
    const auto s = sphere_map(th);
    directions_.emplace_back(s.data(), s.data() + s.size());
  }
  lambdas_ = cover_.lambda_points();
}

SopProblem::Frame SopProblem::frame(std::span<const double> q) const {
  if (q.size() != inst_.coefficient_count())
    throw std::invalid_argument("sop: coefficient vector has the wrong size");
  const std::size_t n = inst_.n;
  const auto zc = static_cast<std::size_t>(inst_.center_basis.count());
  const auto zr = static_cast<std::size_t>(inst_.radius_basis.count());
  Frame fr;
  fr.center.resize(grid_.size() * n);
  fr.radius.resize(grid_.size());
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    const double* cv = center_vals_.data() + g * zc;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < zc; ++k) v += q[i * zc + k] * cv[k];
      fr.center[g * n + i] = v;
    }
    const double* rv = radius_vals_.data() + g * zr;
    double r = 0.0;
    for (std::size_t k = 0; k < zr; ++k) r += q[n * zc + k] * rv[k];
    fr.radius[g] = r;
  }
  return fr;
}

void SopProblem::fill_states(const Frame& fr, std::size_t j, std::vector<double>& states) const {
  const std::size_t n = inst_.n;
  const auto& dir = directions_[j / lambdas_.size()];
  const double lam = lambdas_[j % lambdas_.size()];
  states.resize(grid_.size() * n);
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    const double scale = lam * fr.radius[g];
    for (std::size_t i = 0; i < n; ++i) states[g * n + i] = fr.center[g * n + i] + scale * dir[i];
  }
}

double SopProblem::robustness_term(const Frame& fr, std::size_t j, std::vector<double>& states,
                                   RobustnessPlan::Workspace& ws) const {
  fill_states(fr, j, states);
  return -plan_.evaluate(states, inst_.n, ws);
}

// Radius constraints come first, then trajectories; ties keep the lowest id.
SopValue SopProblem::reduce(const Frame& fr, std::span<const double> terms) const {
  SopValue v;
  v.eta = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tau_.size(); ++k) {
    const double term = inst_.r_d - fr.radius[tau_row_[k]];
    if (term > v.eta) v = {term, {ConstraintId::Kind::Radius, k}};
  }
  for (std::size_t j = 0; j < terms.size(); ++j)
    if (terms[j] > v.eta) v = {terms[j], {ConstraintId::Kind::Robustness, j}};
  return v;
}

SopValue SopProblem::evaluate_serial(std::span<const double> q) const {
  const Frame fr = frame(q);
  std::vector<double> terms(trajectory_count());
  std::vector<double> states;
  RobustnessPlan::Workspace ws;
  for (std::size_t j = 0; j < terms.size(); ++j) terms[j] = robustness_term(fr, j, states, ws);
  return reduce(fr, terms);
}

Signal SopProblem::trajectory(std::span<const double> q, std::size_t j) const {
  const Frame fr = frame(q);
  std::vector<double> states;
  fill_states(fr, j, states);
  return Signal(grid_, std::move(states), inst_.n, interp_);
}

SopValue sop_objective(const SopInstance& inst, const ScenarioCover& cover,
                       std::span<const double> q) {
  return SopProblem(inst, cover).evaluate(q);
}

}  // namespace sttcbf
