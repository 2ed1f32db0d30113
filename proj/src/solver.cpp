#include "sttcbf/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace sttcbf {

namespace {

std::optional<std::vector<double>> region_center(const FormulaPtr& f) {
  switch (f->op) {
    case Op::Pred:
      if (f->pred && f->pred->kind != Predicate::Kind::AffineHalfspace) return f->pred->center;
      return std::nullopt;
    case Op::And:
    case Op::Or: {
      if (auto c = region_center(f->lhs)) return c;
      return region_center(f->rhs);
    }
    case Op::Eventually:
    case Op::Always:
      return region_center(f->lhs);
    default:
      return std::nullopt;
  }
}

void collect_waypoints(const FormulaPtr& f, std::vector<Waypoint>& out) {
  switch (f->op) {
    case Op::And:
      collect_waypoints(f->lhs, out);
      collect_waypoints(f->rhs, out);
      break;
    case Op::Or:
      // implication A => B arrives as !A | B
      if (f->lhs->op == Op::Not) collect_waypoints(f->rhs, out);
      break;
    case Op::Eventually: {
      const double mid = 0.5 * (f->lo + f->hi);
      const auto& body = f->lhs;
      if (body->op == Op::Always) {
        if (auto c = region_center(body->lhs)) {
          out.push_back({mid + body->lo, *c});
          out.push_back({mid + body->hi, *c});
        }
      } else if (auto c = region_center(body)) {
        out.push_back({mid, *c});
      }
      break;
    }
    default:
      break;
  }
}

class Search {
 public:
  Search(const SopProblem& prob, std::uint64_t seed)
      : prob_(prob),
        lo_(prob.instance().coeff_lo),
        hi_(prob.instance().coeff_hi),
        rng_(seed) {
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (hi_[i] > lo_[i]) free_.push_back(i);
  }

  struct Point {
    std::vector<double> q;
    double f = std::numeric_limits<double>::infinity();
  };

  std::size_t evaluations() const { return evals_; }

  Point point(std::vector<double> q) {
    clamp(q);
    Point p{std::move(q)};
    p.f = objective(p.q);
    return p;
  }

  /// Adaptive compass search. Stops once p.f <= level, the steps collapse,
  /// or `limit` total evaluations have been spent.
  void pattern(Point& p, double level, double step_frac, std::size_t limit) {
    std::vector<double> step(lo_.size(), 0.0);
    for (std::size_t i : free_) step[i] = step_frac * (hi_[i] - lo_[i]);
    std::vector<double> trial;
    while (evals_ < limit && p.f > level) {
      bool improved = false;
      for (std::size_t i : free_) {
        for (double dir : {1.0, -1.0}) {
          trial = p.q;
          trial[i] = std::clamp(p.q[i] + dir * step[i], lo_[i], hi_[i]);
          if (trial[i] == p.q[i]) continue;
          const double ft = objective(trial);
          if (ft < p.f) {
            p.q.swap(trial);
            p.f = ft;
            improved = true;
            step[i] = std::min(2.0 * step[i], hi_[i] - lo_[i]);
            break;
          }
          if (evals_ >= limit) return;
        }
        if (p.f <= level || evals_ >= limit) return;
      }
      // Coordinate moves stall on the kinks of a max of many terms; poll a
      // few random combined directions before refining the mesh.
      for (int k = 0; !improved && k < 2 * static_cast<int>(free_.size()); ++k) {
        trial = p.q;
        double len = 0.0;
        std::vector<double> dir(lo_.size(), 0.0);
        for (std::size_t i : free_) len += (dir[i] = gauss_(rng_)) * dir[i];
        len = std::sqrt(len);
        for (std::size_t i : free_)
          trial[i] = std::clamp(p.q[i] + dir[i] / len * step[i] * 2.0, lo_[i], hi_[i]);
        const double ft = objective(trial);
        if (ft < p.f) {
          p.q.swap(trial);
          p.f = ft;
          improved = true;
        }
        if (p.f <= level || evals_ >= limit) return;
      }
      if (!improved) {
        double rel = 0.0;
        for (std::size_t i : free_) {
          step[i] *= 0.5;
          rel = std::max(rel, step[i] / (hi_[i] - lo_[i]));
        }
        if (rel < 1e-6) return;
      }
    }
  }

  /// Metropolis random walk with a shrinking Gaussian proposal. Returns the
  /// best point visited.
  Point anneal(const Point& start, int iterations, double spread, std::size_t limit) {
    Point cur = start, best = start;
    const double temp0 = std::max(0.02, 0.1 * std::abs(start.f));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> trial;
    for (int k = 0; k < iterations && evals_ < limit; ++k) {
      const double frac = 1.0 - static_cast<double>(k) / iterations;
      trial = cur.q;
      for (std::size_t i : free_) trial[i] += spread * frac * (hi_[i] - lo_[i]) * gauss(rng_);
      clamp(trial);
      const double ft = objective(trial);
      const double temp = temp0 * frac + 1e-12;
      if (ft < cur.f || unif(rng_) < std::exp(-(ft - cur.f) / temp)) {
        cur.q = trial;
        cur.f = ft;
      }
      if (cur.f < best.f) best = cur;
    }
    return best;
  }

 private:
  double objective(const std::vector<double>& q) {
    ++evals_;
    return prob_.evaluate(q).eta;
  }

  void clamp(std::vector<double>& q) const {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::clamp(q[i], lo_[i], hi_[i]);
  }

  const SopProblem& prob_;
  const std::vector<double>& lo_;
  const std::vector<double>& hi_;
  std::vector<std::size_t> free_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_;
  std::size_t evals_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<Waypoint> extract_waypoints(const FormulaPtr& formula) {
  std::vector<Waypoint> out;
  collect_waypoints(formula, out);
  std::stable_sort(out.begin(), out.end(),
                   [](const Waypoint& a, const Waypoint& b) { return a.t < b.t; });
  return out;
}

std::optional<std::vector<double>> extract_start(const FormulaPtr& formula) {
  if (formula->op == Op::Or && formula->lhs->op == Op::Not) return region_center(formula->lhs->lhs);
  return std::nullopt;
}

std::vector<double> warm_start(const SopInstance& inst, const std::vector<double>& start,
                               std::vector<Waypoint> waypoints) {
  const std::size_t n = inst.n;
  std::stable_sort(waypoints.begin(), waypoints.end(),
                   [](const Waypoint& a, const Waypoint& b) { return a.t < b.t; });
  std::vector<Waypoint> path{{0.0, start}};
  for (auto& w : waypoints) {
    if (w.point.size() != n) continue;
    w.t = std::clamp(w.t, 0.0, inst.tf);
    if (w.t <= path.back().t) w.t = path.back().t + 1e-9;
    path.push_back(w);
  }

  auto path_at = [&](double t, std::size_t i) {
    if (t >= path.back().t) return path.back().point[i];
    std::size_t k = 1;
    while (path[k].t < t) ++k;
    const auto& a = path[k - 1];
    const auto& b = path[k];
    const double w = (t - a.t) / (b.t - a.t);
    return (1.0 - w) * a.point[i] + w * b.point[i];
  };

  const int samples = 201;
  // Box-constrained least squares by projected gradient, started from the
  // clamped unconstrained fit. The problems are tiny (one coordinate each).
  auto fit = [&](const BasisSet& basis, std::size_t off, auto&& target) {
    // Waypoints enter again as heavily weighted rows so the fit passes near
    // them even when the path is too sharp for the basis.
    const int z = basis.count();
    const int rows = samples + static_cast<int>(path.size());
    Eigen::MatrixXd A(rows, z);
    Eigen::VectorXd y(rows);
    for (int s = 0; s < rows; ++s) {
      const bool wp = s >= samples;
      const double t = wp ? path[static_cast<std::size_t>(s - samples)].t : inst.tf * s / (samples - 1);
      const double weight = wp ? 10.0 : 1.0;
      const auto v = basis.eval(t);
      for (int k = 0; k < z; ++k) A(s, k) = weight * v[k];
      y[s] = weight * target(t);
    }
    const Eigen::Map<const Eigen::VectorXd> lo(inst.coeff_lo.data() + off, z);
    const Eigen::Map<const Eigen::VectorXd> hi(inst.coeff_hi.data() + off, z);
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd clamped = c.cwiseMax(lo).cwiseMin(hi);
    if (clamped != c) {
      c = clamped;
      const Eigen::MatrixXd H = A.transpose() * A;
      const Eigen::VectorXd g0 = A.transpose() * y;
      const double step = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff();
      for (int it = 0; it < 5000; ++it) {
        const Eigen::VectorXd next = (c - step * (H * c - g0)).cwiseMax(lo).cwiseMin(hi);
        const double moved = (next - c).lpNorm<Eigen::Infinity>();
        c = next;
        if (moved < 1e-10) break;
      }
    }
    return std::vector<double>(c.data(), c.data() + c.size());
  };

  std::vector<double> q;
  const auto zc = static_cast<std::size_t>(inst.center_basis.count());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = fit(inst.center_basis, i * zc, [&](double t) { return path_at(t, i); });
    q.insert(q.end(), c.begin(), c.end());
  }
  const auto r = fit(inst.radius_basis, n * zc, [&](double) { return 2.0 * inst.r_d; });
  q.insert(q.end(), r.begin(), r.end());
  return q;
}

ScenarioCover certification_cover(const SopInstance& inst, const ScenarioCover& optimization,
                                  double eta, double lipschitz, const SolverOptions& opts,
                                  bool* budget_limited) {
  if (budget_limited) *budget_limited = false;
  if (opts.certificate == CertificateMode::Optimization) return optimization;

  CoverSpec spec;
  spec.n = inst.n;
  spec.tf = inst.tf;
  spec.max_samples = opts.certificate_max_samples;
  if (opts.certificate == CertificateMode::Fixed) {
    spec.epsilon = opts.certificate_epsilon;
    return build_cover(spec);
  }
  double margin = opts.certificate_margin;
  if (eta < 0.0) margin = std::min(margin, 0.5 * -eta);
  spec.epsilon = margin / std::max(lipschitz, 1e-12);
  while (cover_size_for(spec) > spec.max_samples) {
    spec.epsilon *= 1.05;
    if (budget_limited) *budget_limited = true;
  }
  return build_cover(spec);
}

SynthesisResult solve_sop(const SopInstance& inst, const CoverSpec& cover_spec,
                          const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  inst.validate();

  SopProblem prob(inst, build_cover(cover_spec));
  prob.set_workers(opts.workers);
  Search search(prob, opts.seed);

  // warm start
  std::vector<double> q0;
  if (opts.initial_q) {
    q0 = *opts.initial_q;
  } else {
    std::vector<double> start;
    if (opts.start) {
      start = *opts.start;
    } else if (auto s = extract_start(inst.formula); s && s->size() == inst.n) {
      start = *s;
    } else {
      for (auto [lo, hi] : inst.state_bounds) start.push_back(0.5 * (lo + hi));
    }
    auto wps = opts.waypoints.empty() ? extract_waypoints(inst.formula) : opts.waypoints;
    q0 = warm_start(inst, start, std::move(wps));
  }
  if (q0.size() != inst.coefficient_count())
    throw std::invalid_argument("initial coefficients have the wrong size");

  // stage 1: unconstrained minimization of eta with restarts
  const std::size_t budget = opts.max_evaluations;
  const std::size_t explore = budget * 3 / 4;
  const double no_level = -std::numeric_limits<double>::infinity();
  auto best = search.point(q0);
  const int rounds = std::max(0, opts.restarts) + 1;
  for (int r = 0; r < rounds && search.evaluations() < explore; ++r) {
    const std::size_t limit = explore * static_cast<std::size_t>(r + 1) / rounds;
    auto cand = r == 0 ? best : search.anneal(best, 120, 0.05, limit);
    search.pattern(cand, no_level, r == 0 ? 0.1 : 0.02, limit);
    if (cand.f < best.f) best = std::move(cand);
  }

  // stage 2: bisection on the feasibility level
  double lo = opts.bisection_lo, hi = opts.bisection_hi;
  std::size_t steps = 0;
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    ++steps;
    if (best.f > mid && search.evaluations() < budget) {
      auto cand = best;
      const std::size_t limit = std::min(budget, search.evaluations() + budget / 40 + 1);
      search.pattern(cand, mid, 0.01, limit);
      if (cand.f < best.f) best = std::move(cand);
    }
    if (best.f <= mid)
      hi = mid;
    else
      lo = mid;
  }

  SynthesisResult res;
  res.q = best.q;
  res.tube = inst.make_tube(best.q);
  res.lipschitz = combined_lipschitz(res.tube, inst.formula);
  res.diagnostics.evaluations = search.evaluations();
  res.diagnostics.bisection_steps = steps;
  res.diagnostics.eta_optimization = best.f;
  res.diagnostics.epsilon_optimization = prob.cover().epsilon();
  res.diagnostics.optimization_samples = prob.cover().size();

  // certification
  const auto tc = std::chrono::steady_clock::now();
  bool limited = false;
  auto cert = certification_cover(inst, prob.cover(), best.f, res.lipschitz.combined, opts, &limited);
  SopValue v;
  if (opts.certificate == CertificateMode::Optimization) {
    v = prob.evaluate(best.q);
  } else {
    SopProblem cp(inst, cert);
    cp.set_workers(opts.workers);
    v = cp.evaluate(best.q);
  }
  res.eta_star = v.eta;
  res.epsilon = cert.epsilon();
  res.certificate_ok = verify_certificate(res.eta_star, res.lipschitz.combined, res.epsilon);
  res.diagnostics.worst = v.worst;
  res.diagnostics.certificate_samples = cert.size();
  res.diagnostics.certificate_budget_limited = limited;
  res.diagnostics.certify_time_s = seconds_since(tc);
  res.diagnostics.wall_time_s = seconds_since(t0);
  return res;
}

}  // namespace sttcbf
