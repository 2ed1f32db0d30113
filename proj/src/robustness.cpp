#include "sttcbf/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sttcbf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeSlack = 1e-9;

void check_horizon(const FormulaPtr& f, std::span<const double> grid, double t) {
  const double need = t + horizon(f);
  if (t < grid.front() - kTimeSlack || need > grid.back() + kTimeSlack) {
    std::ostringstream os;
    os << "formula needs the signal on [" << t << ", " << need << "] but it covers ["
       << grid.front() << ", " << grid.back() << "]";
    throw HorizonError(os.str());
  }
}

}  // namespace

std::vector<double> window_times(std::span<const double> grid, double s, double lo, double hi) {
  const double a = s + lo;
  const double b = s + hi;
  std::vector<double> out;
  out.push_back(a);
  auto it = std::upper_bound(grid.begin(), grid.end(), a);
  for (; it != grid.end() && *it < b; ++it) out.push_back(*it);
  if (b != a) out.push_back(b);
  return out;
}

RobustnessPlan::RobustnessPlan(const FormulaPtr& f, std::span<const double> grid, double t0,
                               Interpolation interp, RobustnessOptions opts)
    : grid_(grid.begin(), grid.end()), interp_(interp), opts_(opts), formula_(f) {
  if (grid_.empty()) throw std::invalid_argument("robustness plan: empty time grid");
  check_horizon(f, grid_, t0);
  root_ = build(*f, {t0});
}

int RobustnessPlan::build(const Formula& f, const std::vector<double>& times) {
  Node n;
  n.op = f.op;
  n.count = times.size();
  switch (f.op) {
    case Op::True:
      break;
    case Op::Pred:
      if (!f.pred) throw SemanticError("unbound predicate: " + f.name, {f.name});
      n.pred = f.pred.get();
      n.sample.reserve(times.size());
      for (double t : times) n.sample.push_back(sample_weight(grid_, t, interp_));
      break;
    case Op::Not:
      n.lhs = build(*f.lhs, times);
      break;
    case Op::And:
    case Op::Or:
      n.lhs = build(*f.lhs, times);
      n.rhs = build(*f.rhs, times);
      break;
    case Op::Until:
    case Op::Eventually:
    case Op::Always: {
      std::vector<std::vector<double>> windows;
      windows.reserve(times.size());
      std::vector<double> child;
      for (double s : times) {
        windows.push_back(window_times(grid_, s, f.lo, f.hi));
        child.insert(child.end(), windows.back().begin(), windows.back().end());
      }
      std::sort(child.begin(), child.end());
      child.erase(std::unique(child.begin(), child.end()), child.end());
      n.win_off.reserve(times.size() + 1);
      n.win_off.push_back(0);
      for (const auto& w : windows) {
        for (double t : w)
          n.win_idx.push_back(
              static_cast<int>(std::lower_bound(child.begin(), child.end(), t) - child.begin()));
        n.win_off.push_back(static_cast<int>(n.win_idx.size()));
      }
      n.lhs = build(*f.lhs, child);
      if (f.op == Op::Until) n.rhs = build(*f.rhs, child);
      break;
    }
  }
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

double RobustnessPlan::evaluate(std::span<const double> states, std::size_t dim,
                                Workspace& ws) const {
  if (states.size() != grid_.size() * dim)
    throw std::invalid_argument("robustness plan: state buffer does not match grid");
  ws.values.resize(nodes_.size());
  ws.point.resize(dim);
  const bool paper = opts_.until == UntilConvention::Paper;

  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    auto& out = ws.values[k];
    out.resize(n.count);
    switch (n.op) {
      case Op::True:
        std::fill(out.begin(), out.end(), kInf);
        break;
      case Op::Pred:
        for (std::size_t j = 0; j < n.count; ++j) {
          const auto& sw = n.sample[j];
          const double* a = states.data() + sw.i0 * dim;
          if (sw.w == 0.0) {
            out[j] = (*n.pred)(std::span<const double>(a, dim));
          } else {
            const double* b = states.data() + sw.i1 * dim;
            for (std::size_t d = 0; d < dim; ++d)
              ws.point[d] = (1.0 - sw.w) * a[d] + sw.w * b[d];
            out[j] = (*n.pred)(ws.point);
          }
        }
        break;
      case Op::Not: {
        const auto& c = ws.values[n.lhs];
        for (std::size_t j = 0; j < n.count; ++j) out[j] = -c[j];
        break;
      }
      case Op::And:
      case Op::Or: {
        const auto& a = ws.values[n.lhs];
        const auto& b = ws.values[n.rhs];
        for (std::size_t j = 0; j < n.count; ++j)
          out[j] = n.op == Op::And ? std::min(a[j], b[j]) : std::max(a[j], b[j]);
        break;
      }
      case Op::Eventually:
      case Op::Always: {
        const auto& c = ws.values[n.lhs];
        const bool is_max = n.op == Op::Eventually;
        for (std::size_t j = 0; j < n.count; ++j) {
          double acc = is_max ? -kInf : kInf;
          for (int p = n.win_off[j]; p < n.win_off[j + 1]; ++p) {
            const double v = c[n.win_idx[p]];
            acc = is_max ? std::max(acc, v) : std::min(acc, v);
          }
          out[j] = acc;
        }
        break;
      }
      case Op::Until: {
        const auto& point = paper ? ws.values[n.lhs] : ws.values[n.rhs];
        const auto& held = paper ? ws.values[n.rhs] : ws.values[n.lhs];
        for (std::size_t j = 0; j < n.count; ++j) {
          double best = -kInf;
          double running = kInf;
          for (int p = n.win_off[j]; p < n.win_off[j + 1]; ++p) {
            const int i = n.win_idx[p];
            running = std::min(running, held[i]);
            best = std::max(best, std::min(point[i], running));
          }
          out[j] = best;
        }
        break;
      }
    }
  }
  return ws.values[root_][0];
}

double RobustnessPlan::evaluate(std::span<const double> states, std::size_t dim) const {
  Workspace ws;
  return evaluate(states, dim, ws);
}

RobustnessReport robustness(const FormulaPtr& f, const Signal& x, double t, RobustnessOptions opts) {
  RobustnessPlan plan(f, x.times(), t, x.interpolation(), opts);
  const double v = plan.evaluate(x.states(), x.dim());
  return {v, v > 0.0};
}

namespace {

class BooleanEvaluator {
 public:
  BooleanEvaluator(const Signal& x, RobustnessOptions opts) : x_(x), opts_(opts), buf_(x.dim()) {}

  bool eval(const Formula& f, double t) {
    const auto key = std::make_pair(&f, t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = false;
    switch (f.op) {
      case Op::True: r = true; break;
      case Op::Pred:
        if (!f.pred) throw SemanticError("unbound predicate: " + f.name, {f.name});
        x_.value_at(t, buf_);
        r = (*f.pred)(buf_) >= 0.0;
        break;
      case Op::Not: r = !eval(*f.lhs, t); break;
      case Op::And: r = eval(*f.lhs, t) && eval(*f.rhs, t); break;
      case Op::Or: r = eval(*f.lhs, t) || eval(*f.rhs, t); break;
      case Op::Eventually:
      case Op::Always: {
        const bool any = f.op == Op::Eventually;
        r = !any;
        for (double s : window_times(x_.times(), t, f.lo, f.hi))
          if (eval(*f.lhs, s) == any) {
            r = any;
            break;
          }
        break;
      }
      case Op::Until: {
        const Formula& point = opts_.until == UntilConvention::Paper ? *f.lhs : *f.rhs;
        const Formula& held = opts_.until == UntilConvention::Paper ? *f.rhs : *f.lhs;
        bool held_so_far = true;
        for (double s : window_times(x_.times(), t, f.lo, f.hi)) {
          held_so_far = held_so_far && eval(held, s);
          if (!held_so_far) break;
          if (eval(point, s)) {
            r = true;
            break;
          }
        }
        break;
      }
    }
    memo_.emplace(key, r);
    return r;
  }

 private:
  const Signal& x_;
  RobustnessOptions opts_;
  std::vector<double> buf_;
  std::map<std::pair<const Formula*, double>, bool> memo_;
};

}  // namespace

bool satisfies(const FormulaPtr& f, const Signal& x, double t, RobustnessOptions opts) {
  check_horizon(f, x.times(), t);
  return BooleanEvaluator(x, opts).eval(*f, t);
}

}  // namespace sttcbf
