#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "sttcbf/formula.hpp"
#include "sttcbf/signal.hpp"

namespace sttcbf {

struct RobustnessReport {
  double value = 0.0;
  bool satisfied = false;  // value > 0
};

struct RobustnessOptions {
  UntilConvention until = UntilConvention::Paper;
};

struct HorizonError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Times at which a temporal operator with interval [lo, hi] inspects its
/// operand when evaluated at s: both interval endpoints plus every grid
/// point strictly between them, ascending.
std::vector<double> window_times(std::span<const double> grid, double s, double lo, double hi);

/// Quantitative semantics evaluated on the signal's sample grid, with
/// interval endpoints that fall between samples included by interpolation.
RobustnessReport robustness(const FormulaPtr& f, const Signal& x, double t = 0.0,
                            RobustnessOptions opts = {});

/// Qualitative semantics on the same evaluation grid.
bool satisfies(const FormulaPtr& f, const Signal& x, double t = 0.0, RobustnessOptions opts = {});

/// Precompiled evaluation schedule for one formula over a fixed time grid
/// and start time. Only the states change between calls, which is the
/// situation in scenario optimization where every trajectory shares the
/// same time samples.
class RobustnessPlan {
 public:
  RobustnessPlan(const FormulaPtr& f, std::span<const double> grid, double t0,
                 Interpolation interp = Interpolation::Linear, RobustnessOptions opts = {});

  struct Workspace {
    std::vector<std::vector<double>> values;
    std::vector<double> point;
  };

  /// `states` holds grid.size() rows of `dim` values, row-major.
  double evaluate(std::span<const double> states, std::size_t dim, Workspace& ws) const;
  double evaluate(std::span<const double> states, std::size_t dim) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Op op = Op::True;
    const Predicate* pred = nullptr;
    int lhs = -1;
    int rhs = -1;
    std::size_t count = 0;            // evaluation times of this node
    std::vector<SampleWeight> sample;  // predicates
    std::vector<int> win_off;          // temporal: window k is win_idx[win_off[k]..win_off[k+1])
    std::vector<int> win_idx;
  };

  int build(const Formula& f, const std::vector<double>& times);

  std::vector<double> grid_;
  Interpolation interp_;
  RobustnessOptions opts_;
  FormulaPtr formula_;  // keeps predicates alive
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace sttcbf
