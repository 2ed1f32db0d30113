#pragma once

#include <span>
#include <vector>

namespace sttcbf {

enum class Interpolation {
  Linear,         // piecewise-linear between samples
  NearestSample,  // holds the value of the closest sample (ties go to the earlier one)
};

/// Time-stamped trajectory in R^n. States are stored row-major, one row per
/// sample.
class Signal {
 public:
  Signal() = default;
  Signal(std::vector<double> times, std::vector<double> states, std::size_t dim,
         Interpolation interp = Interpolation::Linear);
  static Signal from_rows(std::vector<double> times, const std::vector<std::vector<double>>& rows,
                          Interpolation interp = Interpolation::Linear);

  std::size_t size() const { return times_.size(); }
  std::size_t dim() const { return dim_; }
  Interpolation interpolation() const { return interp_; }
  std::span<const double> times() const { return times_; }
  std::span<const double> states() const { return states_; }
  std::span<const double> state(std::size_t i) const {
    return std::span<const double>(states_).subspan(i * dim_, dim_);
  }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  /// Value at t; t is clamped to [start_time, end_time].
  void value_at(double t, std::span<double> out) const;
  std::vector<double> value_at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> states_;
  std::size_t dim_ = 0;
  Interpolation interp_ = Interpolation::Linear;
};

/// Bracketing samples and blend weight for time t on a strictly increasing
/// grid: value = (1 - w) * x[i0] + w * x[i1].
struct SampleWeight {
  int i0 = 0;
  int i1 = 0;
  double w = 0.0;
};
SampleWeight sample_weight(std::span<const double> times, double t, Interpolation interp);

}  // namespace sttcbf
