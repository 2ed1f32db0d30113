#include "sttcbf/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sttcbf {

Signal::Signal(std::vector<double> times, std::vector<double> states, std::size_t dim,
               Interpolation interp)
    : times_(std::move(times)), states_(std::move(states)), dim_(dim), interp_(interp) {
  if (times_.empty()) throw std::invalid_argument("signal: no samples");
  if (dim_ == 0 || states_.size() != times_.size() * dim_)
    throw std::invalid_argument("signal: states do not match times x dimension");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw std::invalid_argument("signal: times must be strictly increasing");
  for (double v : states_)
    if (!std::isfinite(v)) throw std::invalid_argument("signal: non-finite state");
}

Signal Signal::from_rows(std::vector<double> times, const std::vector<std::vector<double>>& rows,
                         Interpolation interp) {
  if (rows.empty()) throw std::invalid_argument("signal: no samples");
  const std::size_t n = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("signal: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Signal(std::move(times), std::move(flat), n, interp);
}

SampleWeight sample_weight(std::span<const double> times, double t, Interpolation interp) {
  const int last = static_cast<int>(times.size()) - 1;
  if (t <= times.front()) return {0, 0, 0.0};
  if (t >= times.back()) return {last, last, 0.0};
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const int i1 = static_cast<int>(it - times.begin());
  const int i0 = i1 - 1;
  double w = (t - times[i0]) / (times[i1] - times[i0]);
  if (interp == Interpolation::NearestSample) w = w > 0.5 ? 1.0 : 0.0;
  if (w == 0.0) return {i0, i0, 0.0};
  if (w == 1.0) return {i1, i1, 0.0};
  return {i0, i1, w};
}

void Signal::value_at(double t, std::span<double> out) const {
  const auto sw = sample_weight(times_, t, interp_);
  const double* a = states_.data() + sw.i0 * dim_;
  const double* b = states_.data() + sw.i1 * dim_;
  for (std::size_t k = 0; k < dim_; ++k) out[k] = (1.0 - sw.w) * a[k] + sw.w * b[k];
}

std::vector<double> Signal::value_at(double t) const {
  std::vector<double> out(dim_);
  value_at(t, out);
  return out;
}

}  // namespace sttcbf
