#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sttcbf {

struct CoverBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform samples of one axis [lo, hi].
struct CoverAxis {
  enum class Placement {
    Midpoint,  // (i + 1/2) h, h = (hi - lo) / count
    Endpoints  // lo + i h, h = (hi - lo) / (count - 1), both ends included
  };

  double lo = 0.0;
  double hi = 1.0;
  int count = 1;
  Placement placement = Placement::Midpoint;

  double spacing() const;
  /// Largest distance from a point of [lo, hi] to its nearest sample.
  double reach() const;
  std::vector<double> points() const;
};

/// Axis-aligned product grid. Every point of the box lies within radius()
/// (Euclidean) of some sample.
struct GridCover {
  std::vector<CoverAxis> axes;
  double radius() const;
  std::size_t size() const;
  std::vector<std::vector<double>> samples() const;
};

/// Fewest-samples midpoint grid over the box with radius() <= eps.
GridCover build_grid_cover(const std::vector<std::pair<double, double>>& box, double eps,
                           std::size_t max_samples = 100'000'000);

/// Cover of the augmented domain W = angles x [0,1] x [0, t_f]. For state
/// dimension n there are n-1 angles: the first n-2 range over [0, pi], the
/// last over [0, 2 pi].
struct CoverSpec {
  std::size_t n = 2;
  double tf = 1.0;
  double epsilon = 0.0;            // used when the counts below are empty
  std::vector<int> theta_counts;  // explicit per-axis counts
  int lambda_count = 0;
  int tau_count = 0;
  bool lambda_boundary = false;  // also sample lambda = 1 (the tube surface)
  std::size_t max_samples = 50'000'000;

  bool explicit_counts() const { return !theta_counts.empty(); }
  bool operator==(const CoverSpec&) const = default;
};

struct CoverSample {
  std::vector<double> theta;
  double lambda = 0.0;
  double tau = 0.0;
};

struct ScenarioCover {
  std::vector<CoverAxis> theta;
  CoverAxis lambda;
  CoverAxis tau;
  bool lambda_boundary = false;

  /// Achieved cover radius sqrt(sum_j (h_j / 2)^2).
  double epsilon() const;
  std::vector<double> lambda_points() const;
  std::size_t direction_count() const;  // product of theta counts
  std::size_t size() const;
  std::vector<CoverSample> samples() const;

  /// Same axes with every count multiplied by `factor` and both ends of
  /// each axis included.
  ScenarioCover refined(int factor) const;
};

ScenarioCover build_cover(const CoverSpec& spec);

/// Sample-count bookkeeping without building anything.
std::size_t cover_size_for(const CoverSpec& spec);

}  // namespace sttcbf
