#include <omp.h>

#include "sttcbf/sop.hpp"

namespace sttcbf {

SopValue SopProblem::evaluate(std::span<const double> q) const {
  const Frame fr = frame(q);
  const auto count = static_cast<long>(trajectory_count());
  std::vector<double> terms(trajectory_count());

#pragma omp parallel num_threads(workers_ > 0 ? workers_ : omp_get_max_threads())
  {
    std::vector<double> states;
    RobustnessPlan::Workspace ws;
#pragma omp for schedule(static)
    for (long j = 0; j < count; ++j)
      terms[j] = robustness_term(fr, static_cast<std::size_t>(j), states, ws);
  }
  return reduce(fr, terms);
}

}  // namespace sttcbf
