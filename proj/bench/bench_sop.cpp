// Objective evaluation: serial reference against the OpenMP kernel on the
// shipped scenarios' optimization covers (refine = 1) and on 10x refined
// covers of recheck size (refine = 10).

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "sttcbf/scenario.hpp"

using namespace sttcbf;

namespace {

struct Fixture {
  SopProblem problem;
  std::vector<double> q;
};

Fixture load(const char* file, int refine) {
  const auto cfg = load_scenario(std::filesystem::path(STTCBF_SOURCE_DIR) / "scenarios" / file);
  const auto inst = make_instance(cfg);
  auto cover = build_cover(cfg.cover);
  if (refine > 1) cover = cover.refined(refine);
  SopProblem p(inst, cover);
  std::mt19937_64 rng(1);
  std::vector<double> q(inst.coefficient_count());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = std::uniform_real_distribution<double>(inst.coeff_lo[i], inst.coeff_hi[i])(rng);
  return {std::move(p), std::move(q)};
}

const char* kFiles[] = {"omni_example.json", "diffdrive.json", "quadrotor.json"};

void BM_serial(benchmark::State& st) {
  auto fx = load(kFiles[st.range(0)], static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(fx.problem.evaluate_serial(fx.q));
  st.SetLabel(kFiles[st.range(0)]);
  st.counters["trajectories"] = static_cast<double>(fx.problem.trajectory_count());
}

void BM_openmp(benchmark::State& st) {
  auto fx = load(kFiles[st.range(0)], static_cast<int>(st.range(1)));
  fx.problem.set_workers(static_cast<int>(st.range(2)));
  for (auto _ : st) benchmark::DoNotOptimize(fx.problem.evaluate(fx.q));
  st.SetLabel(kFiles[st.range(0)]);
  st.counters["workers"] = static_cast<double>(st.range(2));
}

}  // namespace

BENCHMARK(BM_serial)
    ->ArgNames({"scenario", "refine"})
    ->ArgsProduct({{0, 1, 2}, {1, 10}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_openmp)
    ->ArgNames({"scenario", "refine", "workers"})
    ->ArgsProduct({{0, 1, 2}, {1, 10}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
