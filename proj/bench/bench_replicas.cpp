// Serial reference vs OpenMP replica kernels on the two hot paths: quenched
// exit solves (one environment per replica) and exit-time walks.

#include <benchmark/benchmark.h>

#include "rwre/parallel.hpp"
#include "rwre/solver.hpp"
#include "rwre/walk.hpp"

namespace {

using namespace rwre;

const EnvironmentLaw kLaw = EnvironmentLaw::dirichlet({2, 1, 1, 1});

double solve_replica(std::size_t r) {
    RealizedEnvironment env(kLaw, derive_seed(1, r, 0));
    const auto box = Region::box_symmetric(Direction::axis(2, 0), 10, 10);
    return quenched_exit_probabilities(box, env).probability(Site{}, BoundaryClass::Front);
}

double walk_replica(std::size_t r) {
    RealizedEnvironment env(kLaw, derive_seed(2, r, 0));
    SplitMix64 rng(derive_seed(2, r, 1));
    const Region box = Region::box_symmetric(Direction::axis(2, 0), 12, 12);
    double front = 0.0;
    for (int w = 0; w < 200; ++w) front += run_until_exit(env, box, Site{}, rng, 1'000'000).boundary == BoundaryClass::Front;
    return front;
}

void BM_SolveSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_replicas_serial<double>(32, solve_replica));
}

void BM_SolveParallel(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(map_replicas<double>(32, workers, solve_replica));
}

void BM_WalkSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_replicas_serial<double>(32, walk_replica));
}

void BM_WalkParallel(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(map_replicas<double>(32, workers, walk_replica));
}

}  // namespace

BENCHMARK(BM_SolveSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WalkSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WalkParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
