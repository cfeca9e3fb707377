// Serial reference vs OpenMP kernels: unit-disc link computation and sweep cells.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pdtora/radio.hpp"
#include "pdtora/sweep.hpp"

using namespace pdtora;

namespace {

std::vector<Vec2> random_positions(std::size_t n)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(0.0, 670.0);
    std::vector<Vec2> out(n);
    for (auto &p : out)
        p = {coord(rng), coord(rng)};
    return out;
}

template <Adjacency (*Kernel)(std::span<const Vec2>, std::span<const std::uint8_t>, double)>
void BM_links(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto pos = random_positions(n);
    const std::vector<std::uint8_t> alive(n, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(Kernel(pos, alive, 250.0));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}

SweepSpec small_sweep()
{
    SweepSpec s;
    s.base.sim_end_ms = 20000.0;
    s.values = {10.0, 50.0};
    s.seeds = 2;
    return s;
}

void BM_sweep_serial(benchmark::State &state)
{
    const auto spec = small_sweep();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_sweep_serial(spec));
}

void BM_sweep_parallel(benchmark::State &state)
{
    const auto spec = small_sweep();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_sweep(spec));
}

} // namespace

BENCHMARK(BM_links<unit_disc_links>)->Name("links/serial")->RangeMultiplier(4)->Range(50, 3200)->Complexity();
BENCHMARK(BM_links<unit_disc_links_parallel>)
    ->Name("links/parallel")
    ->RangeMultiplier(4)
    ->Range(50, 3200)
    ->Complexity();
BENCHMARK(BM_sweep_serial)->Name("sweep/serial")->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);
BENCHMARK(BM_sweep_parallel)->Name("sweep/parallel")->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);

BENCHMARK_MAIN();
