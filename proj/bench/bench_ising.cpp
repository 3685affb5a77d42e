// Serial reference paths against the optimized / OpenMP-parallel ones.

#include <benchmark/benchmark.h>

#include <vector>

#include "ising/exact.hpp"
#include "ising/metropolis.hpp"
#include "ising/parallel.hpp"

namespace
{

using namespace ising;

const LatticeSpec lattice_100{100, 100, BoundaryCondition::Periodic, 1.0, 0.0};

void BM_SweepKernel(benchmark::State& state)
{
    RngStream rng(1);
    Lattice lattice = hot_start(lattice_100, rng);
    const SweepKernel kernel(lattice_100, 2.27);
    for (auto _ : state)
        kernel.sweep(lattice, rng);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(lattice.size()));
}
BENCHMARK(BM_SweepKernel)->Unit(benchmark::kMicrosecond);

void BM_SweepReference(benchmark::State& state)
{
    RngStream rng(1);
    Lattice lattice = hot_start(lattice_100, rng);
    for (auto _ : state)
        reference::sweep(lattice, lattice_100, 2.27, rng);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(lattice.size()));
}
BENCHMARK(BM_SweepReference)->Unit(benchmark::kMicrosecond);

std::vector<SampleJob> sample_jobs()
{
    std::vector<SampleJob> jobs;
    for (int i = 0; i < 8; ++i)
    {
        SampleJob job{lattice_100, {}};
        job.params.temperature = 0.5 + 0.4 * i;
        job.params.thermalization_sweeps = 100;
        job.params.seed = static_cast<std::uint64_t>(i);
        jobs.push_back(job);
    }
    return jobs;
}

void BM_SampleBatchSerial(benchmark::State& state)
{
    const auto jobs = sample_jobs();
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::sample_batch(jobs));
}
BENCHMARK(BM_SampleBatchSerial)->Unit(benchmark::kMillisecond);

void BM_SampleBatchParallel(benchmark::State& state)
{
    const auto jobs = sample_jobs();
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_batch(jobs, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SampleBatchParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

ScanConfig scan_config()
{
    ScanConfig config;
    config.spec = {32, 32, BoundaryCondition::Periodic, 1.0, 0.0};
    for (int i = 0; i < 8; ++i)
        config.temperatures.push_back(1.8 + 0.1 * i);
    config.thermalization_sweeps = 100;
    config.measurement_sweeps = 400;
    config.batches = 20;
    return config;
}

void BM_TemperatureScanSerial(benchmark::State& state)
{
    const ScanConfig config = scan_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::temperature_scan(config));
}
BENCHMARK(BM_TemperatureScanSerial)->Unit(benchmark::kMillisecond);

void BM_TemperatureScanParallel(benchmark::State& state)
{
    const ScanConfig config = scan_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(temperature_scan(config, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TemperatureScanParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

const LatticeSpec lattice_4x5{4, 5, BoundaryCondition::Periodic, 1.0, 0.0};

void BM_EnumerateReference(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::enumerate(lattice_4x5, 2.5));
}
BENCHMARK(BM_EnumerateReference)->Unit(benchmark::kMillisecond);

void BM_EnumerateParallel(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate(lattice_4x5, 2.5));
}
BENCHMARK(BM_EnumerateParallel)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
