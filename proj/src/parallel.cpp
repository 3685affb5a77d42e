#include "ising/parallel.hpp"

#include <exception>
#include <optional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ising
{

namespace
{

ScanPoint scan_one(const ScanConfig& config, std::size_t index)
{
    const double temperature = config.temperatures[index];
    RngStream rng(derive_seed(config.seed, {index}));
    Lattice lattice = initial_lattice(config.spec, config.start, rng);
    const SweepKernel kernel(config.spec, temperature);
    for (std::size_t s = 0; s < config.thermalization_sweeps; ++s)
        kernel.sweep(lattice, rng);
    return {temperature, measure_equilibrium(lattice, kernel, rng, config.measurement_sweeps, config.batches)};
}

int resolve_threads(int threads) noexcept { return threads > 0 ? threads : max_threads(); }

/// Runs body(i) for i in [0, n) across threads and rethrows the lowest-index failure.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body)
{
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    {
        try
        {
            body(static_cast<std::size_t>(i));
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

int max_threads() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<Lattice> sample_batch(std::span<const SampleJob> jobs, int threads)
{
    std::vector<std::optional<Lattice>> slots(jobs.size());
    parallel_for(jobs.size(), threads,
                 [&](std::size_t i) { slots[i].emplace(sample_microstate(jobs[i].spec, jobs[i].params)); });
    std::vector<Lattice> out;
    out.reserve(jobs.size());
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

std::vector<ScanPoint> temperature_scan(const ScanConfig& config, int threads)
{
    std::vector<ScanPoint> out(config.temperatures.size());
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = scan_one(config, i); });
    return out;
}

double crossing_temperature(std::span<const ScanPoint> scan, double threshold)
{
    for (const ScanPoint& p : scan)
        if (p.estimate.abs_magnetization.mean < threshold)
            return p.temperature;
    return -1.0;
}

namespace reference
{

std::vector<Lattice> sample_batch(std::span<const SampleJob> jobs)
{
    std::vector<Lattice> out;
    out.reserve(jobs.size());
    for (const SampleJob& job : jobs)
        out.push_back(sample_microstate(job.spec, job.params));
    return out;
}

std::vector<ScanPoint> temperature_scan(const ScanConfig& config)
{
    std::vector<ScanPoint> out;
    out.reserve(config.temperatures.size());
    for (std::size_t i = 0; i < config.temperatures.size(); ++i)
        out.push_back(scan_one(config, i));
    return out;
}

} // namespace reference

} // namespace ising
