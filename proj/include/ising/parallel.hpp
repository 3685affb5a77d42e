#pragma once

// Job-parallel drivers. Every job owns its lattice and RNG stream, so results are identical for any
// thread count; the serial versions under ising::reference are kept for equivalence tests and benchmarks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/metropolis.hpp"

namespace ising
{

struct SampleJob
{
    LatticeSpec spec;
    SimulationParams params; // temperature, thermalization_sweeps and seed are used
};

/// sample_microstate for every job. threads = 0 uses the OpenMP default.
std::vector<Lattice> sample_batch(std::span<const SampleJob> jobs, int threads = 0);

struct ScanConfig
{
    LatticeSpec spec;
    std::vector<double> temperatures;
    std::size_t thermalization_sweeps = 1000;
    std::size_t measurement_sweeps = 4000;
    std::size_t batches = 40;
    std::uint64_t seed = 0;
    StartState start = StartState::Cold;
};

struct ScanPoint
{
    double temperature;
    EquilibriumEstimate estimate;
};

/// Independent equilibrium run per temperature, seeded with derive_seed(seed, {index}).
std::vector<ScanPoint> temperature_scan(const ScanConfig& config, int threads = 0);

/// First scanned temperature whose <|m|> falls below `threshold`; negative if none does.
double crossing_temperature(std::span<const ScanPoint> scan, double threshold);

/// Number of threads OpenMP would use (1 when built without OpenMP).
int max_threads() noexcept;

namespace reference
{

std::vector<Lattice> sample_batch(std::span<const SampleJob> jobs);
std::vector<ScanPoint> temperature_scan(const ScanConfig& config);

} // namespace reference

} // namespace ising
