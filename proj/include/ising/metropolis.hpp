#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/observables.hpp"
#include "ising/rng.hpp"

namespace ising
{

enum class StartState
{
    /// Ground-state pattern of the coupling sign (uniform for J > 0, checkerboard for J < 0), with the
    /// global sign drawn from the stream. Equilibrates in far fewer sweeps than Hot below T_c.
    Ordered,
    /// Each spin independently +1/-1 with probability 1/2.
    Hot,
    /// All spins up.
    Cold,
};

/// Temperature is in units of J/k_B (k_B = 1).
struct SimulationParams
{
    double temperature = 2.27;
    std::size_t thermalization_sweeps = 750;
    std::size_t measurement_interval_sweeps = 500;
    std::uint64_t seed = 0;
    StartState start = StartState::Ordered;

    /// Throws std::invalid_argument for negative or non-finite temperature, or a zero interval.
    void validate() const;
};

struct TracePoint
{
    std::size_t sweep; // 1-based: state after this many sweeps
    double magnetization_per_spin;
    double energy_per_site;
};

struct RunRecord
{
    SimulationParams params;
    LatticeSpec spec;
    std::vector<TracePoint> trace;
    Lattice final_lattice;
};

/// min(1, exp(-dE/T)); for T = 0 moves with dE <= 0 are accepted and uphill moves never are.
double acceptance_probability(double delta_e, double temperature) noexcept;

using AcceptanceRule = double (*)(double delta_e, double temperature);

/// Single-flip Metropolis kernel for one (spec, temperature) pair.
///
/// Holds the adjacency and a table of acceptance probabilities indexed by the flipped spin and the
/// signed neighbour sum, so a proposal costs one site draw, at most four loads and, only when the move
/// is uphill (dE > 0), one uniform variate.
class SweepKernel
{
public:
    SweepKernel(const LatticeSpec& spec, double temperature, AcceptanceRule rule = &acceptance_probability);

    const LatticeSpec& spec() const noexcept { return spec_; }
    double temperature() const noexcept { return temperature_; }

    bool step(Lattice& lattice, RngStream& rng) const;
    /// Attempts the flip of a given site; the same accept rule as step() without the site draw.
    bool try_flip(Lattice& lattice, SiteIndex site, RngStream& rng) const;
    /// rows * cols proposals; returns the number accepted.
    std::size_t sweep(Lattice& lattice, RngStream& rng) const;

    double delta_energy(const Lattice& lattice, SiteIndex site) const noexcept;
    double total_energy(const Lattice& lattice) const noexcept;

private:
    int local_sum(const Lattice& lattice, SiteIndex site) const noexcept;

    LatticeSpec spec_;
    double temperature_;
    NeighborTable table_;
    // [spin == Up][neighbour sum + 4]
    std::array<std::array<double, 9>, 2> delta_{};
    std::array<std::array<double, 9>, 2> accept_{};
};

/// Each spin independently +1/-1 with probability 1/2.
Lattice hot_start(const LatticeSpec& spec, RngStream& rng);
/// Consumes exactly one draw (the global sign).
Lattice ordered_start(const LatticeSpec& spec, RngStream& rng);
Lattice initial_lattice(const LatticeSpec& spec, StartState start, RngStream& rng);

bool metropolis_step(Lattice& lattice, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng);
std::size_t sweep(Lattice& lattice, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng);

/// Runs params.thermalization_sweeps sweeps from `initial`, tracing magnetization and energy after each.
RunRecord thermalize(Lattice initial, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng);

/// Initial state drawn from `seed` (ordered start), then the default 750-sweep thermalization, all from one
/// stream. Deterministic in its arguments.
Lattice sample_microstate(const LatticeSpec& spec, double temperature, std::uint64_t seed);
/// Same, with temperature, sweep count, seed and start state taken from `params`.
Lattice sample_microstate(const LatticeSpec& spec, const SimulationParams& params);

/// Equilibrium averages over `sweeps` sweeps, one sample after each sweep.
struct EquilibriumEstimate
{
    Estimate energy_per_site;
    Estimate abs_magnetization;
    Estimate abs_staggered_magnetization;
};

EquilibriumEstimate measure_equilibrium(Lattice& lattice, const SweepKernel& kernel, RngStream& rng,
                                        std::size_t sweeps, std::size_t batches = 100);

/// Trace CSV: header `sweep,magnetization_per_spin,energy_per_site`, one row per sweep.
void write_trace(std::ostream& out, const std::vector<TracePoint>& trace, char delimiter = ',');
/// Accepts comma, tab or whitespace delimited rows; throws std::runtime_error on malformed input.
std::vector<TracePoint> read_trace(std::istream& in);

namespace reference
{

/// Unoptimized single-flip path built directly on ising::delta_energy and acceptance_probability.
/// Follows the same RNG consumption rule as SweepKernel, so trajectories agree bit for bit.
bool metropolis_step(Lattice& lattice, const LatticeSpec& spec, double temperature, RngStream& rng);
std::size_t sweep(Lattice& lattice, const LatticeSpec& spec, double temperature, RngStream& rng);

} // namespace reference

} // namespace ising
