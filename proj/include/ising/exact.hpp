#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ising/lattice.hpp"

namespace ising
{

/// Onsager's critical temperature of the infinite square lattice, 2 / ln(1 + sqrt 2), in units of J/k_B.
inline constexpr double critical_temperature = 2.2691853142130216;

/// Enumeration is refused above this many spins (2^24 states).
inline constexpr std::size_t max_enumeration_sites = 24;

struct ExactThermodynamics
{
    double partition_function = 0.0; // may overflow to inf at very low T; log_partition_function does not
    double log_partition_function = 0.0;
    double mean_energy = 0.0;
    double mean_abs_magnetization = 0.0;
};

struct GroundStates
{
    double min_energy = 0.0;
    std::uint64_t degeneracy = 0;
};

/// Exact canonical averages by summing over all 2^N states.
///
/// Weights are accumulated relative to the lowest energy seen so far, so nothing overflows at low T.
/// The state range is split into fixed chunks reduced in a fixed order, so the result does not depend
/// on the OpenMP thread count.
/// Throws std::invalid_argument for N > max_enumeration_sites or temperature <= 0.
ExactThermodynamics enumerate(const LatticeSpec& spec, double temperature);

/// Minimum energy and the number of states attaining it.
GroundStates ground_states(const LatticeSpec& spec);

/// Energy level -> number of states. Levels closer than 1e-9 are merged.
std::map<double, std::uint64_t> energy_levels(const LatticeSpec& spec);

namespace reference
{

/// Single-threaded two-pass enumeration through Lattice and total_energy. Slow; for cross-checks.
ExactThermodynamics enumerate(const LatticeSpec& spec, double temperature);
GroundStates ground_states(const LatticeSpec& spec);

} // namespace reference

/// Golden-value rows, CSV `spec_id,temperature,Z,mean_energy,mean_abs_m`.
struct GoldenRow
{
    std::string spec_id;
    double temperature = 0.0;
    double partition_function = 0.0;
    double mean_energy = 0.0;
    double mean_abs_magnetization = 0.0;
};

/// e.g. "4x4_periodic_J+1_B0"
std::string spec_id(const LatticeSpec& spec);

void write_golden(std::ostream& out, const std::vector<GoldenRow>& rows);
std::vector<GoldenRow> read_golden(std::istream& in);

} // namespace ising
