#pragma once

#include <cstddef>
#include <cstdint>

#include "ising/exact.hpp"
#include "ising/lattice.hpp"
#include "ising/metropolis.hpp"

namespace ising
{

/// Metropolis estimates of <E>/N and <|m|> against exact enumeration on a tiny lattice.
struct OracleCheckConfig
{
    LatticeSpec spec{4, 4, BoundaryCondition::Periodic, 1.0, 0.0};
    double temperature = 2.5;
    std::size_t thermalization_sweeps = 2000;
    std::size_t measurement_sweeps = 200000;
    std::size_t batches = 100;
    std::uint64_t seed = 2500;
    double tolerance_standard_errors = 3.0;
    AcceptanceRule rule = &acceptance_probability;
};

struct OracleCheckResult
{
    ExactThermodynamics exact;
    EquilibriumEstimate estimate;
    double exact_energy_per_site = 0.0;
    double energy_deviation = 0.0; // in standard errors
    double abs_m_deviation = 0.0;
    bool passed = false;
    double seconds = 0.0;
};

OracleCheckResult check_oracle_agreement(const OracleCheckConfig& config = {});

} // namespace ising
