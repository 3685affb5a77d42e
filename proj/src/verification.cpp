#include "ising/verification.hpp"

#include <chrono>
#include <cmath>

namespace ising
{

OracleCheckResult check_oracle_agreement(const OracleCheckConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    OracleCheckResult result;
    result.exact = enumerate(config.spec, config.temperature);
    result.exact_energy_per_site = result.exact.mean_energy / static_cast<double>(config.spec.sites());

    const SweepKernel kernel(config.spec, config.temperature, config.rule);
    RngStream rng(config.seed);
    Lattice lattice = hot_start(config.spec, rng);
    for (std::size_t s = 0; s < config.thermalization_sweeps; ++s)
        kernel.sweep(lattice, rng);
    result.estimate = measure_equilibrium(lattice, kernel, rng, config.measurement_sweeps, config.batches);

    const auto deviation = [](const Estimate& e, double exact) {
        return std::abs(e.mean - exact) / e.standard_error;
    };
    result.energy_deviation = deviation(result.estimate.energy_per_site, result.exact_energy_per_site);
    result.abs_m_deviation = deviation(result.estimate.abs_magnetization, result.exact.mean_abs_magnetization);
    result.passed = result.energy_deviation < config.tolerance_standard_errors &&
                    result.abs_m_deviation < config.tolerance_standard_errors;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace ising
