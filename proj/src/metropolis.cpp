#include "ising/metropolis.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ising
{

void SimulationParams::validate() const
{
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("temperature must be finite and >= 0, got " + std::to_string(temperature));
    if (measurement_interval_sweeps == 0)
        throw std::invalid_argument("measurement interval must be positive");
}

double acceptance_probability(double delta_e, double temperature) noexcept
{
    if (delta_e <= 0.0)
        return 1.0;
    if (temperature <= 0.0)
        return 0.0;
    return std::exp(-delta_e / temperature);
}

SweepKernel::SweepKernel(const LatticeSpec& spec, double temperature, AcceptanceRule rule)
    : spec_(spec), temperature_(temperature), table_(spec)
{
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("temperature must be finite and >= 0");
    for (int up = 0; up < 2; ++up)
    {
        const int s = up ? 1 : -1;
        for (int k = -4; k <= 4; ++k)
        {
            const double de = 2.0 * s * (spec_.coupling * k + spec_.field);
            delta_[up][k + 4] = de;
            accept_[up][k + 4] = rule(de, temperature);
        }
    }
}

int SweepKernel::local_sum(const Lattice& lattice, SiteIndex site) const noexcept
{
    const std::size_t degree = table_.degree(site);
    int k = 0;
    for (std::size_t n = 0; n < degree; ++n)
        k += table_.sign(site, n) * value(lattice[table_.neighbor(site, n)]);
    return k;
}

double SweepKernel::delta_energy(const Lattice& lattice, SiteIndex site) const noexcept
{
    return delta_[lattice[site] == Spin::Up][local_sum(lattice, site) + 4];
}

double SweepKernel::total_energy(const Lattice& lattice) const noexcept
{
    long pair_sum = 0; // each bond counted from both ends
    long spin_sum = 0;
    for (SiteIndex site = 0; site < lattice.size(); ++site)
    {
        const int s = value(lattice[site]);
        pair_sum += s * local_sum(lattice, site);
        spin_sum += s;
    }
    return -spec_.coupling * static_cast<double>(pair_sum / 2) - spec_.field * static_cast<double>(spin_sum);
}

bool SweepKernel::try_flip(Lattice& lattice, SiteIndex site, RngStream& rng) const
{
    const int up = lattice[site] == Spin::Up;
    const int idx = local_sum(lattice, site) + 4;
    if (delta_[up][idx] > 0.0 && !(rng.uniform() < accept_[up][idx]))
        return false;
    lattice.flip(site);
    return true;
}

bool SweepKernel::step(Lattice& lattice, RngStream& rng) const
{
    const auto site = static_cast<SiteIndex>(rng.below(lattice.size()));
    return try_flip(lattice, site, rng);
}

std::size_t SweepKernel::sweep(Lattice& lattice, RngStream& rng) const
{
    // Hot loop: raw views instead of the per-site accessors.
    const std::size_t n = lattice.size();
    Spin* spins = lattice.spins().data();
    const std::uint32_t* nb = table_.neighbors().data();
    const std::int8_t* sg = table_.signs().data();
    std::size_t accepted = 0;
    for (std::size_t p = 0; p < n; ++p)
    {
        const auto site = static_cast<std::size_t>(rng.below(n));
        const std::size_t base = site * NeighborTable::max_degree;
        int k = 0;
        for (std::size_t j = 0; j < table_.degree(site); ++j)
            k += sg[base + j] * value(spins[nb[base + j]]);
        const int up = spins[site] == Spin::Up;
        if (delta_[up][k + 4] > 0.0 && !(rng.uniform() < accept_[up][k + 4]))
            continue;
        spins[site] = flipped(spins[site]);
        ++accepted;
    }
    return accepted;
}

Lattice hot_start(const LatticeSpec& spec, RngStream& rng)
{
    spec.validate();
    std::vector<Spin> spins(spec.sites());
    for (Spin& s : spins)
        s = rng.bit() ? Spin::Up : Spin::Down;
    return Lattice(spec.rows, spec.cols, std::move(spins));
}

Lattice ordered_start(const LatticeSpec& spec, RngStream& rng)
{
    spec.validate();
    const bool flip = rng.bit();
    Lattice lattice = spec.coupling > 0 ? Lattice(spec.rows, spec.cols, Spin::Up)
                                        : Lattice::checkerboard(spec.rows, spec.cols);
    if (flip)
        lattice.flip_all();
    return lattice;
}

Lattice initial_lattice(const LatticeSpec& spec, StartState start, RngStream& rng)
{
    switch (start)
    {
    case StartState::Ordered: return ordered_start(spec, rng);
    case StartState::Hot: return hot_start(spec, rng);
    case StartState::Cold: spec.validate(); return Lattice(spec.rows, spec.cols, Spin::Up);
    }
    throw std::invalid_argument("unknown start state");
}

bool metropolis_step(Lattice& lattice, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng)
{
    return SweepKernel(spec, params.temperature).step(lattice, rng);
}

std::size_t sweep(Lattice& lattice, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng)
{
    return SweepKernel(spec, params.temperature).sweep(lattice, rng);
}

RunRecord thermalize(Lattice initial, const LatticeSpec& spec, const SimulationParams& params, RngStream& rng)
{
    params.validate();
    if (initial.rows() != spec.rows || initial.cols() != spec.cols)
        throw std::invalid_argument("initial lattice does not match spec dimensions");
    const SweepKernel kernel(spec, params.temperature);
    RunRecord record{params, spec, {}, std::move(initial)};
    record.trace.reserve(params.thermalization_sweeps);
    const auto n = static_cast<double>(spec.sites());
    for (std::size_t s = 1; s <= params.thermalization_sweeps; ++s)
    {
        kernel.sweep(record.final_lattice, rng);
        record.trace.push_back(
            {s, magnetization_per_spin(record.final_lattice), kernel.total_energy(record.final_lattice) / n});
    }
    return record;
}

Lattice sample_microstate(const LatticeSpec& spec, const SimulationParams& params)
{
    params.validate();
    RngStream rng(params.seed);
    Lattice lattice = initial_lattice(spec, params.start, rng);
    const SweepKernel kernel(spec, params.temperature);
    for (std::size_t s = 0; s < params.thermalization_sweeps; ++s)
        kernel.sweep(lattice, rng);
    return lattice;
}

Lattice sample_microstate(const LatticeSpec& spec, double temperature, std::uint64_t seed)
{
    SimulationParams params;
    params.temperature = temperature;
    params.seed = seed;
    return sample_microstate(spec, params);
}

EquilibriumEstimate measure_equilibrium(Lattice& lattice, const SweepKernel& kernel, RngStream& rng,
                                        std::size_t sweeps, std::size_t batches)
{
    if (batches < 2 || sweeps < batches)
        throw std::invalid_argument("need at least two batches and one sweep per batch");
    const std::size_t batch_size = sweeps / batches;
    BatchMeans energy(batch_size);
    BatchMeans abs_m(batch_size);
    BatchMeans abs_ms(batch_size);
    const auto n = static_cast<double>(lattice.size());
    for (std::size_t s = 0; s < batch_size * batches; ++s)
    {
        kernel.sweep(lattice, rng);
        energy.add(kernel.total_energy(lattice) / n);
        abs_m.add(std::abs(magnetization_per_spin(lattice)));
        abs_ms.add(std::abs(staggered_magnetization(lattice)));
    }
    return {energy.estimate(), abs_m.estimate(), abs_ms.estimate()};
}

void write_trace(std::ostream& out, const std::vector<TracePoint>& trace, char delimiter)
{
    out << "sweep" << delimiter << "magnetization_per_spin" << delimiter << "energy_per_site\n";
    const auto old_precision = out.precision(17);
    for (const TracePoint& p : trace)
        out << p.sweep << delimiter << p.magnetization_per_spin << delimiter << p.energy_per_site << '\n';
    out.precision(old_precision);
}

std::vector<TracePoint> read_trace(std::istream& in)
{
    std::vector<TracePoint> trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (!header_seen)
        {
            header_seen = true;
            if (line.rfind("sweep", 0) == 0)
                continue;
        }
        for (char& ch : line)
            if (ch == ',' || ch == '\t')
                ch = ' ';
        std::istringstream fields(line);
        TracePoint p{};
        std::string extra;
        if (!(fields >> p.sweep >> p.magnetization_per_spin >> p.energy_per_site) || (fields >> extra))
            throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 3 numeric columns");
        trace.push_back(p);
    }
    return trace;
}

namespace reference
{

bool metropolis_step(Lattice& lattice, const LatticeSpec& spec, double temperature, RngStream& rng)
{
    const auto site = static_cast<SiteIndex>(rng.below(lattice.size()));
    const double de = ising::delta_energy(lattice, spec, site);
    if (de > 0.0 && !(rng.uniform() < acceptance_probability(de, temperature)))
        return false;
    lattice.flip(site);
    return true;
}

std::size_t sweep(Lattice& lattice, const LatticeSpec& spec, double temperature, RngStream& rng)
{
    std::size_t accepted = 0;
    for (std::size_t p = 0; p < lattice.size(); ++p)
        accepted += metropolis_step(lattice, spec, temperature, rng) ? 1 : 0;
    return accepted;
}

} // namespace reference

} // namespace ising
