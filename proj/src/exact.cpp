#include "ising/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ising
{

namespace
{

void require_enumerable(const LatticeSpec& spec)
{
    spec.validate();
    if (spec.sites() > max_enumeration_sites)
        throw std::invalid_argument("exact enumeration limited to " + std::to_string(max_enumeration_sites) +
                                    " spins, spec has " + std::to_string(spec.sites()));
}

void require_positive_temperature(double temperature)
{
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("exact enumeration needs a finite temperature > 0");
}

/// Bit i of the state word set <=> spin i is up.
class StateEnergy
{
public:
    explicit StateEnergy(const LatticeSpec& spec) : spec_(spec), sites_(static_cast<int>(spec.sites()))
    {
        for (const Bond& b : bonds(spec))
        {
            const bool same_sign = (b.effective_coupling > 0) == (spec.coupling > 0);
            (same_sign ? plus_ : minus_).push_back({static_cast<int>(b.site_a), static_cast<int>(b.site_b)});
        }
    }

    double operator()(std::uint32_t state) const noexcept
    {
        const int unsatisfied_plus = unsatisfied(plus_, state);
        const int unsatisfied_minus = unsatisfied(minus_, state);
        const int bond_plus = static_cast<int>(plus_.size()) - 2 * unsatisfied_plus;
        const int bond_minus = static_cast<int>(minus_.size()) - 2 * unsatisfied_minus;
        const int spin_sum = 2 * std::popcount(state) - sites_;
        return -spec_.coupling * static_cast<double>(bond_plus - bond_minus) -
               spec_.field * static_cast<double>(spin_sum);
    }

    double abs_magnetization(std::uint32_t state) const noexcept
    {
        return std::abs(2 * std::popcount(state) - sites_) / static_cast<double>(sites_);
    }

private:
    struct Pair
    {
        int a;
        int b;
    };

    static int unsatisfied(const std::vector<Pair>& pairs, std::uint32_t state) noexcept
    {
        int count = 0;
        for (const Pair& p : pairs)
            count += static_cast<int>(((state >> p.a) ^ (state >> p.b)) & 1U);
        return count;
    }

    LatticeSpec spec_;
    int sites_;
    std::vector<Pair> plus_;
    std::vector<Pair> minus_;
};

/// Weighted sums relative to a shift energy: sum_w = sum exp(-(E - shift)/T).
struct ShiftedSums
{
    double shift = std::numeric_limits<double>::infinity();
    double sum_w = 0.0;
    double sum_ew = 0.0;
    double sum_mw = 0.0;

    void rebase(double new_shift, double temperature)
    {
        if (new_shift >= shift)
            return;
        if (std::isfinite(shift))
        {
            const double factor = std::exp(-(shift - new_shift) / temperature);
            sum_w *= factor;
            sum_ew *= factor;
            sum_mw *= factor;
        }
        shift = new_shift;
    }

    void add(double energy, double abs_m, double temperature)
    {
        rebase(energy, temperature);
        const double w = std::exp(-(energy - shift) / temperature);
        sum_w += w;
        sum_ew += energy * w;
        sum_mw += abs_m * w;
    }

    void merge(ShiftedSums other, double temperature)
    {
        if (!std::isfinite(other.shift))
            return;
        rebase(other.shift, temperature);
        other.rebase(shift, temperature);
        sum_w += other.sum_w;
        sum_ew += other.sum_ew;
        sum_mw += other.sum_mw;
    }

    ExactThermodynamics finish(double temperature) const
    {
        ExactThermodynamics out;
        out.log_partition_function = -shift / temperature + std::log(sum_w);
        out.partition_function = std::exp(out.log_partition_function);
        out.mean_energy = sum_ew / sum_w;
        out.mean_abs_magnetization = sum_mw / sum_w;
        return out;
    }
};

constexpr std::uint64_t chunk_count = 256;

bool same_level(double a, double b) noexcept { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)); }

} // namespace

ExactThermodynamics enumerate(const LatticeSpec& spec, double temperature)
{
    require_enumerable(spec);
    require_positive_temperature(temperature);
    const StateEnergy energy(spec);
    const std::uint64_t states = std::uint64_t{1} << spec.sites();
    const std::uint64_t chunks = std::min(chunk_count, states);
    std::vector<ShiftedSums> partial(chunks);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c)
    {
        const std::uint64_t begin = states * static_cast<std::uint64_t>(c) / chunks;
        const std::uint64_t end = states * (static_cast<std::uint64_t>(c) + 1) / chunks;
        ShiftedSums local;
        for (std::uint64_t x = begin; x < end; ++x)
        {
            const auto state = static_cast<std::uint32_t>(x);
            local.add(energy(state), energy.abs_magnetization(state), temperature);
        }
        partial[static_cast<std::size_t>(c)] = local;
    }

    ShiftedSums total;
    for (const ShiftedSums& p : partial)
        total.merge(p, temperature);
    return total.finish(temperature);
}

GroundStates ground_states(const LatticeSpec& spec)
{
    require_enumerable(spec);
    const StateEnergy energy(spec);
    const std::uint64_t states = std::uint64_t{1} << spec.sites();
    const std::uint64_t chunks = std::min(chunk_count, states);
    std::vector<GroundStates> partial(chunks, {std::numeric_limits<double>::infinity(), 0});

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c)
    {
        const std::uint64_t begin = states * static_cast<std::uint64_t>(c) / chunks;
        const std::uint64_t end = states * (static_cast<std::uint64_t>(c) + 1) / chunks;
        GroundStates local{std::numeric_limits<double>::infinity(), 0};
        for (std::uint64_t x = begin; x < end; ++x)
        {
            const double e = energy(static_cast<std::uint32_t>(x));
            if (same_level(e, local.min_energy))
                ++local.degeneracy;
            else if (e < local.min_energy)
                local = {e, 1};
        }
        partial[static_cast<std::size_t>(c)] = local;
    }

    GroundStates best{std::numeric_limits<double>::infinity(), 0};
    for (const GroundStates& p : partial)
    {
        if (same_level(p.min_energy, best.min_energy))
            best.degeneracy += p.degeneracy;
        else if (p.min_energy < best.min_energy)
            best = p;
    }
    return best;
}

std::map<double, std::uint64_t> energy_levels(const LatticeSpec& spec)
{
    require_enumerable(spec);
    const StateEnergy energy(spec);
    const std::uint64_t states = std::uint64_t{1} << spec.sites();
    std::map<double, std::uint64_t> levels;
    for (std::uint64_t x = 0; x < states; ++x)
    {
        const double e = energy(static_cast<std::uint32_t>(x));
        auto it = levels.lower_bound(e - 1e-9 * (1.0 + std::abs(e)));
        if (it != levels.end() && same_level(it->first, e))
            ++it->second;
        else
            levels.emplace(e, 1);
    }
    return levels;
}

namespace reference
{

namespace
{

Lattice lattice_from_bits(const LatticeSpec& spec, std::uint64_t bits)
{
    std::vector<Spin> spins(spec.sites());
    for (std::size_t i = 0; i < spins.size(); ++i)
        spins[i] = ((bits >> i) & 1U) != 0 ? Spin::Up : Spin::Down;
    return Lattice(spec.rows, spec.cols, std::move(spins));
}

} // namespace

ExactThermodynamics enumerate(const LatticeSpec& spec, double temperature)
{
    require_enumerable(spec);
    require_positive_temperature(temperature);
    const std::uint64_t states = std::uint64_t{1} << spec.sites();

    std::vector<double> energies(states);
    std::vector<double> abs_m(states);
    for (std::uint64_t x = 0; x < states; ++x)
    {
        const Lattice lattice = lattice_from_bits(spec, x);
        energies[x] = total_energy(lattice, spec);
        long sum = 0;
        for (Spin s : lattice.spins())
            sum += value(s);
        abs_m[x] = std::abs(static_cast<double>(sum)) / static_cast<double>(lattice.size());
    }
    const double e_min = *std::min_element(energies.begin(), energies.end());

    double z = 0.0;
    double ez = 0.0;
    double mz = 0.0;
    for (std::uint64_t x = 0; x < states; ++x)
    {
        const double w = std::exp(-(energies[x] - e_min) / temperature);
        z += w;
        ez += energies[x] * w;
        mz += abs_m[x] * w;
    }
    ExactThermodynamics out;
    out.log_partition_function = std::log(z) - e_min / temperature;
    out.partition_function = std::exp(out.log_partition_function);
    out.mean_energy = ez / z;
    out.mean_abs_magnetization = mz / z;
    return out;
}

GroundStates ground_states(const LatticeSpec& spec)
{
    require_enumerable(spec);
    const std::uint64_t states = std::uint64_t{1} << spec.sites();
    GroundStates best{std::numeric_limits<double>::infinity(), 0};
    for (std::uint64_t x = 0; x < states; ++x)
    {
        const double e = total_energy(lattice_from_bits(spec, x), spec);
        if (same_level(e, best.min_energy))
            ++best.degeneracy;
        else if (e < best.min_energy)
            best = {e, 1};
    }
    return best;
}

} // namespace reference

std::string spec_id(const LatticeSpec& spec)
{
    std::ostringstream out;
    out << spec.rows << 'x' << spec.cols << '_' << to_string(spec.boundary) << "_J" << std::showpos << spec.coupling
        << std::noshowpos << "_B" << spec.field;
    return out.str();
}

void write_golden(std::ostream& out, const std::vector<GoldenRow>& rows)
{
    out << "spec_id,temperature,Z,mean_energy,mean_abs_m\n";
    const auto old_precision = out.precision(17);
    for (const GoldenRow& r : rows)
        out << r.spec_id << ',' << r.temperature << ',' << r.partition_function << ',' << r.mean_energy << ','
            << r.mean_abs_magnetization << '\n';
    out.precision(old_precision);
}

std::vector<GoldenRow> read_golden(std::istream& in)
{
    std::vector<GoldenRow> rows;
    std::string line;
    std::getline(in, line);
    if (line.rfind("spec_id,", 0) != 0)
        throw std::runtime_error("golden file: missing header");
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::istringstream fields(line);
        GoldenRow r;
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(fields, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 5)
            throw std::runtime_error("golden file: expected 5 columns in '" + line + "'");
        r.spec_id = cells[0];
        r.temperature = std::stod(cells[1]);
        r.partition_function = std::stod(cells[2]);
        r.mean_energy = std::stod(cells[3]);
        r.mean_abs_magnetization = std::stod(cells[4]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace ising
