#include "ising/lattice.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ising
{

Lattice::Lattice(std::size_t rows, std::size_t cols, Spin fill)
    : rows_(rows), cols_(cols), spins_(rows * cols, fill)
{
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("lattice dimensions must be positive");
}

Lattice::Lattice(std::size_t rows, std::size_t cols, std::vector<Spin> spins)
    : rows_(rows), cols_(cols), spins_(std::move(spins))
{
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("lattice dimensions must be positive");
    if (spins_.size() != rows * cols)
        throw std::invalid_argument("spin count " + std::to_string(spins_.size()) + " does not match " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    for (Spin s : spins_)
        if (s != Spin::Up && s != Spin::Down)
            throw std::invalid_argument("spin values must be -1 or +1");
}

Lattice Lattice::checkerboard(std::size_t rows, std::size_t cols)
{
    Lattice lattice(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            lattice.spins_[r * cols + c] = (r + c) % 2 == 0 ? Spin::Up : Spin::Down;
    return lattice;
}

void Lattice::flip_all() noexcept
{
    for (Spin& s : spins_)
        s = flipped(s);
}

std::string_view to_string(BoundaryCondition bc) noexcept
{
    switch (bc)
    {
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::AntiPeriodic: return "antiperiodic";
    case BoundaryCondition::SkewedPlusMinus: return "skewed";
    }
    return "unknown";
}

BoundaryCondition parse_boundary_condition(std::string_view name)
{
    if (name == "periodic")
        return BoundaryCondition::Periodic;
    if (name == "antiperiodic" || name == "anti-periodic" || name == "anti_periodic")
        return BoundaryCondition::AntiPeriodic;
    if (name == "skewed" || name == "skewed_pm" || name == "skewed-pm")
        return BoundaryCondition::SkewedPlusMinus;
    throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

void LatticeSpec::validate() const
{
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("lattice must be at least 2x2, got " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    if (coupling == 0.0)
        throw std::invalid_argument("coupling must be nonzero");
    if (rows * cols > UINT32_MAX)
        throw std::invalid_argument("lattice too large");
}

std::vector<Bond> bonds(const LatticeSpec& spec)
{
    spec.validate();
    const std::size_t rows = spec.rows;
    const std::size_t cols = spec.cols;
    const double j = spec.coupling;

    std::vector<Bond> out;
    out.reserve(2 * rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
    {
        for (std::size_t c = 0; c < cols; ++c)
        {
            const SiteIndex site = r * cols + c;

            // right neighbour; every topology wraps horizontally
            const bool right_wrap = c + 1 == cols;
            const SiteIndex right = r * cols + (right_wrap ? 0 : c + 1);
            const bool flip_right = right_wrap && spec.boundary == BoundaryCondition::AntiPeriodic;
            out.push_back({site, right, flip_right ? -j : j});

            // down neighbour
            const bool down_wrap = r + 1 == rows;
            if (down_wrap && spec.boundary == BoundaryCondition::SkewedPlusMinus)
                continue;
            const SiteIndex down = (down_wrap ? 0 : r + 1) * cols + c;
            const bool flip_down = down_wrap && spec.boundary == BoundaryCondition::AntiPeriodic;
            out.push_back({site, down, flip_down ? -j : j});
        }
    }
    return out;
}

namespace
{

void require_match(const Lattice& lattice, const LatticeSpec& spec)
{
    if (lattice.rows() != spec.rows || lattice.cols() != spec.cols)
        throw std::invalid_argument("lattice is " + std::to_string(lattice.rows()) + "x" +
                                    std::to_string(lattice.cols()) + " but spec is " + std::to_string(spec.rows) +
                                    "x" + std::to_string(spec.cols));
}

} // namespace

double total_energy(const Lattice& lattice, const LatticeSpec& spec)
{
    require_match(lattice, spec);
    double bond_sum = 0.0;
    for (const Bond& b : bonds(spec))
        bond_sum += b.effective_coupling * value(lattice[b.site_a]) * value(lattice[b.site_b]);
    long spin_sum = 0;
    for (Spin s : lattice.spins())
        spin_sum += value(s);
    return -bond_sum - spec.field * static_cast<double>(spin_sum);
}

double delta_energy(const Lattice& lattice, const LatticeSpec& spec, SiteIndex site)
{
    require_match(lattice, spec);
    if (site >= lattice.size())
        throw std::out_of_range("site " + std::to_string(site) + " out of range for " +
                                std::to_string(lattice.size()) + " sites");
    // Only bonds touching `site` change; scan them directly from the bond list.
    const int s = value(lattice[site]);
    double local = 0.0;
    for (const Bond& b : bonds(spec))
    {
        if (b.site_a == site)
            local += b.effective_coupling * value(lattice[b.site_b]);
        else if (b.site_b == site)
            local += b.effective_coupling * value(lattice[b.site_a]);
    }
    return 2.0 * s * (local + spec.field);
}

NeighborTable::NeighborTable(const LatticeSpec& spec)
    : neighbor_(spec.sites() * max_degree, 0), sign_(spec.sites() * max_degree, 0), degree_(spec.sites(), 0)
{
    const auto add = [&](SiteIndex from, SiteIndex to, int sign) {
        const std::size_t k = degree_[from]++;
        neighbor_[from * max_degree + k] = static_cast<std::uint32_t>(to);
        sign_[from * max_degree + k] = static_cast<std::int8_t>(sign);
    };
    for (const Bond& b : bonds(spec))
    {
        const int sign = (b.effective_coupling > 0) == (spec.coupling > 0) ? 1 : -1;
        add(b.site_a, b.site_b, sign);
        add(b.site_b, b.site_a, sign);
    }
}

void write_snapshot(std::ostream& out, const Lattice& lattice)
{
    out << lattice.rows() << ' ' << lattice.cols() << '\n';
    for (std::size_t r = 0; r < lattice.rows(); ++r)
    {
        for (std::size_t c = 0; c < lattice.cols(); ++c)
        {
            if (c != 0)
                out << ' ';
            out << (lattice.at(r, c) == Spin::Up ? "+1" : "-1");
        }
        out << '\n';
    }
}

Lattice read_snapshot(std::istream& in)
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(in >> rows >> cols) || rows == 0 || cols == 0)
        throw std::runtime_error("snapshot: malformed header");
    std::vector<Spin> spins;
    spins.reserve(rows * cols);
    std::string token;
    while (spins.size() < rows * cols && in >> token)
    {
        if (token == "+1" || token == "1")
            spins.push_back(Spin::Up);
        else if (token == "-1")
            spins.push_back(Spin::Down);
        else
            throw std::runtime_error("snapshot: invalid spin token '" + token + "'");
    }
    if (spins.size() != rows * cols)
        throw std::runtime_error("snapshot: expected " + std::to_string(rows * cols) + " spins, found " +
                                 std::to_string(spins.size()));
    if (in >> token)
        throw std::runtime_error("snapshot: trailing data after " + std::to_string(rows * cols) + " spins");
    return Lattice(rows, cols, std::move(spins));
}

} // namespace ising
