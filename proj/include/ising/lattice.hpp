#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ising
{

/// A single Ising spin. Only the two enumerators are ever produced by this library.
enum class Spin : std::int8_t
{
    Down = -1,
    Up = 1,
};

constexpr int value(Spin s) noexcept { return static_cast<int>(s); }
constexpr Spin flipped(Spin s) noexcept { return s == Spin::Up ? Spin::Down : Spin::Up; }

using SiteIndex = std::size_t;

/// Row-major grid of spins; site = r * cols + c.
class Lattice
{
public:
    Lattice(std::size_t rows, std::size_t cols, Spin fill = Spin::Up);
    Lattice(std::size_t rows, std::size_t cols, std::vector<Spin> spins);

    static Lattice checkerboard(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return spins_.size(); }

    Spin operator[](SiteIndex site) const noexcept { return spins_[site]; }
    Spin at(std::size_t r, std::size_t c) const { return spins_.at(r * cols_ + c); }

    void set(SiteIndex site, Spin s) { spins_.at(site) = s; }
    void flip(SiteIndex site) noexcept { spins_[site] = flipped(spins_[site]); }
    void flip_all() noexcept;

    std::span<const Spin> spins() const noexcept { return spins_; }
    std::span<Spin> spins() noexcept { return spins_; }

    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Spin> spins_;
};

enum class BoundaryCondition
{
    Periodic,
    AntiPeriodic,
    SkewedPlusMinus,
};

std::string_view to_string(BoundaryCondition bc) noexcept;
/// Accepts "periodic", "antiperiodic"/"anti-periodic", "skewed"/"skewed_pm". Throws std::invalid_argument.
BoundaryCondition parse_boundary_condition(std::string_view name);

struct LatticeSpec
{
    std::size_t rows = 100;
    std::size_t cols = 100;
    BoundaryCondition boundary = BoundaryCondition::Periodic;
    double coupling = 1.0;
    double field = 0.0;

    std::size_t sites() const noexcept { return rows * cols; }

    /// Throws std::invalid_argument on rows < 2, cols < 2 or zero coupling.
    void validate() const;

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

struct Bond
{
    SiteIndex site_a;
    SiteIndex site_b;
    double effective_coupling;
};

/// Complete bond list for the topology, each physical bond once.
///
/// Periodic: right and down bonds with wraparound, all carrying J.
/// AntiPeriodic: same topology; bonds crossing the right or bottom wrap carry -J.
/// SkewedPlusMinus: horizontal bonds wrap with +J, vertical bonds are open (no bottom-to-top bond).
///
/// On 2-wide lattices the wrap bond duplicates the interior bond and both are emitted.
std::vector<Bond> bonds(const LatticeSpec& spec);

/// -sum_bonds J_ab s_a s_b - B sum_i s_i
double total_energy(const Lattice& lattice, const LatticeSpec& spec);

/// H(lattice with `site` flipped) - H(lattice), from the bonds incident to `site` only.
double delta_energy(const Lattice& lattice, const LatticeSpec& spec, SiteIndex site);

/// Per-site adjacency derived from bonds(); used by delta_energy and the sweep kernels.
class NeighborTable
{
public:
    static constexpr std::size_t max_degree = 4;

    explicit NeighborTable(const LatticeSpec& spec);

    std::size_t sites() const noexcept { return degree_.size(); }
    std::size_t degree(SiteIndex site) const noexcept { return degree_[site]; }
    SiteIndex neighbor(SiteIndex site, std::size_t k) const noexcept { return neighbor_[site * max_degree + k]; }
    /// Sign of the effective coupling relative to the spec coupling: +1 or -1.
    int sign(SiteIndex site, std::size_t k) const noexcept { return sign_[site * max_degree + k]; }

    std::span<const std::uint32_t> neighbors() const noexcept { return neighbor_; }
    std::span<const std::int8_t> signs() const noexcept { return sign_; }

private:
    std::vector<std::uint32_t> neighbor_;
    std::vector<std::int8_t> sign_;
    std::vector<std::uint8_t> degree_;
};

/// Snapshot text format: "rows cols" header, then one line per row of +1/-1 tokens.
void write_snapshot(std::ostream& out, const Lattice& lattice);
Lattice read_snapshot(std::istream& in);

} // namespace ising
