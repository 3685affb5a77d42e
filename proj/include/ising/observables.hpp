#pragma once

#include <cstddef>
#include <vector>

#include "ising/lattice.hpp"

namespace ising
{

struct ObservableSet
{
    double magnetization_per_spin = 0.0;
    double energy_per_site = 0.0;
    double staggered_magnetization = 0.0;
};

double magnetization_per_spin(const Lattice& lattice) noexcept;
double energy_per_site(const Lattice& lattice, const LatticeSpec& spec);
/// (1/N) sum (-1)^(r+c) s_rc, site (0,0) on the positive sublattice.
double staggered_magnetization(const Lattice& lattice) noexcept;

ObservableSet observe(const Lattice& lattice, const LatticeSpec& spec);

/// Flips every spin with r + c odd. Maps ferromagnetic configurations onto antiferromagnetic ones.
Lattice sublattice_flipped(const Lattice& lattice);

/// Mean and standard error of a correlated series, estimated from non-overlapping batch means.
struct Estimate
{
    double mean = 0.0;
    double standard_error = 0.0;
};

class BatchMeans
{
public:
    /// Samples are grouped into batches of `batch_size` consecutive values.
    explicit BatchMeans(std::size_t batch_size);

    void add(double x);
    std::size_t samples() const noexcept { return count_; }
    std::size_t batches() const noexcept { return batch_means_.size(); }
    /// Mean over all samples; the error comes from the spread of completed batch means (needs >= 2).
    Estimate estimate() const;

private:
    std::size_t batch_size_;
    std::size_t count_ = 0;
    double total_ = 0.0;
    double current_ = 0.0;
    std::size_t in_current_ = 0;
    std::vector<double> batch_means_;
};

} // namespace ising
