#include "ising/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace ising
{

double magnetization_per_spin(const Lattice& lattice) noexcept
{
    long sum = 0;
    for (Spin s : lattice.spins())
        sum += value(s);
    return static_cast<double>(sum) / static_cast<double>(lattice.size());
}

double energy_per_site(const Lattice& lattice, const LatticeSpec& spec)
{
    return total_energy(lattice, spec) / static_cast<double>(lattice.size());
}

double staggered_magnetization(const Lattice& lattice) noexcept
{
    long sum = 0;
    for (std::size_t r = 0; r < lattice.rows(); ++r)
        for (std::size_t c = 0; c < lattice.cols(); ++c)
            sum += ((r + c) % 2 == 0 ? 1 : -1) * value(lattice.at(r, c));
    return static_cast<double>(sum) / static_cast<double>(lattice.size());
}

ObservableSet observe(const Lattice& lattice, const LatticeSpec& spec)
{
    return {magnetization_per_spin(lattice), energy_per_site(lattice, spec), staggered_magnetization(lattice)};
}

Lattice sublattice_flipped(const Lattice& lattice)
{
    Lattice out = lattice;
    for (std::size_t r = 0; r < lattice.rows(); ++r)
        for (std::size_t c = 0; c < lattice.cols(); ++c)
            if ((r + c) % 2 == 1)
                out.flip(r * lattice.cols() + c);
    return out;
}

BatchMeans::BatchMeans(std::size_t batch_size) : batch_size_(batch_size)
{
    if (batch_size == 0)
        throw std::invalid_argument("batch size must be positive");
}

void BatchMeans::add(double x)
{
    ++count_;
    total_ += x;
    current_ += x;
    if (++in_current_ == batch_size_)
    {
        batch_means_.push_back(current_ / static_cast<double>(batch_size_));
        current_ = 0.0;
        in_current_ = 0;
    }
}

Estimate BatchMeans::estimate() const
{
    if (batch_means_.size() < 2)
        throw std::logic_error("batch-means error needs at least two completed batches");
    const auto n = static_cast<double>(batch_means_.size());
    double mean_of_batches = 0.0;
    for (double m : batch_means_)
        mean_of_batches += m;
    mean_of_batches /= n;
    double ss = 0.0;
    for (double m : batch_means_)
        ss += (m - mean_of_batches) * (m - mean_of_batches);
    const double variance_of_mean = ss / (n - 1.0) / n;
    return {total_ / static_cast<double>(count_), std::sqrt(variance_of_mean)};
}

} // namespace ising
