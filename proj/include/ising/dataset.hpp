#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ising/lattice.hpp"

namespace ising
{

inline constexpr std::string_view generator_version = "ising-dataset 1.0.0";

enum class BinLabel
{
    FSbCR, // far sub-critical
    SbCR,  // sub-critical
    CR,    // critical
    SpCR,  // super-critical
};

inline constexpr std::array<BinLabel, 4> all_bins{BinLabel::FSbCR, BinLabel::SbCR, BinLabel::CR, BinLabel::SpCR};

std::string_view to_string(BinLabel bin) noexcept;
BinLabel parse_bin_label(std::string_view name);

/// Temperature bin edges in J/k_B. Bins are half-open [lo, hi) except the last, which includes 4.0.
struct BinEdges
{
    std::array<double, 5> edges{0.0, 1.055, 2.119, 2.320, 4.0};

    double lower(BinLabel bin) const noexcept { return edges[static_cast<std::size_t>(bin)]; }
    double upper(BinLabel bin) const noexcept { return edges[static_cast<std::size_t>(bin) + 1]; }
    double width(BinLabel bin) const noexcept { return upper(bin) - lower(bin); }

    /// Strictly increasing from 0 to 4, and the critical bin no wider than 30% of any other bin.
    void validate() const;
};

inline const BinEdges default_bin_edges{};

/// Throws std::out_of_range outside [0, 4].
BinLabel bin_label(double temperature, const BinEdges& edges = default_bin_edges);

enum class Split
{
    Train,
    Validation,
    Test,
};

inline constexpr std::array<Split, 3> all_splits{Split::Train, Split::Validation, Split::Test};

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

struct SplitCounts
{
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;

    std::size_t total() const noexcept { return train + validation + test; }
    std::size_t operator[](Split s) const noexcept;
    std::size_t& operator[](Split s) noexcept;

    friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// Indexed by BinLabel.
using BinSplitCounts = std::array<SplitCounts, 4>;

/// Images per (bin, split) for one boundary condition: 1300 in total.
constexpr BinSplitCounts default_split_counts() noexcept
{
    return {{{220, 100, 150}, {80, 50, 50}, {90, 60, 70}, {210, 90, 130}}};
}

std::size_t total(const BinSplitCounts& counts) noexcept;

/// A corpus family: boundary topology plus coupling sign.
struct Condition
{
    std::string name;
    BoundaryCondition boundary;
    double coupling;
};

/// periodic_ferro, periodic_antiferro, skewed_ferro, antiperiodic_ferro
const std::vector<Condition>& standard_conditions();
/// Also accepts the bare boundary names: "periodic", "skewed", "antiperiodic" (ferromagnetic variants).
const Condition& find_condition(std::string_view name);

struct DatasetConfig
{
    Condition condition = standard_conditions().front();
    std::size_t rows = 100;
    std::size_t cols = 100;
    double field = 0.0;
    std::uint64_t base_seed = 20211;
    double temperature_step = 0.01;
    double max_temperature = 4.0;
    std::size_t thermalization_sweeps = 750;
    std::size_t images_per_condition = 1300;
    BinSplitCounts split_counts = default_split_counts();
    bool allow_replicates = true;
    std::filesystem::path output_root = "corpus";
    int jobs = 0; // 0: OpenMP default
    bool skip_existing = true;

    LatticeSpec lattice_spec() const;
    std::filesystem::path condition_dir() const { return output_root / condition.name; }
    std::filesystem::path manifest_path() const { return condition_dir() / "manifest.json"; }
    /// Temperature of grid point k (k = 1 .. grid_size()).
    double grid_temperature(std::size_t k) const;
    std::size_t grid_size() const;

    /// Throws std::invalid_argument if split counts do not sum to images_per_condition, etc.
    void validate() const;
};

struct ImageRecord
{
    std::string file_path; // relative to the condition directory
    std::string condition;
    BoundaryCondition boundary;
    double temperature;
    std::size_t temperature_index;
    std::size_t replicate;
    BinLabel bin;
    Split split;
    std::uint64_t seed;
};

struct DatasetManifest
{
    DatasetConfig config;
    std::vector<ImageRecord> records;
    std::string version{generator_version};
};

/// Seed of one image: derive_seed(base, {hash(condition), temperature index, replicate}).
std::uint64_t image_seed(std::uint64_t base_seed, std::string_view condition, std::size_t temperature_index,
                         std::size_t replicate);

/// Deterministic record plan without touching the filesystem.
///
/// Each bin's slots are placed evenly over the bin's temperature grid (repeating grid points with a new
/// replicate index when the bin needs more images than it has grid points), and splits are interleaved
/// along that sequence by smooth weighted round-robin, so every split spans the whole bin.
std::vector<ImageRecord> plan_dataset(const DatasetConfig& config);

/// Thermalize, render and encode one record's image.
std::vector<std::uint8_t> render_record(const DatasetConfig& config, const ImageRecord& record);

struct GenerationStats
{
    std::size_t written = 0;
    std::size_t skipped = 0;
};

/// Raised when some images could not be written; everything else was still written.
class GenerationError : public std::runtime_error
{
public:
    GenerationError(const std::string& what, GenerationStats stats, std::vector<std::string> failed)
        : std::runtime_error(what), stats(stats), failed(std::move(failed))
    {
    }

    GenerationStats stats;
    std::vector<std::string> failed;
};

/// Writes every planned image (skipping files already present when config.skip_existing) and the manifest.
DatasetManifest generate_dataset(const DatasetConfig& config, GenerationStats* stats = nullptr);

nlohmann::ordered_json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& json);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

enum class FindingKind
{
    SchemaError,
    MissingFile,
    CorruptImage,
    LabelMismatch,
    LayoutMismatch,
    DuplicateRecord,
    CountMismatch,
    RegenerationMismatch,
};

std::string_view to_string(FindingKind kind) noexcept;

struct Finding
{
    FindingKind kind;
    std::string record; // file_path of the offending record, empty for corpus-level findings
    std::string detail;
};

struct ValidationOptions
{
    /// Also require the config's split counts to equal the 1300-image defaults.
    bool require_default_counts = true;
    /// Re-render this many records (evenly spaced through the manifest) and byte-compare; 0 disables.
    std::size_t regenerate_sample = 0;
    int jobs = 0;
};

struct ValidationReport
{
    std::filesystem::path manifest_path;
    std::size_t records = 0;
    std::size_t regenerated = 0;
    std::vector<Finding> findings;

    bool passed() const noexcept { return findings.empty(); }
    nlohmann::ordered_json to_json() const;
};

/// Never throws for corpus problems; each one becomes a Finding.
ValidationReport validate_manifest(const std::filesystem::path& manifest_path, const ValidationOptions& options = {});

} // namespace ising
