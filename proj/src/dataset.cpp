#include "ising/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "ising/image.hpp"
#include "ising/metropolis.hpp"
#include "ising/parallel.hpp"
#include "ising/rng.hpp"

namespace ising
{

using nlohmann::ordered_json;

std::string_view to_string(BinLabel bin) noexcept
{
    switch (bin)
    {
    case BinLabel::FSbCR: return "FSbCR";
    case BinLabel::SbCR: return "SbCR";
    case BinLabel::CR: return "CR";
    case BinLabel::SpCR: return "SpCR";
    }
    return "unknown";
}

BinLabel parse_bin_label(std::string_view name)
{
    for (BinLabel b : all_bins)
        if (to_string(b) == name)
            return b;
    throw std::invalid_argument("unknown bin label '" + std::string(name) + "'");
}

void BinEdges::validate() const
{
    if (edges.front() != 0.0 || edges.back() != 4.0)
        throw std::invalid_argument("bin edges must start at 0 and end at 4");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("bin edges must be strictly increasing");
    for (BinLabel b : all_bins)
        if (b != BinLabel::CR && width(BinLabel::CR) > 0.3 * width(b))
            throw std::invalid_argument("critical bin wider than 30% of bin " + std::string(to_string(b)));
}

BinLabel bin_label(double temperature, const BinEdges& edges)
{
    if (!(temperature >= edges.edges.front() && temperature <= edges.edges.back()))
        throw std::out_of_range("temperature " + std::to_string(temperature) + " outside [0, 4]");
    for (BinLabel b : {BinLabel::FSbCR, BinLabel::SbCR, BinLabel::CR})
        if (temperature < edges.upper(b))
            return b;
    return BinLabel::SpCR;
}

std::string_view to_string(Split split) noexcept
{
    switch (split)
    {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    }
    return "unknown";
}

Split parse_split(std::string_view name)
{
    for (Split s : all_splits)
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

std::size_t SplitCounts::operator[](Split s) const noexcept
{
    return s == Split::Train ? train : s == Split::Validation ? validation : test;
}

std::size_t& SplitCounts::operator[](Split s) noexcept
{
    return s == Split::Train ? train : s == Split::Validation ? validation : test;
}

std::size_t total(const BinSplitCounts& counts) noexcept
{
    std::size_t n = 0;
    for (const SplitCounts& c : counts)
        n += c.total();
    return n;
}

const std::vector<Condition>& standard_conditions()
{
    static const std::vector<Condition> conditions{
        {"periodic_ferro", BoundaryCondition::Periodic, 1.0},
        {"periodic_antiferro", BoundaryCondition::Periodic, -1.0},
        {"skewed_ferro", BoundaryCondition::SkewedPlusMinus, 1.0},
        {"antiperiodic_ferro", BoundaryCondition::AntiPeriodic, 1.0},
    };
    return conditions;
}

const Condition& find_condition(std::string_view name)
{
    const auto& all = standard_conditions();
    for (const Condition& c : all)
        if (c.name == name)
            return c;
    if (name == "periodic")
        return all[0];
    if (name == "antiferro" || name == "periodic-antiferro")
        return all[1];
    if (name == "skewed")
        return all[2];
    if (name == "antiperiodic" || name == "anti-periodic")
        return all[3];
    throw std::invalid_argument("unknown condition '" + std::string(name) + "'");
}

LatticeSpec DatasetConfig::lattice_spec() const
{
    return {rows, cols, condition.boundary, condition.coupling, field};
}

std::size_t DatasetConfig::grid_size() const
{
    return static_cast<std::size_t>(std::floor(max_temperature / temperature_step + 1e-9));
}

double DatasetConfig::grid_temperature(std::size_t k) const
{
    // k / 100 is correctly rounded where k * 0.01 is not, so grid points print and bin exactly.
    const double per_unit = 1.0 / temperature_step;
    const double rounded = std::round(per_unit);
    if (std::abs(per_unit - rounded) < 1e-9)
        return static_cast<double>(k) / rounded;
    return static_cast<double>(k) * temperature_step;
}

void DatasetConfig::validate() const
{
    lattice_spec().validate();
    if (!(temperature_step >= 0.01))
        throw std::invalid_argument("temperature step must be at least 0.01");
    if (!(max_temperature > 0.0 && max_temperature <= 4.0))
        throw std::invalid_argument("max temperature must lie in (0, 4]");
    if (total(split_counts) != images_per_condition)
        throw std::invalid_argument("split counts sum to " + std::to_string(total(split_counts)) +
                                    " but images_per_condition is " + std::to_string(images_per_condition));
    default_bin_edges.validate();
}

namespace
{

constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s)
    {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string image_file_name(double temperature, std::size_t replicate)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "T%.2f_r%zu.png", temperature, replicate);
    return buf;
}

std::string record_path(Split split, BinLabel bin, double temperature, std::size_t replicate)
{
    return std::string(to_string(split)) + "/" + std::string(to_string(bin)) + "/" +
           image_file_name(temperature, replicate);
}

} // namespace

std::uint64_t image_seed(std::uint64_t base_seed, std::string_view condition, std::size_t temperature_index,
                         std::size_t replicate)
{
    return derive_seed(base_seed, {fnv1a(condition), temperature_index, replicate});
}

std::vector<ImageRecord> plan_dataset(const DatasetConfig& config)
{
    config.validate();
    std::array<std::vector<std::size_t>, 4> grid;
    for (std::size_t k = 1; k <= config.grid_size(); ++k)
        grid[static_cast<std::size_t>(bin_label(config.grid_temperature(k)))].push_back(k);

    std::vector<ImageRecord> records;
    records.reserve(config.images_per_condition);
    for (BinLabel bin : all_bins)
    {
        const auto& points = grid[static_cast<std::size_t>(bin)];
        const SplitCounts& want = config.split_counts[static_cast<std::size_t>(bin)];
        const std::size_t slots = want.total();
        if (slots == 0)
            continue;
        if (points.empty())
            throw std::invalid_argument("bin " + std::string(to_string(bin)) + " has no grid temperatures");
        if (!config.allow_replicates && slots > points.size())
            throw std::invalid_argument("bin " + std::string(to_string(bin)) + " needs " + std::to_string(slots) +
                                        " images but has " + std::to_string(points.size()) +
                                        " grid temperatures and replicates are disabled");

        std::map<std::size_t, std::size_t> uses;
        std::array<long, 3> current{};
        for (std::size_t j = 0; j < slots; ++j)
        {
            const std::size_t k = points[(2 * j + 1) * points.size() / (2 * slots)];

            // smooth weighted round-robin over the three splits
            std::size_t pick = 0;
            for (std::size_t s = 0; s < 3; ++s)
            {
                current[s] += static_cast<long>(want[all_splits[s]]);
                if (current[s] > current[pick])
                    pick = s;
            }
            current[pick] -= static_cast<long>(slots);

            const Split split = all_splits[pick];
            const double t = config.grid_temperature(k);
            const std::size_t replicate = uses[k]++;
            records.push_back({record_path(split, bin, t, replicate), config.condition.name,
                               config.condition.boundary, t, k, replicate, bin, split,
                               image_seed(config.base_seed, config.condition.name, k, replicate)});
        }
    }

    std::set<std::string> paths;
    for (const ImageRecord& r : records)
        if (!paths.insert(r.file_path).second)
            throw std::invalid_argument("temperature step produces colliding file name " + r.file_path);
    return records;
}

std::vector<std::uint8_t> render_record(const DatasetConfig& config, const ImageRecord& record)
{
    SimulationParams params;
    params.temperature = record.temperature;
    params.thermalization_sweeps = config.thermalization_sweeps;
    params.seed = record.seed;
    return encode_png(render_image(sample_microstate(config.lattice_spec(), params)));
}

DatasetManifest generate_dataset(const DatasetConfig& config, GenerationStats* stats)
{
    DatasetManifest manifest{config, plan_dataset(config)};
    const auto dir = config.condition_dir();
    std::error_code ec;
    for (Split s : all_splits)
        for (BinLabel b : all_bins)
        {
            std::filesystem::create_directories(dir / std::string(to_string(s)) / std::string(to_string(b)), ec);
            if (ec)
                throw GenerationError("cannot create directories under " + dir.string() + ": " + ec.message(), {},
                                      {});
        }

    const auto& records = manifest.records;
    std::vector<char> written(records.size(), 0);
    std::vector<char> skipped(records.size(), 0);
    std::vector<std::string> errors(records.size());

#pragma omp parallel for schedule(dynamic) num_threads(config.jobs > 0 ? config.jobs : max_threads())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(records.size()); ++i)
    {
        const auto idx = static_cast<std::size_t>(i);
        const auto path = dir / records[idx].file_path;
        try
        {
            if (config.skip_existing && std::filesystem::exists(path))
            {
                skipped[idx] = 1;
                continue;
            }
            write_file(path, render_record(config, records[idx]));
            written[idx] = 1;
        }
        catch (const std::exception& e)
        {
            errors[idx] = records[idx].file_path + ": " + e.what();
        }
    }

    GenerationStats result;
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        result.written += static_cast<std::size_t>(written[i]);
        result.skipped += static_cast<std::size_t>(skipped[i]);
        if (!errors[i].empty())
            failed.push_back(errors[i]);
    }
    if (stats)
        *stats = result;
    if (!failed.empty())
        throw GenerationError(std::to_string(failed.size()) + " of " + std::to_string(records.size()) +
                                  " images failed; first: " + failed.front(),
                              result, std::move(failed));
    write_manifest(manifest, config.manifest_path());
    return manifest;
}

ordered_json to_json(const DatasetManifest& manifest)
{
    const DatasetConfig& c = manifest.config;
    ordered_json split_counts = ordered_json::object();
    for (BinLabel b : all_bins)
    {
        const SplitCounts& sc = c.split_counts[static_cast<std::size_t>(b)];
        split_counts[std::string(to_string(b))] = {
            {"train", sc.train}, {"validation", sc.validation}, {"test", sc.test}};
    }
    ordered_json labels = ordered_json::array();
    for (BinLabel b : all_bins)
        labels.push_back(to_string(b));

    ordered_json config{
        {"condition", c.condition.name},
        {"boundary_condition", to_string(c.condition.boundary)},
        {"coupling", c.condition.coupling},
        {"field", c.field},
        {"rows", c.rows},
        {"cols", c.cols},
        {"base_seed", c.base_seed},
        {"temperature_step", c.temperature_step},
        {"max_temperature", c.max_temperature},
        {"thermalization_sweeps", c.thermalization_sweeps},
        {"images_per_condition", c.images_per_condition},
        {"allow_replicates", c.allow_replicates},
        {"bin_edges", default_bin_edges.edges},
        {"label_order", labels},
        {"split_counts", split_counts},
        {"rng", "xoshiro256** seeded by splitmix64"},
        {"color_spin_up", spin_up_color},
        {"color_spin_down", spin_down_color},
    };

    ordered_json records = ordered_json::array();
    for (const ImageRecord& r : manifest.records)
        records.push_back({
            {"file_path", r.file_path},
            {"condition", r.condition},
            {"boundary_condition", to_string(r.boundary)},
            {"temperature", r.temperature},
            {"temperature_index", r.temperature_index},
            {"replicate", r.replicate},
            {"bin", to_string(r.bin)},
            {"split", to_string(r.split)},
            {"seed", r.seed},
        });

    return {{"generator_version", manifest.version}, {"config", config}, {"records", records}};
}

DatasetManifest manifest_from_json(const nlohmann::json& json)
{
    DatasetManifest m;
    m.version = json.at("generator_version").get<std::string>();
    const auto& c = json.at("config");
    m.config.condition = {c.at("condition").get<std::string>(),
                          parse_boundary_condition(c.at("boundary_condition").get<std::string>()),
                          c.at("coupling").get<double>()};
    m.config.field = c.at("field").get<double>();
    m.config.rows = c.at("rows").get<std::size_t>();
    m.config.cols = c.at("cols").get<std::size_t>();
    m.config.base_seed = c.at("base_seed").get<std::uint64_t>();
    m.config.temperature_step = c.at("temperature_step").get<double>();
    m.config.max_temperature = c.at("max_temperature").get<double>();
    m.config.thermalization_sweeps = c.at("thermalization_sweeps").get<std::size_t>();
    m.config.images_per_condition = c.at("images_per_condition").get<std::size_t>();
    m.config.allow_replicates = c.value("allow_replicates", true);
    for (BinLabel b : all_bins)
    {
        const auto& sc = c.at("split_counts").at(std::string(to_string(b)));
        m.config.split_counts[static_cast<std::size_t>(b)] = {
            sc.at("train").get<std::size_t>(), sc.at("validation").get<std::size_t>(), sc.at("test").get<std::size_t>()};
    }
    for (const auto& r : json.at("records"))
        m.records.push_back({r.at("file_path").get<std::string>(), r.at("condition").get<std::string>(),
                             parse_boundary_condition(r.at("boundary_condition").get<std::string>()),
                             r.at("temperature").get<double>(), r.at("temperature_index").get<std::size_t>(),
                             r.at("replicate").get<std::size_t>(), parse_bin_label(r.at("bin").get<std::string>()),
                             parse_split(r.at("split").get<std::string>()), r.at("seed").get<std::uint64_t>()});
    return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path)
{
    const std::string text = to_json(manifest).dump(2) + "\n";
    write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

DatasetManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest " + path.string());
    return manifest_from_json(nlohmann::json::parse(in));
}

std::string_view to_string(FindingKind kind) noexcept
{
    switch (kind)
    {
    case FindingKind::SchemaError: return "schema_error";
    case FindingKind::MissingFile: return "missing_file";
    case FindingKind::CorruptImage: return "corrupt_image";
    case FindingKind::LabelMismatch: return "label_mismatch";
    case FindingKind::LayoutMismatch: return "layout_mismatch";
    case FindingKind::DuplicateRecord: return "duplicate_record";
    case FindingKind::CountMismatch: return "count_mismatch";
    case FindingKind::RegenerationMismatch: return "regeneration_mismatch";
    }
    return "unknown";
}

ordered_json ValidationReport::to_json() const
{
    ordered_json findings_json = ordered_json::array();
    for (const Finding& f : findings)
        findings_json.push_back({{"kind", to_string(f.kind)}, {"record", f.record}, {"detail", f.detail}});
    return {{"manifest", manifest_path.string()},
            {"passed", passed()},
            {"records", records},
            {"regenerated", regenerated},
            {"findings", findings_json}};
}

ValidationReport validate_manifest(const std::filesystem::path& manifest_path, const ValidationOptions& options)
{
    ValidationReport report;
    report.manifest_path = manifest_path;
    DatasetManifest manifest;
    try
    {
        manifest = read_manifest(manifest_path);
    }
    catch (const std::exception& e)
    {
        report.findings.push_back({FindingKind::SchemaError, "", e.what()});
        return report;
    }
    report.records = manifest.records.size();
    const auto dir = manifest_path.parent_path();
    const DatasetConfig& config = manifest.config;

    if (total(config.split_counts) != config.images_per_condition)
        report.findings.push_back({FindingKind::CountMismatch, "",
                                   "config split counts sum to " + std::to_string(total(config.split_counts)) +
                                       ", images_per_condition is " + std::to_string(config.images_per_condition)});
    if (options.require_default_counts && config.split_counts != default_split_counts())
        report.findings.push_back({FindingKind::CountMismatch, "", "config split counts differ from the 1300-image defaults"});

    std::array<SplitCounts, 4> seen{};
    std::set<std::string> paths;
    std::set<std::uint64_t> seeds;
    for (const ImageRecord& r : manifest.records)
    {
        if (!paths.insert(r.file_path).second)
            report.findings.push_back({FindingKind::DuplicateRecord, r.file_path, "file path listed twice"});
        if (!seeds.insert(r.seed).second)
            report.findings.push_back({FindingKind::DuplicateRecord, r.file_path, "seed reused: " + std::to_string(r.seed)});

        try
        {
            const BinLabel derived = bin_label(r.temperature);
            if (derived != r.bin)
                report.findings.push_back({FindingKind::LabelMismatch, r.file_path,
                                           "temperature " + std::to_string(r.temperature) + " belongs to " +
                                               std::string(to_string(derived)) + ", record says " +
                                               std::string(to_string(r.bin))});
        }
        catch (const std::out_of_range& e)
        {
            report.findings.push_back({FindingKind::LabelMismatch, r.file_path, e.what()});
        }
        ++seen[static_cast<std::size_t>(r.bin)][r.split];

        const std::string prefix = std::string(to_string(r.split)) + "/" + std::string(to_string(r.bin)) + "/";
        if (r.file_path.rfind(prefix, 0) != 0)
            report.findings.push_back({FindingKind::LayoutMismatch, r.file_path, "expected under " + prefix});

        const auto path = dir / r.file_path;
        if (!std::filesystem::exists(path))
        {
            report.findings.push_back({FindingKind::MissingFile, r.file_path, "no file at " + path.string()});
            continue;
        }
        try
        {
            const RgbImage image = decode_png(read_file(path));
            if (image.width != config.cols || image.height != config.rows)
                throw std::runtime_error("image is " + std::to_string(image.width) + "x" +
                                         std::to_string(image.height));
            lattice_from_image(image);
        }
        catch (const std::exception& e)
        {
            report.findings.push_back({FindingKind::CorruptImage, r.file_path, e.what()});
        }
    }

    for (BinLabel b : all_bins)
        for (Split s : all_splits)
        {
            const std::size_t want = config.split_counts[static_cast<std::size_t>(b)][s];
            const std::size_t got = seen[static_cast<std::size_t>(b)][s];
            if (want != got)
                report.findings.push_back({FindingKind::CountMismatch, "",
                                           std::string(to_string(b)) + "/" + std::string(to_string(s)) + ": " +
                                               std::to_string(got) + " records, expected " + std::to_string(want)});
        }

    if (options.regenerate_sample > 0 && !manifest.records.empty())
    {
        const std::size_t n = std::min(options.regenerate_sample, manifest.records.size());
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < n; ++i)
            picks.push_back(i * manifest.records.size() / n);
        std::vector<std::string> mismatch(n);
#pragma omp parallel for schedule(dynamic) num_threads(options.jobs > 0 ? options.jobs : max_threads())
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        {
            const ImageRecord& r = manifest.records[picks[static_cast<std::size_t>(i)]];
            try
            {
                if (render_record(config, r) != read_file(dir / r.file_path))
                    mismatch[static_cast<std::size_t>(i)] = "regenerated bytes differ from file";
            }
            catch (const std::exception& e)
            {
                mismatch[static_cast<std::size_t>(i)] = e.what();
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!mismatch[i].empty())
                report.findings.push_back(
                    {FindingKind::RegenerationMismatch, manifest.records[picks[i]].file_path, mismatch[i]});
        report.regenerated = n;
    }
    return report;
}

} // namespace ising
