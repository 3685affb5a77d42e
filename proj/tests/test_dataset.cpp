#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "ising/dataset.hpp"
#include "ising/image.hpp"
#include "test_support.hpp"

using namespace ising;

namespace
{

DatasetConfig small_config(const std::filesystem::path& root, const std::string& condition = "periodic_ferro")
{
    DatasetConfig c;
    c.condition = find_condition(condition);
    c.rows = 8;
    c.cols = 8;
    c.thermalization_sweeps = 20;
    c.split_counts = {{{4, 2, 2}, {2, 1, 1}, {3, 2, 2}, {4, 2, 3}}};
    c.images_per_condition = 28;
    c.output_root = root;
    c.base_seed = 5;
    return c;
}

ValidationOptions custom_counts()
{
    ValidationOptions o;
    o.require_default_counts = false;
    return o;
}

bool has_finding(const ValidationReport& r, FindingKind kind, const std::string& record = {})
{
    return std::any_of(r.findings.begin(), r.findings.end(), [&](const Finding& f) {
        return f.kind == kind && (record.empty() || f.record == record);
    });
}

} // namespace

TEST_CASE("bin label examples and boundary convention")
{
    CHECK(bin_label(0.50) == BinLabel::FSbCR);
    CHECK(bin_label(2.27) == BinLabel::CR);
    CHECK(bin_label(2.119) == BinLabel::CR);
    CHECK(bin_label(2.320) == BinLabel::SpCR);
    CHECK(bin_label(1.055) == BinLabel::SbCR);
    CHECK(bin_label(0.0) == BinLabel::FSbCR);
    CHECK(bin_label(4.0) == BinLabel::SpCR);
    CHECK_THROWS_AS(bin_label(-0.01), std::out_of_range);
    CHECK_THROWS_AS(bin_label(4.01), std::out_of_range);
}

TEST_CASE("bin labels partition [0, 4] monotonically")
{
    int previous = 0;
    for (int i = 0; i <= 400000; ++i)
    {
        const int bin = static_cast<int>(bin_label(i * 1e-5));
        CHECK(bin >= previous);
        previous = bin;
    }
    CHECK(previous == static_cast<int>(BinLabel::SpCR));
}

TEST_CASE("bin edges: the critical bin is at most 30% of every other bin")
{
    CHECK_NOTHROW(default_bin_edges.validate());
    CHECK(default_bin_edges.width(BinLabel::CR) == doctest::Approx(0.201));
    BinEdges wide;
    wide.edges = {0.0, 1.0, 2.0, 2.5, 4.0};
    CHECK_THROWS_AS(wide.validate(), std::invalid_argument);
    BinEdges unordered;
    unordered.edges = {0.0, 2.0, 1.0, 2.5, 4.0};
    CHECK_THROWS_AS(unordered.validate(), std::invalid_argument);
}

TEST_CASE("default split counts")
{
    const auto counts = default_split_counts();
    CHECK(total(counts) == 1300);
    SplitCounts sums;
    for (const SplitCounts& c : counts)
    {
        sums.train += c.train;
        sums.validation += c.validation;
        sums.test += c.test;
    }
    CHECK(sums == SplitCounts{600, 300, 400});
    CHECK(counts[static_cast<std::size_t>(BinLabel::CR)] == SplitCounts{90, 60, 70});
    CHECK(counts[static_cast<std::size_t>(BinLabel::FSbCR)].total() == 470);
    CHECK(counts[static_cast<std::size_t>(BinLabel::SbCR)].total() == 180);
    CHECK(counts[static_cast<std::size_t>(BinLabel::CR)].total() == 220);
    CHECK(counts[static_cast<std::size_t>(BinLabel::SpCR)].total() == 430);
}

TEST_CASE("default plan: exact counts, stratified splits, unique seeds")
{
    DatasetConfig config;
    const auto records = plan_dataset(config);
    REQUIRE(records.size() == 1300);

    std::map<std::pair<BinLabel, Split>, std::size_t> counts;
    std::map<std::pair<BinLabel, Split>, std::pair<double, double>> range;
    std::set<std::uint64_t> seeds;
    std::set<std::string> paths;
    for (const ImageRecord& r : records)
    {
        CHECK(bin_label(r.temperature) == r.bin);
        CHECK(r.temperature == config.grid_temperature(r.temperature_index));
        CHECK(r.seed == image_seed(config.base_seed, config.condition.name, r.temperature_index, r.replicate));
        ++counts[{r.bin, r.split}];
        auto [it, fresh] = range.try_emplace({r.bin, r.split}, r.temperature, r.temperature);
        it->second.first = std::min(it->second.first, r.temperature);
        it->second.second = std::max(it->second.second, r.temperature);
        seeds.insert(r.seed);
        paths.insert(r.file_path);
    }
    CHECK(seeds.size() == 1300);
    CHECK(paths.size() == 1300);
    for (BinLabel b : all_bins)
        for (Split s : all_splits)
        {
            CHECK(counts[{b, s}] == default_split_counts()[static_cast<std::size_t>(b)][s]);
            // every split reaches both ends of its bin (within 10% of the bin width)
            const double slack = 0.1 * default_bin_edges.width(b) + 0.01;
            CHECK(range[{b, s}].first < default_bin_edges.lower(b) + slack);
            CHECK(range[{b, s}].second > default_bin_edges.upper(b) - slack);
        }

    // grid: 0.01 .. 4.00, no T = 0
    CHECK(config.grid_size() == 400);
    CHECK(config.grid_temperature(1) == 0.01);
    CHECK(config.grid_temperature(232) == 2.32);

    CHECK(plan_dataset(config).front().file_path == records.front().file_path);
    CHECK(records.front().file_path == "train/FSbCR/T0.01_r0.png");
}

TEST_CASE("plans fail loudly on impossible configurations")
{
    DatasetConfig config;
    config.allow_replicates = false; // FSbCR needs 470 images from 105 grid temperatures
    CHECK_THROWS_AS(plan_dataset(config), std::invalid_argument);

    DatasetConfig mismatch;
    mismatch.images_per_condition = 1299;
    CHECK_THROWS_AS(plan_dataset(mismatch), std::invalid_argument);

    DatasetConfig coarse;
    coarse.temperature_step = 1.0; // grid 1,2,3,4: CR bin is empty
    CHECK_THROWS_AS(plan_dataset(coarse), std::invalid_argument);
}

TEST_CASE("conditions")
{
    CHECK(standard_conditions().size() == 4);
    CHECK(find_condition("skewed").name == "skewed_ferro");
    CHECK(find_condition("periodic_antiferro").coupling == -1.0);
    CHECK(find_condition("antiperiodic").boundary == BoundaryCondition::AntiPeriodic);
    CHECK_THROWS_AS(find_condition("open"), std::invalid_argument);
}

TEST_CASE("render image examples")
{
    const RgbImage blue = render_image(Lattice(3, 5));
    CHECK(blue.width == 5);
    CHECK(blue.height == 3);
    for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 5; ++x)
            CHECK(blue.pixel(x, y) == spin_up_color);

    const RgbImage board = render_image(Lattice::checkerboard(4, 4));
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 4; ++x)
            CHECK(board.pixel(x, y) == ((x + y) % 2 == 0 ? spin_up_color : spin_down_color));
}

TEST_CASE("render, encode, decode, reconstruct is the identity (property)")
{
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t rows = 2 + gen() % 30;
        const std::size_t cols = 2 + gen() % 30;
        const Lattice l = test::random_lattice(rows, cols, gen);
        const auto png = encode_png(render_image(l));
        CHECK(png == encode_png(render_image(l)));
        CHECK(lattice_from_image(decode_png(png)) == l);
    }
    const std::vector<std::uint8_t> garbage{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_png(garbage), std::runtime_error);
    RgbImage odd = render_image(Lattice(2, 2));
    odd.pixels[0] = 0;
    CHECK_THROWS_AS(lattice_from_image(odd), std::runtime_error);
}

TEST_CASE("generation writes the layout, is deterministic and thread-count invariant")
{
    test::TempDir a("gen_a");
    test::TempDir b("gen_b");
    DatasetConfig ca = small_config(a.path());
    ca.jobs = 1;
    DatasetConfig cb = small_config(b.path());
    cb.jobs = 4;

    GenerationStats stats;
    const DatasetManifest ma = generate_dataset(ca, &stats);
    CHECK(stats.written == 28);
    CHECK(stats.skipped == 0);
    generate_dataset(cb);

    CHECK(read_file(ca.manifest_path()) == read_file(cb.manifest_path()));
    for (const ImageRecord& r : ma.records)
    {
        const auto pa = ca.condition_dir() / r.file_path;
        REQUIRE(std::filesystem::exists(pa));
        CHECK(read_file(pa) == read_file(cb.condition_dir() / r.file_path));
        const auto rel = std::filesystem::relative(pa, a.path()).generic_string();
        CHECK(rel.rfind("periodic_ferro/" + std::string(to_string(r.split)) + "/" + std::string(to_string(r.bin)) + "/T", 0) == 0);
    }
}

TEST_CASE("re-running generation regenerates only deleted images, bit-identically")
{
    test::TempDir dir("regen");
    const DatasetConfig config = small_config(dir.path(), "skewed");
    const DatasetManifest m = generate_dataset(config);
    std::vector<std::pair<std::filesystem::path, std::vector<std::uint8_t>>> removed;
    for (std::size_t i : {0, 9, 20})
    {
        const auto p = config.condition_dir() / m.records[i].file_path;
        removed.emplace_back(p, read_file(p));
        std::filesystem::remove(p);
    }
    GenerationStats stats;
    generate_dataset(config, &stats);
    CHECK(stats.written == 3);
    CHECK(stats.skipped == 25);
    for (const auto& [path, bytes] : removed)
        CHECK(read_file(path) == bytes);
}

TEST_CASE("manifest json round trip")
{
    DatasetConfig config = small_config("unused", "periodic_antiferro");
    const DatasetManifest m{config, plan_dataset(config)};
    const auto json = to_json(m);
    CHECK(to_json(manifest_from_json(nlohmann::json::parse(json.dump()))) == json);
    CHECK(json.at("config").at("label_order") == nlohmann::ordered_json({"FSbCR", "SbCR", "CR", "SpCR"}));
    CHECK(json.begin().key() == "generator_version");
}

TEST_CASE("validate_manifest: clean corpus, edited label, deleted image, tampered image")
{
    test::TempDir dir("validate");
    const DatasetConfig config = small_config(dir.path(), "antiperiodic_ferro");
    const DatasetManifest m = generate_dataset(config);

    ValidationOptions opts = custom_counts();
    opts.regenerate_sample = 28;
    const ValidationReport clean = validate_manifest(config.manifest_path(), opts);
    CHECK(clean.passed());
    CHECK(clean.records == 28);
    CHECK(clean.regenerated == 28);

    // The default-count requirement flags this deliberately small corpus.
    CHECK(has_finding(validate_manifest(config.manifest_path()), FindingKind::CountMismatch));

    SUBCASE("temperature edited across a bin edge")
    {
        auto json = nlohmann::json::parse(std::ifstream(config.manifest_path()));
        std::string victim;
        for (auto& r : json["records"])
            if (r["bin"] == "CR")
            {
                victim = r["file_path"];
                r["temperature"] = 2.35;
                break;
            }
        std::ofstream(config.manifest_path()) << json.dump(2);
        const auto report = validate_manifest(config.manifest_path(), custom_counts());
        CHECK_FALSE(report.passed());
        CHECK(has_finding(report, FindingKind::LabelMismatch, victim));
    }
    SUBCASE("image deleted")
    {
        std::filesystem::remove(config.condition_dir() / m.records[3].file_path);
        const auto report = validate_manifest(config.manifest_path(), custom_counts());
        CHECK(has_finding(report, FindingKind::MissingFile, m.records[3].file_path));
        CHECK(report.findings.size() == 1);
    }
    SUBCASE("image replaced by another valid image")
    {
        std::filesystem::copy_file(config.condition_dir() / m.records[1].file_path,
                                   config.condition_dir() / m.records[0].file_path,
                                   std::filesystem::copy_options::overwrite_existing);
        const auto plain = validate_manifest(config.manifest_path(), custom_counts());
        CHECK(plain.passed());
        const auto report = validate_manifest(config.manifest_path(), opts);
        CHECK(has_finding(report, FindingKind::RegenerationMismatch, m.records[0].file_path));
    }
    SUBCASE("record dropped")
    {
        auto json = nlohmann::json::parse(std::ifstream(config.manifest_path()));
        json["records"].erase(json["records"].begin());
        std::ofstream(config.manifest_path()) << json.dump(2);
        CHECK(has_finding(validate_manifest(config.manifest_path(), custom_counts()), FindingKind::CountMismatch));
    }
    SUBCASE("corrupt image bytes")
    {
        std::ofstream(config.condition_dir() / m.records[2].file_path, std::ios::trunc) << "not a png";
        CHECK(has_finding(validate_manifest(config.manifest_path(), custom_counts()), FindingKind::CorruptImage,
                          m.records[2].file_path));
    }
}

TEST_CASE("validate_manifest reports an unreadable manifest")
{
    const auto report = validate_manifest("/nonexistent/manifest.json");
    CHECK_FALSE(report.passed());
    CHECK(has_finding(report, FindingKind::SchemaError));
    CHECK(report.to_json().at("passed") == false);
}
