#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ising/cli.hpp"
#include "ising/dataset.hpp"
#include "ising/image.hpp"
#include "ising/lattice.hpp"
#include "ising/metropolis.hpp"
#include "ising/verification.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using ising::test::TempDir;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "ising");
    std::ostringstream out;
    std::ostringstream err;
    const int code = ising::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const std::vector<std::string> small_counts = {"--counts", "FSbCR=3/2/2", "--counts", "SbCR=2/1/1",
                                               "--counts", "CR=2/1/1",    "--counts", "SpCR=3/2/2"};

std::vector<std::string> small_generate(const fs::path& root, std::vector<std::string> extra = {})
{
    std::vector<std::string> args = {"generate", "--root", root.string(), "--size", "12x12", "--sweeps", "20"};
    args.insert(args.end(), small_counts.begin(), small_counts.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

} // namespace

TEST_CASE("simulate writes trace, snapshot and effective config")
{
    TempDir dir("cli_sim");
    const fs::path out = dir.path() / "run1";
    const Result r = run({"simulate", "--bc", "periodic", "--coupling", "1", "--size", "100x100", "--temp", "2.27",
                          "--sweeps", "750", "--seed", "7", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "config.ini"));

    std::ifstream trace_in(out / "trace.csv");
    const auto trace = ising::read_trace(trace_in);
    REQUIRE(trace.size() == 750);
    CHECK(trace.front().sweep == 1);
    CHECK(trace.back().sweep == 750);

    std::ifstream snap_in(out / "final_lattice.txt");
    const ising::Lattice final_lattice = ising::read_snapshot(snap_in);
    CHECK(final_lattice.rows() == 100);
    CHECK(final_lattice.cols() == 100);
    CHECK(ising::magnetization_per_spin(final_lattice) == doctest::Approx(trace.back().magnetization_per_spin));

    const std::string config = slurp(out / "config.ini");
    CHECK(config.find("[simulate]") != std::string::npos);
    CHECK(config.find("seed=7") != std::string::npos);
    CHECK(config.find("temp=2.27") != std::string::npos);
}

TEST_CASE("simulate is deterministic and the echoed config reproduces the run")
{
    TempDir dir("cli_det");
    const std::vector<std::string> flags = {"--size", "24x20", "--temp", "2.0", "--sweeps", "60", "--seed", "11",
                                            "--bc", "antiperiodic", "--coupling", "-1", "--start", "hot"};
    auto args_a = flags;
    args_a.insert(args_a.begin(), "simulate");
    args_a.insert(args_a.end(), {"--out", (dir.path() / "a").string()});
    auto args_b = flags;
    args_b.insert(args_b.begin(), "simulate");
    args_b.insert(args_b.end(), {"--out", (dir.path() / "b").string()});
    REQUIRE(run(args_a).code == 0);
    REQUIRE(run(args_b).code == 0);
    CHECK(slurp(dir.path() / "a/trace.csv") == slurp(dir.path() / "b/trace.csv"));
    CHECK(slurp(dir.path() / "a/final_lattice.txt") == slurp(dir.path() / "b/final_lattice.txt"));

    // Config file alone, with a redirected output directory given on the command line.
    const Result c = run({"--config", (dir.path() / "a/config.ini").string(), "simulate", "--out",
                          (dir.path() / "c").string()});
    REQUIRE(c.code == 0);
    CHECK(slurp(dir.path() / "a/trace.csv") == slurp(dir.path() / "c/trace.csv"));
    CHECK(slurp(dir.path() / "a/final_lattice.txt") == slurp(dir.path() / "c/final_lattice.txt"));
}

TEST_CASE("flags override config-file values")
{
    TempDir dir("cli_cfg");
    const fs::path cfg = dir.path() / "run.ini";
    std::ofstream(cfg) << "[simulate]\nsize=8x8\ntemp=1.5\nsweeps=5\nseed=3\nout=" << (dir.path() / "x").string()
                       << "\n";
    const Result r = run({"-v", "--config", cfg.string(), "simulate", "--seed", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("seed=4") != std::string::npos);
    CHECK(r.err.find("size=\"8x8\"") != std::string::npos);
    const std::string config = slurp(dir.path() / "x/config.ini");
    CHECK(config.find("seed=4") != std::string::npos);
    CHECK(config.find("sweeps=5") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and name the offending flag")
{
    TempDir dir("cli_usage");
    const std::string out = (dir.path() / "o").string();
    Result r = run({"simulate", "--temp", "-1", "--out", out});
    CHECK(r.code == 2);
    CHECK(r.err.find("--temp") != std::string::npos);

    r = run({"simulate", "--bc", "mobius", "--out", out});
    CHECK(r.code == 2);
    CHECK(r.err.find("--bc") != std::string::npos);

    r = run({"simulate", "--size", "1x5", "--out", out});
    CHECK(r.code == 2);
    r = run({"simulate", "--size", "axb", "--out", out});
    CHECK(r.code == 2);
    CHECK(r.err.find("--size") != std::string::npos);
    r = run({"simulate", "--start", "lukewarm", "--out", out});
    CHECK(r.code == 2);
    CHECK(run({"simulate"}).code == 2); // --out is required
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"generate", "--only-bc", "mobius", "--root", out}).code == 2);
    CHECK(run({"generate", "--counts", "CR=1/2", "--root", out}).code == 2);
    CHECK(run({"generate", "--counts", "XX=1/2/3", "--root", out}).code == 2);
    CHECK(run({"validate"}).code == 2);
    CHECK(run({"trace", "--format", "xml", "--size", "4x4", "--sweeps", "2"}).code == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate reports I/O failure with exit 1")
{
    TempDir dir("cli_io");
    const fs::path blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    const Result r = run({"simulate", "--size", "4x4", "--sweeps", "2", "--out", (blocker / "sub").string()});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("trace: file input, formats, simulation input, plot, empty input")
{
    TempDir dir("cli_trace");
    REQUIRE(run({"simulate", "--size", "32x32", "--temp", "0.1", "--sweeps", "200", "--seed", "5", "--start", "hot",
                 "--out", (dir.path() / "run").string()})
                .code == 0);
    const std::string trace_path = (dir.path() / "run/trace.csv").string();

    const Result def = run({"trace", "--in", trace_path});
    const Result csv = run({"trace", "--in", trace_path, "--format", "csv"});
    const Result tsv = run({"trace", "--in", trace_path, "--format", "tsv"});
    const Result txt = run({"trace", "--in", trace_path, "--format", "text"});
    REQUIRE(def.code == 0);
    CHECK(def.out == csv.out);
    CHECK(def.out == slurp(trace_path));
    for (const Result* r : {&tsv, &txt})
    {
        REQUIRE(r->code == 0);
        std::istringstream in(r->out);
        const auto parsed = ising::read_trace(in);
        std::istringstream ref(def.out);
        const auto expected = ising::read_trace(ref);
        REQUIRE(parsed.size() == expected.size());
        for (std::size_t i = 0; i < parsed.size(); ++i)
        {
            CHECK(parsed[i].sweep == expected[i].sweep);
            CHECK(parsed[i].magnetization_per_spin == expected[i].magnetization_per_spin);
            CHECK(parsed[i].energy_per_site == expected[i].energy_per_site);
        }
    }
    CHECK(tsv.out.find('\t') != std::string::npos);

    // From a hot start, order grows; from the default start a T=0.1 ferro run sits at |m| ~ 1.
    std::istringstream in(def.out);
    const auto series = ising::read_trace(in);
    REQUIRE(series.size() == 200);
    CHECK(std::abs(series.back().magnetization_per_spin) > std::abs(series.front().magnetization_per_spin));
    const Result ordered = run({"trace", "--size", "32x32", "--temp", "0.1", "--sweeps", "200", "--seed", "5"});
    std::istringstream ordered_in(ordered.out);
    const auto ordered_series = ising::read_trace(ordered_in);
    REQUIRE(ordered_series.size() == 200);
    for (const auto& p : ordered_series)
        CHECK(std::abs(p.magnetization_per_spin) > 0.99);

    // Same flags without --in simulate afresh and give the same series.
    const Result fresh = run({"trace", "--size", "32x32", "--temp", "0.1", "--sweeps", "200", "--seed", "5",
                              "--start", "hot"});
    REQUIRE(fresh.code == 0);
    CHECK(fresh.out == def.out);

    const fs::path plot = dir.path() / "m.png";
    const fs::path out = dir.path() / "m.tsv";
    REQUIRE(run({"trace", "--in", trace_path, "--format", "tsv", "--out", out.string(), "--plot", plot.string()})
                .code == 0);
    CHECK(slurp(out) == tsv.out);
    const ising::RgbImage image = ising::decode_png(ising::read_file(plot));
    CHECK(image.width == 640);
    CHECK(image.height == 240);

    const fs::path empty = dir.path() / "empty.csv";
    std::ofstream(empty).close();
    CHECK(run({"trace", "--in", empty.string()}).code == 1);
    const fs::path header_only = dir.path() / "header.csv";
    std::ofstream(header_only) << "sweep,magnetization_per_spin,energy_per_site\n";
    CHECK(run({"trace", "--in", header_only.string()}).code == 1);
    const fs::path garbage = dir.path() / "garbage.csv";
    std::ofstream(garbage) << "sweep,m,e\n1,abc,2\n";
    CHECK(run({"trace", "--in", garbage.string()}).code == 1);
    CHECK(run({"trace", "--in", (dir.path() / "nope.csv").string()}).code == 1);
}

TEST_CASE("generate, validate, tamper, regenerate")
{
    TempDir dir("cli_gen");
    const fs::path root = dir.path() / "corpus";
    const Result g = run(small_generate(root, {"--only-bc", "skewed", "--jobs", "2"}));
    REQUIRE(g.code == 0);
    CHECK(g.out.find("skewed_ferro: 22 images (22 written") != std::string::npos);
    CHECK(g.out.find("total: 22 images across 1 condition(s)") != std::string::npos);
    CHECK(fs::is_directory(root / "skewed_ferro"));
    CHECK_FALSE(fs::exists(root / "periodic_ferro"));

    const std::string manifest = (root / "skewed_ferro/manifest.json").string();
    Result v = run({"validate", manifest, "--custom-counts", "--regenerate", "5"});
    CHECK(v.code == 0);
    CHECK(nlohmann::json::parse(v.out)["passed"] == true);

    // Without --custom-counts the 1300-image defaults are enforced.
    v = run({"validate", manifest});
    CHECK(v.code == 3);
    CHECK(nlohmann::json::parse(v.out)["passed"] == false);

    // Delete three images: validation fails, re-running regenerates exactly those, bit-identically.
    const ising::DatasetManifest m = ising::read_manifest(manifest);
    std::vector<std::string> originals;
    for (std::size_t i = 0; i < 3; ++i)
    {
        const fs::path p = root / "skewed_ferro" / m.records[i * 7].file_path;
        originals.push_back(slurp(p));
        fs::remove(p);
    }
    v = run({"validate", manifest, "--custom-counts"});
    CHECK(v.code == 3);
    const auto report = nlohmann::json::parse(v.out);
    CHECK(report["manifests"][0]["findings"].size() == 3);

    const Result again = run(small_generate(root, {"--only-bc", "skewed_ferro"}));
    REQUIRE(again.code == 0);
    CHECK(again.out.find("(3 written, 19 already present)") != std::string::npos);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(slurp(root / "skewed_ferro" / m.records[i * 7].file_path) == originals[i]);
    CHECK(run({"validate", manifest, "--custom-counts"}).code == 0);

    // --force rewrites everything; output is unchanged.
    const std::string manifest_before = slurp(manifest);
    const Result forced = run(small_generate(root, {"--only-bc", "skewed", "--force"}));
    CHECK(forced.out.find("(22 written, 0 already present)") != std::string::npos);
    CHECK(slurp(manifest) == manifest_before);
}

TEST_CASE("generate defaults to all four conditions and reports per-bin counts")
{
    TempDir dir("cli_all");
    const fs::path root = dir.path() / "corpus";
    const Result g = run(small_generate(root));
    REQUIRE(g.code == 0);
    for (const auto& c : ising::standard_conditions())
        CHECK(fs::exists(root / c.name / "manifest.json"));
    CHECK(g.out.find("total: 88 images across 4 condition(s)") != std::string::npos);
    // Table rows: split name then FSbCR SbCR CR SpCR counts.
    CHECK(g.out.find("train             3      2      2      3") != std::string::npos);
    CHECK(g.out.find("validation        2      1      1      2") != std::string::npos);

    std::vector<std::string> args = {"validate", "--custom-counts"};
    for (const auto& c : ising::standard_conditions())
        args.push_back((root / c.name / "manifest.json").string());
    CHECK(run(args).code == 0);
}

TEST_CASE("generate on an unwritable root exits 1 with a progress report")
{
    TempDir dir("cli_genio");
    const fs::path blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    const Result g = run(small_generate(blocker / "corpus", {"--only-bc", "periodic"}));
    CHECK(g.code == 1);
    CHECK_FALSE(g.err.empty());
}

TEST_CASE("validate --oracle passes with the real Metropolis rule")
{
    const Result r = run({"validate", "--oracle"});
    CHECK(r.code == 0);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report["oracle"]["passed"] == true);
}

TEST_CASE("oracle check rejects broken acceptance rules")
{
    ising::OracleCheckConfig config;
    config.measurement_sweeps = 20000;
    config.thermalization_sweeps = 200;

    CHECK(ising::check_oracle_agreement(config).passed);

    config.rule = [](double, double) { return 1.0; };
    CHECK_FALSE(ising::check_oracle_agreement(config).passed);

    config.rule = [](double delta_e, double t) { return std::exp(-delta_e / (2.0 * t)); }; // wrong temperature
    CHECK_FALSE(ising::check_oracle_agreement(config).passed);

    // Downhill moves are always accepted by the kernel, so Glauber weights break detailed balance there.
    config.rule = [](double delta_e, double t) { return 1.0 / (1.0 + std::exp(delta_e / t)); };
    CHECK_FALSE(ising::check_oracle_agreement(config).passed);

    config.rule = [](double delta_e, double t) { return std::min(1.0, std::exp(-delta_e / t)); };
    CHECK(ising::check_oracle_agreement(config).passed);
}
