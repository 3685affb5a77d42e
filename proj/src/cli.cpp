#include "ising/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "ising/dataset.hpp"
#include "ising/image.hpp"
#include "ising/metropolis.hpp"
#include "ising/verification.hpp"

namespace ising::cli
{

namespace
{

namespace fs = std::filesystem;

/// Failures that map onto a specific exit code.
struct CommandError : std::runtime_error
{
    CommandError(ExitCode code, const std::string& what) : std::runtime_error(what), code(code) {}
    ExitCode code;
};

std::pair<std::size_t, std::size_t> parse_size(const std::string& text)
{
    const auto x = text.find('x');
    try
    {
        if (x == std::string::npos)
        {
            const auto n = std::stoul(text);
            return {n, n};
        }
        return {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
    }
    catch (const std::exception&)
    {
        throw CommandError(UsageError, "--size: expected ROWSxCOLS, got '" + text + "'");
    }
}

StartState parse_start(const std::string& text)
{
    if (text == "ordered")
        return StartState::Ordered;
    if (text == "hot")
        return StartState::Hot;
    if (text == "cold")
        return StartState::Cold;
    throw CommandError(UsageError, "--start: expected ordered, hot or cold, got '" + text + "'");
}

/// Options shared by `simulate` and `trace` when the latter runs its own simulation.
struct SimulationOptions
{
    std::string bc = "periodic";
    double coupling = 1.0;
    double field = 0.0;
    std::string size = "100x100";
    double temperature = 2.27;
    std::size_t sweeps = 750;
    std::uint64_t seed = 0;
    std::string start = "ordered";

    void attach(CLI::App& app)
    {
        app.add_option("--bc", bc, "Boundary condition: periodic, antiperiodic, skewed")->capture_default_str();
        app.add_option("--coupling", coupling, "Coupling J (negative: anti-ferromagnet)")->capture_default_str();
        app.add_option("--field", field, "External field B")->capture_default_str();
        app.add_option("--size", size, "Lattice size ROWSxCOLS")->capture_default_str();
        app.add_option("--temp", temperature, "Temperature in J/k_B")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app.add_option("--sweeps", sweeps, "Thermalization sweeps")->capture_default_str();
        app.add_option("--seed", seed, "RNG seed")->capture_default_str();
        app.add_option("--start", start, "Initial state: ordered, hot, cold")->capture_default_str();
    }

    LatticeSpec spec() const
    {
        LatticeSpec s;
        try
        {
            s.boundary = parse_boundary_condition(bc);
        }
        catch (const std::invalid_argument& e)
        {
            throw CommandError(UsageError, std::string("--bc: ") + e.what());
        }
        std::tie(s.rows, s.cols) = parse_size(size);
        s.coupling = coupling;
        s.field = field;
        try
        {
            s.validate();
        }
        catch (const std::invalid_argument& e)
        {
            throw CommandError(UsageError, std::string("--size/--coupling: ") + e.what());
        }
        return s;
    }

    SimulationParams params() const
    {
        SimulationParams p;
        p.temperature = temperature;
        p.thermalization_sweeps = sweeps;
        p.seed = seed;
        p.start = parse_start(start);
        return p;
    }

    RunRecord run() const
    {
        const LatticeSpec s = spec();
        const SimulationParams p = params();
        RngStream rng(p.seed);
        Lattice initial = initial_lattice(s, p.start, rng);
        return thermalize(std::move(initial), s, p, rng);
    }
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text))
        throw CommandError(IoFailure, "cannot write " + path.string());
}

/// Magnetization-vs-sweep line plot as an RGB raster.
RgbImage plot_trace(const std::vector<TracePoint>& trace)
{
    constexpr std::size_t width = 640;
    constexpr std::size_t height = 240;
    constexpr std::size_t margin = 10;
    RgbImage image{width, height, std::vector<std::uint8_t>(3 * width * height, 255)};
    const auto put = [&](std::size_t x, std::size_t y, Rgb c) {
        const std::size_t i = 3 * (y * width + x);
        std::copy(c.begin(), c.end(), image.pixels.begin() + static_cast<std::ptrdiff_t>(i));
    };
    const auto y_of = [&](double m) {
        const double t = (1.0 - m) / 2.0; // m = 1 at the top, -1 at the bottom
        return margin + static_cast<std::size_t>(std::lround(t * static_cast<double>(height - 2 * margin - 1)));
    };
    for (std::size_t x = margin; x < width - margin; ++x)
    {
        put(x, y_of(0.0), {160, 160, 160});
        put(x, y_of(1.0), {220, 220, 220});
        put(x, y_of(-1.0), {220, 220, 220});
    }
    const std::size_t n = trace.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t x =
            margin + (n > 1 ? i * (width - 2 * margin - 1) / (n - 1) : 0);
        put(x, y_of(std::clamp(trace[i].magnetization_per_spin, -1.0, 1.0)), spin_up_color);
    }
    return image;
}

int cmd_simulate(const SimulationOptions& opts, const std::string& out_dir, const std::string& effective_config,
                 std::ostream& out)
{
    const RunRecord record = opts.run();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw CommandError(IoFailure, "cannot create " + out_dir + ": " + ec.message());

    std::ostringstream trace;
    write_trace(trace, record.trace);
    write_text(fs::path(out_dir) / "trace.csv", trace.str());
    std::ostringstream snapshot;
    write_snapshot(snapshot, record.final_lattice);
    write_text(fs::path(out_dir) / "final_lattice.txt", snapshot.str());
    write_text(fs::path(out_dir) / "config.ini", effective_config);

    const ObservableSet obs = observe(record.final_lattice, record.spec);
    out << "sweeps " << record.trace.size() << " magnetization_per_spin " << obs.magnetization_per_spin
        << " energy_per_site " << obs.energy_per_site << " staggered_magnetization " << obs.staggered_magnetization
        << '\n';
    return Success;
}

struct GenerateOptions
{
    std::string root = "corpus";
    std::vector<std::string> only;
    std::uint64_t seed = DatasetConfig{}.base_seed;
    std::string size = "100x100";
    std::size_t sweeps = 750;
    double temperature_step = 0.01;
    std::vector<std::string> counts;
    int jobs = 0;
    bool no_replicates = false;
    bool force = false;
};

BinSplitCounts parse_counts(const std::vector<std::string>& specs)
{
    BinSplitCounts counts = default_split_counts();
    for (const std::string& s : specs)
    {
        const auto eq = s.find('=');
        try
        {
            if (eq == std::string::npos)
                throw std::invalid_argument("missing '='");
            const BinLabel bin = parse_bin_label(s.substr(0, eq));
            SplitCounts c;
            char slash1 = 0;
            char slash2 = 0;
            std::istringstream in(s.substr(eq + 1));
            if (!(in >> c.train >> slash1 >> c.validation >> slash2 >> c.test) || slash1 != '/' || slash2 != '/')
                throw std::invalid_argument("expected TRAIN/VALIDATION/TEST");
            counts[static_cast<std::size_t>(bin)] = c;
        }
        catch (const std::exception& e)
        {
            throw CommandError(UsageError, "--counts '" + s + "': " + e.what());
        }
    }
    return counts;
}

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err)
{
    std::vector<Condition> conditions;
    try
    {
        if (opts.only.empty())
            conditions = standard_conditions();
        for (const std::string& name : opts.only)
            conditions.push_back(find_condition(name));
    }
    catch (const std::invalid_argument& e)
    {
        throw CommandError(UsageError, std::string("--only-bc: ") + e.what());
    }

    std::size_t total_written = 0;
    std::size_t total_images = 0;
    for (const Condition& condition : conditions)
    {
        DatasetConfig config;
        config.condition = condition;
        std::tie(config.rows, config.cols) = parse_size(opts.size);
        config.base_seed = opts.seed;
        config.thermalization_sweeps = opts.sweeps;
        config.temperature_step = opts.temperature_step;
        config.split_counts = parse_counts(opts.counts);
        config.images_per_condition = total(config.split_counts);
        config.allow_replicates = !opts.no_replicates;
        config.output_root = opts.root;
        config.jobs = opts.jobs;
        config.skip_existing = !opts.force;
        try
        {
            config.validate();
            plan_dataset(config);
        }
        catch (const std::invalid_argument& e)
        {
            throw CommandError(UsageError, e.what());
        }

        GenerationStats stats;
        DatasetManifest manifest;
        try
        {
            manifest = generate_dataset(config, &stats);
        }
        catch (const GenerationError& e)
        {
            err << "generate " << condition.name << ": " << e.what() << '\n'
                << "partial progress: " << e.stats.written << " written, " << e.stats.skipped
                << " already present, " << e.failed.size() << " failed; re-run to complete\n";
            return IoFailure;
        }
        catch (const std::exception& e)
        {
            err << "generate " << condition.name << ": " << e.what() << '\n';
            return IoFailure;
        }

        std::map<std::pair<BinLabel, Split>, std::size_t> counts;
        for (const ImageRecord& r : manifest.records)
            ++counts[{r.bin, r.split}];
        out << condition.name << ": " << manifest.records.size() << " images (" << stats.written << " written, "
            << stats.skipped << " already present) -> " << config.manifest_path().string() << '\n';
        out << "  " << std::left << std::setw(12) << "split";
        for (BinLabel b : all_bins)
            out << std::right << std::setw(7) << to_string(b);
        out << '\n';
        for (Split s : all_splits)
        {
            out << "  " << std::left << std::setw(12) << to_string(s);
            for (BinLabel b : all_bins)
                out << std::right << std::setw(7) << counts[{b, s}];
            out << '\n';
        }
        total_written += stats.written;
        total_images += manifest.records.size();
    }
    out << "total: " << total_images << " images across " << conditions.size() << " condition(s), "
        << total_written << " newly written\n";
    return Success;
}

struct ValidateOptions
{
    std::vector<std::string> manifests;
    std::size_t regenerate = 0;
    bool custom_counts = false;
    bool oracle = false;
    int jobs = 0;
};

int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err)
{
    for (const std::string& m : opts.manifests)
        if (!fs::exists(m))
            throw CommandError(UsageError, "manifest not found: " + m);

    nlohmann::ordered_json report = nlohmann::ordered_json::object();
    report["manifests"] = nlohmann::ordered_json::array();
    bool passed = true;
    for (const std::string& m : opts.manifests)
    {
        ValidationOptions vo;
        vo.require_default_counts = !opts.custom_counts;
        vo.regenerate_sample = opts.regenerate;
        vo.jobs = opts.jobs;
        const ValidationReport r = validate_manifest(m, vo);
        passed = passed && r.passed();
        report["manifests"].push_back(r.to_json());
        err << m << ": " << (r.passed() ? "ok" : "FAILED") << " (" << r.records << " records, "
            << r.findings.size() << " findings)\n";
    }
    if (opts.oracle)
    {
        OracleCheckConfig oracle_config;
#ifdef ISING_MUTANT_ACCEPTANCE_RULE
        oracle_config.rule = [](double, double) { return 1.0; }; // deliberately wrong: accept every flip
#endif
        const OracleCheckResult o = check_oracle_agreement(oracle_config);
        passed = passed && o.passed;
        report["oracle"] = {{"passed", o.passed},
                            {"exact_energy_per_site", o.exact_energy_per_site},
                            {"metropolis_energy_per_site", o.estimate.energy_per_site.mean},
                            {"energy_standard_error", o.estimate.energy_per_site.standard_error},
                            {"exact_mean_abs_m", o.exact.mean_abs_magnetization},
                            {"metropolis_mean_abs_m", o.estimate.abs_magnetization.mean},
                            {"abs_m_standard_error", o.estimate.abs_magnetization.standard_error},
                            {"seconds", o.seconds}};
        err << "oracle agreement (4x4 periodic, T=2.5): " << (o.passed ? "ok" : "FAILED") << '\n';
    }
    report["passed"] = passed;
    out << report.dump(2) << '\n';
    return passed ? Success : ValidationFailure;
}

struct TraceOptions
{
    std::string input;
    std::string format = "csv";
    std::string output;
    std::string plot;
};

int cmd_trace(const TraceOptions& opts, const SimulationOptions& sim, std::ostream& out)
{
    std::vector<TracePoint> trace;
    if (!opts.input.empty())
    {
        std::ifstream in(opts.input);
        if (!in)
            throw CommandError(IoFailure, "cannot read " + opts.input);
        try
        {
            trace = read_trace(in);
        }
        catch (const std::runtime_error& e)
        {
            throw CommandError(IoFailure, opts.input + ": " + e.what());
        }
        if (trace.empty())
            throw CommandError(IoFailure, opts.input + ": trace has no data rows");
    }
    else
    {
        trace = sim.run().trace;
    }

    char delimiter = ',';
    if (opts.format == "tsv")
        delimiter = '\t';
    else if (opts.format == "text")
        delimiter = ' ';
    else if (opts.format != "csv")
        throw CommandError(UsageError, "--format: expected csv, tsv or text");

    std::ostringstream text;
    write_trace(text, trace, delimiter);
    if (opts.output.empty())
        out << text.str();
    else
        write_text(opts.output, text.str());

    if (!opts.plot.empty())
    {
        try
        {
            write_file(opts.plot, encode_png(plot_trace(trace)));
        }
        catch (const std::runtime_error& e)
        {
            throw CommandError(IoFailure, std::string("--plot: ") + e.what());
        }
    }
    return Success;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"2D Ising model Monte Carlo engine and labeled microstate corpus generator", "ising"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "INI config file; [simulate], [generate], ... sections hold subcommand keys");
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Echo the effective configuration to stderr");

    SimulationOptions sim;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Thermalize one lattice and write its trace and final state");
    sim.attach(*simulate);
    simulate->add_option("--out", sim_out, "Output directory")->required();

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Generate labeled microstate image corpora");
    generate->add_option("--root", gen.root, "Corpus root directory")->capture_default_str();
    generate->add_option("--only-bc", gen.only,
                         "Restrict to condition(s): periodic_ferro, periodic_antiferro, skewed_ferro, "
                         "antiperiodic_ferro (bare periodic/skewed/antiperiodic accepted)");
    generate->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
    generate->add_option("--size", gen.size, "Lattice size ROWSxCOLS")->capture_default_str();
    generate->add_option("--sweeps", gen.sweeps, "Thermalization sweeps per image")->capture_default_str();
    generate->add_option("--temperature-step", gen.temperature_step, "Temperature grid step")->capture_default_str();
    generate->add_option("--counts", gen.counts, "Per-bin split counts, e.g. CR=90/60/70 (repeatable)");
    generate->add_option("--jobs", gen.jobs, "Worker threads (0: all cores)")->capture_default_str();
    generate->add_flag("--no-replicates", gen.no_replicates, "Use each grid temperature at most once per bin");
    generate->add_flag("--force", gen.force, "Regenerate images that already exist");

    ValidateOptions val;
    auto* validate = app.add_subcommand("validate", "Check corpus manifests (and optionally the sampler)");
    validate->add_option("manifests", val.manifests, "manifest.json path(s)");
    validate->add_option("--regenerate", val.regenerate, "Re-render N sampled records and byte-compare")
        ->capture_default_str();
    validate->add_flag("--custom-counts", val.custom_counts, "Accept split counts other than the 1300-image defaults");
    validate->add_flag("--oracle", val.oracle, "Also run the 4x4 Metropolis-vs-enumeration agreement test");
    validate->add_option("--jobs", val.jobs, "Worker threads for --regenerate")->capture_default_str();

    TraceOptions tr;
    SimulationOptions trace_sim;
    auto* trace = app.add_subcommand("trace", "Emit a magnetization-vs-sweep series from a file or a fresh run");
    trace->add_option("--in", tr.input, "Existing trace file (otherwise simulate with the flags below)");
    trace->add_option("--format", tr.format, "csv, tsv or text")->capture_default_str();
    trace->add_option("--out", tr.output, "Write the series here instead of stdout");
    trace->add_option("--plot", tr.plot, "Also render a PNG plot");
    trace_sim.attach(*trace);

    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - 1);
    try
    {
        app.parse(argv_rev);
    }
    catch (const CLI::CallForHelp& e)
    {
        out << app.help();
        return Success;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        err << "run with --help for usage\n";
        return UsageError;
    }

    std::string effective;
    for (const CLI::App* sub : app.get_subcommands())
        effective += "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
    if (verbosity > 0)
        err << "# effective configuration\n" << effective;

    try
    {
        if (simulate->parsed())
            return cmd_simulate(sim, sim_out, effective, out);
        if (generate->parsed())
            return cmd_generate(gen, out, err);
        if (validate->parsed())
        {
            if (val.manifests.empty() && !val.oracle)
                throw CommandError(UsageError, "validate: give at least one manifest or --oracle");
            return cmd_validate(val, out, err);
        }
        if (trace->parsed())
            return cmd_trace(tr, trace_sim, out);
    }
    catch (const CommandError& e)
    {
        err << "error: " << e.what() << '\n';
        return e.code;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return UsageError;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return IoFailure;
    }
    return UsageError;
}

} // namespace ising::cli
