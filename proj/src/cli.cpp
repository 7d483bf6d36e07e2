#include "pqdsim/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pqdsim/config.hpp"
#include "pqdsim/errors.hpp"
#include "pqdsim/oracle.hpp"
#include "pqdsim/sampler.hpp"
#include "pqdsim/simulability.hpp"
#include "pqdsim/thresholds.hpp"

#ifndef PQDSIM_VERSION
#define PQDSIM_VERSION "0.0.0"
#endif

namespace pqdsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return PQDSIM_VERSION; }

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out_dir;
    bool quiet = false;
};

struct RunManifest {
    RunManifest(std::string sub, std::optional<std::string> hash)
        : subcommand(std::move(sub)), config_hash(std::move(hash)) {}

    std::string subcommand;
    std::optional<std::string> config_hash;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::vector<std::string> outputs;
    json extra = json::object();

    json to_json() const {
        json j = {{"tool", "pqdsim"},
                  {"version", tool_version()},
                  {"subcommand", subcommand},
                  {"config_hash", config_hash ? json(*config_hash) : json(nullptr)},
                  {"seed", seed},
                  {"wall_time_s", wall_time},
                  {"outputs", outputs}};
        for (const auto& [k, v] : extra.items()) j[k] = v;
        return j;
    }
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path artifact_path(const GlobalOptions& g, const std::string& name) {
    return (g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir)) / name;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write " + path.string());
    f << text;
}

void write_manifest(const GlobalOptions& g, RunManifest& m, const fs::path& path, double wall_time) {
    m.wall_time = wall_time;
    m.seed = g.seed;
    write_text(path, m.to_json().dump(2) + "\n");
}

fs::path default_manifest(const GlobalOptions& g, const std::string& subcommand) {
    return artifact_path(g, "pqdsim-" + subcommand + ".manifest.json");
}

// --- subcommands ----------------------------------------------------------

int cmd_check(const GlobalOptions& g, const std::string& config_path, std::ostream& out) {
    Timer timer;
    const ExperimentConfig config = parse_config(config_path);
    const SimulabilityReport report = check_second_condition(config);
    const json j = report_to_json(report);
    if (!g.quiet) out << report_summary(report);
    out << j.dump(2) << '\n';

    RunManifest m{"check", config_hash(config)};
    if (!g.out_dir.empty()) {
        const auto path = artifact_path(g, "report.json");
        write_text(path, j.dump(2) + "\n");
        m.outputs.push_back(path.string());
    }
    m.extra["simulatable"] = report.simulatable;
    write_manifest(g, m, default_manifest(g, "check"), timer.seconds());
    return report.simulatable ? kExitOk : kExitRefused;
}

struct SampleArgs {
    std::string config;
    std::size_t samples = 100000;
    std::string out_file;
    std::optional<int> condition;
    std::string format = "csv";
    unsigned workers = 1;
};

int cmd_sample(const GlobalOptions& g, const SampleArgs& a, std::ostream& out, std::ostream& err) {
    Timer timer;
    const ExperimentConfig config = parse_config(a.config);
    SamplerOptions options;
    options.workers = a.workers;
    const SampleBatch batch = run_sampler(config, a.samples, RngStream(g.seed), options, a.condition);
    const double sampling_time = timer.seconds();
    const SampleFormat format = a.format == "jsonl" ? SampleFormat::Jsonl : SampleFormat::Csv;

    RunManifest m{"sample", batch.config_hash};
    fs::path manifest_path = default_manifest(g, "sample");
    if (a.out_file.empty()) {
        write_samples(batch, out, format);
    } else {
        fs::path path(a.out_file);
        if (path.is_relative() && !g.out_dir.empty()) path = fs::path(g.out_dir) / path;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("out", "cannot write " + path.string());
        write_samples(batch, f, format);
        m.outputs.push_back(path.string());
        manifest_path = path.string() + ".manifest.json";
    }
    m.extra["samples"] = batch.size();
    m.extra["condition"] = batch.condition;
    m.extra["workers"] = a.workers;
    m.extra["format"] = a.format;
    if (!g.quiet) {
        const EmpiricalStats stats = empirical_stats(batch);
        err << fmt::format("{} samples (condition {}) in {:.3f} s, mean clicks {:.4f}\n", batch.size(),
                           batch.condition, sampling_time, stats.mean_clicks);
    }
    write_manifest(g, m, manifest_path, timer.seconds());
    return kExitOk;
}

int cmd_oracle(const GlobalOptions& g, const std::string& config_path, std::optional<int> requested,
               std::ostream& out) {
    Timer timer;
    const ExperimentConfig config = parse_config(config_path);
    const int n_max = requested.value_or(suggested_n_max(config.input));
    const ProbabilityTable table = exact_distribution(config, n_max);
    const json j = table_to_json(table);
    out << j.dump(2) << '\n';
    RunManifest m{"oracle", config_hash(config)};
    if (!g.out_dir.empty()) {
        const auto path = artifact_path(g, "oracle.json");
        write_text(path, j.dump(2) + "\n");
        m.outputs.push_back(path.string());
    }
    m.extra["n_max"] = n_max;
    write_manifest(g, m, default_manifest(g, "oracle"), timer.seconds());
    return kExitOk;
}

struct CompareArgs {
    std::string config;
    std::string oracle_config;
    std::size_t samples = 100000;
    double tolerance = 0.02;
    std::optional<int> n_max;
    std::optional<int> condition;
    unsigned workers = 1;
};

int cmd_compare(const GlobalOptions& g, const CompareArgs& a, std::ostream& out) {
    Timer timer;
    const ExperimentConfig config = parse_config(a.config);
    const ExperimentConfig reference = a.oracle_config.empty() ? config : parse_config(a.oracle_config);
    // Oracle first: its size guard should refuse before any sampling work.
    const ProbabilityTable exact =
        exact_distribution(reference, a.n_max.value_or(suggested_n_max(reference.input)));
    SamplerOptions options;
    options.workers = a.workers;
    const SampleBatch batch = run_sampler(config, a.samples, RngStream(g.seed), options, a.condition);
    const double tv = tv_distance(exact, batch);
    const bool pass = tv <= a.tolerance;

    out << fmt::format("TV distance {:.6f} (tolerance {:.6f}, {} samples): {}\n", tv, a.tolerance, batch.size(),
                       pass ? "PASS" : "FAIL");
    RunManifest m{"compare", batch.config_hash};
    if (!g.out_dir.empty()) {
        json empirical = json::object();
        for (const auto& [outcome, count] : batch.counts)
            empirical[outcome] = static_cast<double>(count) / static_cast<double>(batch.size());
        const json j{{"tv_distance", tv},   {"tolerance", a.tolerance}, {"pass", pass},
                     {"oracle", table_to_json(exact)}, {"empirical", empirical}};
        const auto path = artifact_path(g, "compare.json");
        write_text(path, j.dump(2) + "\n");
        m.outputs.push_back(path.string());
    }
    m.extra["oracle_config_hash"] = config_hash(reference);
    m.extra["tv_distance"] = tv;
    m.extra["tolerance"] = a.tolerance;
    m.extra["samples"] = batch.size();
    m.extra["pass"] = pass;
    write_manifest(g, m, default_manifest(g, "compare"), timer.seconds());
    return pass ? kExitOk : kExitQuantitativeFail;
}

struct ThresholdArgs {
    ScenarioParams params;
    std::string scheme = "both";
    bool as_json = false;
};

int cmd_thresholds(const GlobalOptions& g, const ThresholdArgs& a, std::ostream& out) {
    Timer timer;
    std::vector<ThresholdRow> rows;
    if (a.scheme != "spdc") {
        auto r = threshold_table(a.params, Scheme::SinglePhoton);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (a.scheme != "single-photon") {
        auto r = threshold_table(a.params, Scheme::Spdc);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const json j = thresholds_to_json(rows);
    if (a.as_json) {
        out << j.dump(2) << '\n';
    } else {
        out << thresholds_text(rows);
    }
    RunManifest m{"thresholds", std::nullopt};
    if (!g.out_dir.empty()) {
        const auto path = artifact_path(g, "thresholds.json");
        write_text(path, j.dump(2) + "\n");
        m.outputs.push_back(path.string());
    }
    write_manifest(g, m, default_manifest(g, "thresholds"), timer.seconds());
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-space sampling of imperfect boson-sampling experiments", "pqdsim"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", tool_version());

    GlobalOptions g;
    app.add_option("--seed", g.seed, "64-bit RNG seed");
    app.add_option("--out", g.out_dir, "directory for reports and run manifests");
    app.add_flag("--quiet", g.quiet, "suppress human-readable summaries");

    std::string check_config;
    auto* check = app.add_subcommand("check", "simulability report for a config");
    check->add_option("--config", check_config, "experiment config (JSON)")->required();

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "draw click patterns");
    sample->add_option("--config", sample_args.config, "experiment config (JSON)")->required();
    sample->add_option("--samples", sample_args.samples, "number of samples")->check(CLI::PositiveNumber);
    sample->add_option("--out", sample_args.out_file, "sample file (default: standard output)");
    sample->add_option("--condition", sample_args.condition, "1 = output-state route, 2 = transition route")
        ->check(CLI::IsMember({1, 2}));
    sample->add_option("--format", sample_args.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sample->add_option("--workers", sample_args.workers, "worker threads")->check(CLI::Range(1u, 1024u));

    std::string oracle_config;
    std::optional<int> oracle_n_max;
    auto* oracle = app.add_subcommand("oracle", "exact click distribution (small configs)");
    oracle->add_option("--config", oracle_config, "experiment config (JSON)")->required();
    oracle->add_option("--n-max", oracle_n_max, "photon truncation per source (default: smallest within 1e-6)");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "sampler against the exact oracle");
    compare->add_option("--config", compare_args.config, "sampler config (JSON)")->required();
    compare->add_option("--oracle-config", compare_args.oracle_config, "oracle config (default: same)");
    compare->add_option("--samples", compare_args.samples, "number of samples")->check(CLI::PositiveNumber);
    compare->add_option("--tolerance", compare_args.tolerance, "TV distance tolerance");
    compare->add_option("--n-max", compare_args.n_max, "photon truncation per source (default: smallest within 1e-6)");
    compare->add_option("--condition", compare_args.condition, "force condition 1 or 2")
        ->check(CLI::IsMember({1, 2}));
    compare->add_option("--workers", compare_args.workers, "worker threads")->check(CLI::Range(1u, 1024u));

    ThresholdArgs threshold_args;
    auto& p = threshold_args.params;
    auto* thresholds = app.add_subcommand("thresholds", "uniform-loss threshold tables");
    thresholds->add_option("--scheme", threshold_args.scheme, "single-photon, spdc or both")
        ->check(CLI::IsMember({"single-photon", "spdc", "both"}));
    thresholds->add_option("--mu", p.purity, "single-photon purity");
    thresholds->add_option("--eta-b", p.mode_match, "source mode matching");
    thresholds->add_option("--eta0", p.eta0, "transmission per network element");
    thresholds->add_option("--ell", p.ell, "ports per network element");
    thresholds->add_option("--eta-d", p.detector_eta, "detector efficiency");
    thresholds->add_option("--f-b", p.input_fraction, "counted fraction of input-lost photons");
    thresholds->add_option("--f-l", p.network_fraction, "counted fraction of network-lost photons");
    thresholds->add_option("--modes", p.modes, "mode counts")->delimiter(',');
    thresholds->add_flag("--json", threshold_args.as_json, "emit JSON instead of a table");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*check) return cmd_check(g, check_config, out);
        if (*sample) return cmd_sample(g, sample_args, out, err);
        if (*oracle) return cmd_oracle(g, oracle_config, oracle_n_max, out);
        if (*compare) return cmd_compare(g, compare_args, out);
        if (*thresholds) return cmd_thresholds(g, threshold_args, out);
    } catch (const NotSimulatable& e) {
        err << "refused: " << e.what() << '\n' << report_summary(e.report());
        return kExitRefused;
    } catch (const SimulabilityViolated& e) {
        err << "refused: " << e.what() << '\n';
        return kExitRefused;
    } catch (const NegativeQuasiprobability& e) {
        err << "refused: " << e.what() << '\n';
        return kExitRefused;
    } catch (const OracleLimit& e) {
        err << "oracle refused: " << e.what() << '\n';
        return kExitUsage;
    } catch (const TruncationError& e) {
        err << "oracle refused: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace pqdsim
