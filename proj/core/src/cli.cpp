#include "lemsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include "lemsim/config.hpp"
#include "lemsim/report_io.hpp"
#include "text_util.hpp"

#ifndef LEMSIM_VERSION
#define LEMSIM_VERSION "0.0.0"
#endif

namespace lemsim {

namespace fs = std::filesystem;

std::string_view version() { return LEMSIM_VERSION; }

void write_manifest(std::ostream& out, const RunManifest& m)
{
    out << "version " << m.version << '\n';
    out << "config " << (m.config ? m.config->generic_string() : std::string("<defaults>")) << '\n';
    out << "scenarios";
    for (auto s : m.scenarios) out << ' ' << static_cast<int>(s);
    out << "\nmechanisms";
    for (auto x : m.mechanisms) out << ' ' << to_string(x);
    out << "\nseeds";
    for (auto s : m.seeds) out << ' ' << s;
    out << '\n';
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text)
{
    const auto t = detail::trim(text);
    const auto dots = t.find("..");
    const auto first = detail::parse_number_or_throw<std::uint64_t>(t.substr(0, dots), "seed");
    const auto last = dots == std::string_view::npos ? first
                                                     : detail::parse_number_or_throw<std::uint64_t>(t.substr(dots + 2), "seed");
    if (last < first) throw std::invalid_argument("seed range '" + std::string(t) + "' is empty");
    if (last - first >= 100000) throw std::invalid_argument("seed range '" + std::string(t) + "' is too large");
    std::vector<std::uint64_t> seeds;
    for (auto s = first;; ++s) {
        seeds.push_back(s);
        if (s == last) break;
    }
    return seeds;
}

std::vector<MetricsReport> run_batch(const std::vector<ScenarioConfig>& configs,
                                     const std::vector<std::uint64_t>& seeds, unsigned jobs, std::ostream* log)
{
    struct Task {
        std::size_t config;
        std::size_t slot;
        std::uint64_t seed;
    };
    std::vector<std::vector<RunResult>> results(configs.size());
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        validate(configs[c]);
        std::vector<std::uint64_t> own = seeds;
        if (own.empty())
            for (int r = 0; r < configs[c].n_seed_replicates; ++r) own.push_back(configs[c].seed + static_cast<std::uint64_t>(r));
        results[c].resize(own.size());
        for (std::size_t i = 0; i < own.size(); ++i) tasks.push_back({c, i, own[i]});
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&] {
        while (!failed) {
            const std::size_t i = next++;
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            try {
                results[t.config][t.slot] = run_single(configs[t.config], t.seed);
                if (log) {
                    std::lock_guard lock(mu);
                    *log << "done scenario " << static_cast<int>(configs[t.config].scenario) << ' '
                         << to_string(configs[t.config].mechanism) << " seed " << t.seed << '\n';
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    const unsigned n = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::vector<MetricsReport> reports;
    for (std::size_t c = 0; c < configs.size(); ++c) reports.push_back(assemble_report(configs[c], std::move(results[c])));
    return reports;
}

std::vector<fs::path> write_outputs(const fs::path& dir, const std::vector<MetricsReport>& reports,
                                    const RunManifest& manifest)
{
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, auto&& body) {
        const fs::path path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        written.push_back(path);
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("error writing " + path.string());
    };
    try {
        emit("metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, reports); });
        emit("settlement.csv", [&](std::ostream& o) { write_settlement_csv(o, reports); });
        emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, reports); });
        emit("trades.csv", [&](std::ostream& o) { write_trades_csv(o, reports); });
        emit("clearing.csv", [&](std::ostream& o) { write_clearing_runs_csv(o, reports); });
        for (const auto& r : reports)
            for (auto s : {Series::avg_price, Series::traded})
                emit(series_file_name(r, s), [&](std::ostream& o) { write_series_dat(o, r, s); });
        emit("manifest.txt", [&](std::ostream& o) { write_manifest(o, manifest); });
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
    return written;
}

namespace {

std::vector<Mechanism> parse_mechanism_list(const std::string& text)
{
    std::vector<Mechanism> out;
    for (auto part : detail::split(text, ',')) {
        const auto m = parse_mechanism(detail::trim(part));
        if (std::find(out.begin(), out.end(), m) != out.end())
            throw std::invalid_argument("mechanism '" + std::string(to_string(m)) + "' listed twice");
        out.push_back(m);
    }
    return out;
}

std::vector<Scenario> parse_scenario_flag(const std::string& text)
{
    if (text == "1") return {Scenario::pv_surplus};
    if (text == "2") return {Scenario::battery_reserve};
    if (text == "all") return {Scenario::pv_surplus, Scenario::battery_reserve};
    throw std::invalid_argument("--scenario must be 1, 2 or all");
}

void print_totals(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    // means over seeds; full precision is in summary.csv
    out << "scenario mechanism   seeds    q_t_kwh   savings    profit\n";
    for (const auto& r : reports) {
        char line[128];
        std::snprintf(line, sizeof line, "%-8d %-12s %5zu %10.3f %9.2f %9.2f\n", static_cast<int>(r.scenario),
                      std::string(to_string(r.mechanism)).c_str(), r.runs.size(), r.total.traded_kwh.mean,
                      r.total.savings.mean, r.total.profit.mean);
        out << line;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Local energy market simulator: HEMS scheduling, P2P double auction, equilibrium and VCG clearing"};
    app.set_version_flag("--version", std::string(version()));

    std::string config_path, out_dir, scenario, mechanisms, seeds_text;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (default: $LEMSIM_OUT)");
    app.add_option("--scenario", scenario, "Scenario: 1, 2 or all")->check(CLI::IsMember({"1", "2", "all"}));
    app.add_option("--mechanisms", mechanisms, "Comma-separated list of p2p, centralized, vcg");
    auto* seed_opt = app.add_option("--seed", seed, "Single seed");
    auto* seeds_opt = app.add_option("--seeds", seeds_text, "Inclusive seed range N..M");
    seed_opt->excludes(seeds_opt);
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_flag("--verbose", verbose, "Progress messages on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (out_dir.empty()) {
        if (const char* env = std::getenv("LEMSIM_OUT"); env && *env) out_dir = env;
    }
    if (out_dir.empty()) {
        err << "lemsim: no output directory; pass --out DIR or set LEMSIM_OUT\n";
        return 2;
    }

    RunManifest manifest;
    std::vector<ScenarioConfig> configs;
    std::vector<std::uint64_t> seeds;
    try {
        ConfigOverrides ov;
        if (!scenario.empty()) ov.scenarios = parse_scenario_flag(scenario);
        if (!mechanisms.empty()) ov.mechanisms = parse_mechanism_list(mechanisms);
        if (config_path.empty()) {
            configs = parse_config_text("", "<defaults>", {}, ov);
        } else {
            manifest.config = config_path;
            configs = parse_config(config_path, ov);
        }
        if (seed) seeds = {*seed};
        else if (!seeds_text.empty()) seeds = parse_seed_range(seeds_text);
    } catch (const std::exception& e) {
        err << "lemsim: " << e.what() << '\n';
        return 2;
    }

    manifest.out_dir = out_dir;
    manifest.version = std::string(version());
    for (const auto& c : configs) {
        if (std::find(manifest.scenarios.begin(), manifest.scenarios.end(), c.scenario) == manifest.scenarios.end())
            manifest.scenarios.push_back(c.scenario);
        if (std::find(manifest.mechanisms.begin(), manifest.mechanisms.end(), c.mechanism) == manifest.mechanisms.end())
            manifest.mechanisms.push_back(c.mechanism);
    }
    if (seeds.empty())
        for (int r = 0; r < configs.front().n_seed_replicates; ++r) manifest.seeds.push_back(configs.front().seed + r);
    else
        manifest.seeds = seeds;

    const fs::path dir(out_dir);
    bool created = false;
    try {
        std::error_code ec;
        if (!fs::exists(dir, ec)) {
            fs::create_directories(dir);
            created = true;
        } else if (!fs::is_directory(dir, ec)) {
            throw std::runtime_error("'" + out_dir + "' exists and is not a directory");
        }
        std::vector<MetricsReport> reports = run_batch(configs, seeds, jobs, verbose ? &err : nullptr);
        const auto files = write_outputs(dir, reports, manifest);
        if (verbose) err << "wrote " << files.size() << " files to " << dir.string() << '\n';
        print_totals(out, reports);
    } catch (const std::exception& e) {
        err << "lemsim: " << e.what() << '\n';
        std::error_code ec;
        if (created) fs::remove_all(dir, ec);
        return 1;
    }
    return 0;
}

}  // namespace lemsim
