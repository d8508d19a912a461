#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemsim/sim.hpp"

namespace lemsim {

std::string_view version();

/// What one batch invocation ran; written to manifest.txt next to the CSVs.
struct RunManifest {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out_dir;
    std::vector<Scenario> scenarios;
    std::vector<Mechanism> mechanisms;
    std::vector<std::uint64_t> seeds;
    std::string version;
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

/// Parses "N..M" (inclusive) or a single "N".
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

/// Runs every configured (scenario, mechanism, seed) combination on up to
/// `jobs` threads and returns one report per (scenario, mechanism) in config
/// order. Results do not depend on `jobs`.
std::vector<MetricsReport> run_batch(const std::vector<ScenarioConfig>& configs,
                                     const std::vector<std::uint64_t>& seeds, unsigned jobs,
                                     std::ostream* log = nullptr);

/// Writes metrics.csv, settlement.csv, summary.csv, trades.csv, clearing.csv,
/// manifest.txt and the .dat series into `dir`. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const std::vector<MetricsReport>& reports,
                                                 const RunManifest& manifest);

/// Command-line entry point. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lemsim
