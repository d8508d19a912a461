#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lemsim/sim.hpp"

namespace lemsim {

/// Parse or validation failure; the message starts with "source:line:" when
/// a line can be blamed.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config files are flat "key = value" (or "key: value") lines grouped in sections:
//
//   [run]       scenario (1, 2, "1,2" or all), mechanism (list), seed, replicates
//   [profiles]  n_households, n_prosumers, base_load, appliance_event_rate,
//               appliance_event_energy (lo,hi), pv_peak (lo,hi), pv_noise,
//               daylight_window (sunrise,sunset slots), slots_per_day, file
//   [battery]   capacity, max_charge, max_discharge, efficiency, initial_soc
//   [hems]      soc_steps, interval_slots
//   [tariff]    segment = start_minute,buy,sell (repeatable) or file
//   [market]    trading_hours, trading_hours_s1, trading_hours_s2 (e.g. 8-15 or 7,9,11),
//               period_minutes, lambda (number or auto), reserve_fraction,
//               prosumer_buyers, zip_beta, zip_gamma, zip_initial_margin,
//               zip_perturb_relative, zip_perturb_absolute, zip_activity
//
// '#' and ';' start comments. Unknown sections or keys are errors. Relative
// file paths resolve against the config file's directory. One ScenarioConfig
// is produced per (scenario, mechanism) pair.

/// Command-line choices that replace the file's [run] scenario/mechanism lists.
struct ConfigOverrides {
    std::optional<std::vector<Scenario>> scenarios;
    std::optional<std::vector<Mechanism>> mechanisms;
};

std::vector<ScenarioConfig> parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
std::vector<ScenarioConfig> parse_config_text(std::string_view text, std::string_view source = "<config>",
                                              const std::filesystem::path& base_dir = {},
                                              const ConfigOverrides& overrides = {});

/// Parses "8-15", "7,9,11" or mixtures into period start slots (hour * 60).
std::vector<int> parse_hours(std::string_view text);

}  // namespace lemsim
