#include "lemsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "text_util.hpp"

namespace lemsim {

namespace {

using detail::trim;

struct Location {
    std::string source;
    int line = 0;
};

[[noreturn]] void fail(const Location& at, const std::string& msg)
{
    throw ConfigError(at.source + ":" + std::to_string(at.line) + ": " + msg);
}

double to_double(std::string_view v, const std::string& key)
{
    double d = 0.0;
    if (!detail::parse_number(v, d)) throw std::invalid_argument(key + ": expected a number, got '" + std::string(v) + "'");
    return d;
}

long long to_int(std::string_view v, const std::string& key)
{
    long long i = 0;
    if (!detail::parse_number(v, i)) throw std::invalid_argument(key + ": expected an integer, got '" + std::string(v) + "'");
    return i;
}

bool to_bool(std::string_view v, const std::string& key)
{
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw std::invalid_argument(key + ": expected true or false, got '" + std::string(v) + "'");
}

std::pair<double, double> to_range(std::string_view v, const std::string& key)
{
    const auto parts = detail::split(v, ',');
    if (parts.size() != 2) throw std::invalid_argument(key + ": expected 'lo,hi'");
    const double lo = to_double(trim(parts[0]), key), hi = to_double(trim(parts[1]), key);
    if (hi < lo) throw std::invalid_argument(key + ": lo must not exceed hi");
    return {lo, hi};
}

void require(bool ok, const std::string& msg)
{
    if (!ok) throw std::invalid_argument(msg);
}

struct Parsed {
    ScenarioConfig base;
    std::vector<Scenario> scenarios{Scenario::pv_surplus};
    std::vector<Mechanism> mechanisms{Mechanism::p2p};
    std::optional<std::vector<int>> hours_all, hours_s1, hours_s2;
    std::vector<TariffSegment> segments;
    std::map<std::string, int> lines;  // "section.key" -> line
};

}  // namespace

std::vector<int> parse_hours(std::string_view text)
{
    std::vector<int> out;
    for (auto part : detail::split(text, ',')) {
        part = trim(part);
        if (part.empty()) throw std::invalid_argument("trading hours: empty entry");
        const auto dash = part.find('-');
        const long long a = to_int(trim(part.substr(0, dash)), "trading hours");
        const long long b = dash == std::string_view::npos ? a : to_int(trim(part.substr(dash + 1)), "trading hours");
        if (a < 0 || b > 23 || a > b) throw std::invalid_argument("trading hours: '" + std::string(part) + "' is not within 0-23");
        for (long long h = a; h <= b; ++h) out.push_back(static_cast<int>(h * 60));
    }
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw std::invalid_argument("trading hours: an hour is listed twice");
    return out;
}

std::vector<ScenarioConfig> parse_config_text(std::string_view text, std::string_view source,
                                              const std::filesystem::path& base_dir, const ConfigOverrides& overrides)
{
    Parsed p;
    auto& c = p.base;
    std::optional<std::filesystem::path> tariff_file;

    using Handler = std::function<void(std::string_view, const std::string&)>;
    const std::map<std::string, Handler, std::less<>> handlers{
        {"run.scenario",
         [&](std::string_view v, const std::string&) {
             p.scenarios.clear();
             if (v == "all") {
                 p.scenarios = {Scenario::pv_surplus, Scenario::battery_reserve};
                 return;
             }
             for (auto s : detail::split(v, ',')) {
                 const auto t = trim(s);
                 if (t == "1") p.scenarios.push_back(Scenario::pv_surplus);
                 else if (t == "2") p.scenarios.push_back(Scenario::battery_reserve);
                 else throw std::invalid_argument("scenario must be 1, 2 or all, got '" + std::string(t) + "'");
             }
         }},
        {"run.mechanism",
         [&](std::string_view v, const std::string&) {
             p.mechanisms.clear();
             for (auto m : detail::split(v, ',')) p.mechanisms.push_back(parse_mechanism(trim(m)));
         }},
        {"run.seed",
         [&](std::string_view v, const std::string& k) {
             const auto s = to_int(v, k);
             require(s >= 0, "seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"run.replicates",
         [&](std::string_view v, const std::string& k) {
             const auto n = to_int(v, k);
             require(n >= 1, "replicates must be at least 1");
             c.n_seed_replicates = static_cast<int>(n);
         }},
        {"profiles.n_households", [&](std::string_view v, const std::string& k) { c.population.n_households = static_cast<int>(to_int(v, k)); }},
        {"profiles.n_prosumers", [&](std::string_view v, const std::string& k) { c.population.n_prosumers = static_cast<int>(to_int(v, k)); }},
        {"profiles.slots_per_day", [&](std::string_view v, const std::string& k) { c.population.slots_per_day = static_cast<int>(to_int(v, k)); }},
        {"profiles.base_load", [&](std::string_view v, const std::string& k) { c.population.base_load = to_double(v, k); }},
        {"profiles.appliance_event_rate", [&](std::string_view v, const std::string& k) { c.population.appliance_event_rate = to_double(v, k); }},
        {"profiles.appliance_event_energy", [&](std::string_view v, const std::string& k) { c.population.appliance_event_energy = to_range(v, k); }},
        {"profiles.pv_peak", [&](std::string_view v, const std::string& k) { c.population.pv_peak = to_range(v, k); }},
        {"profiles.pv_noise", [&](std::string_view v, const std::string& k) { c.population.pv_noise = to_double(v, k); }},
        {"profiles.daylight_window",
         [&](std::string_view v, const std::string& k) {
             const auto r = to_range(v, k);
             c.population.daylight_window = {static_cast<int>(r.first), static_cast<int>(r.second)};
         }},
        {"profiles.file",
         [&](std::string_view v, const std::string&) {
             const auto path = base_dir / std::filesystem::path(std::string(v));
             std::ifstream in(path);
             if (!in) throw std::invalid_argument("cannot open profiles file '" + path.string() + "'");
             c.fixed_profiles = std::make_shared<const std::vector<HouseholdProfile>>(read_profiles_csv(in));
         }},
        {"battery.capacity", [&](std::string_view v, const std::string& k) { c.battery.capacity = to_double(v, k); }},
        {"battery.max_charge", [&](std::string_view v, const std::string& k) { c.battery.max_charge = to_double(v, k); }},
        {"battery.max_discharge", [&](std::string_view v, const std::string& k) { c.battery.max_discharge = to_double(v, k); }},
        {"battery.efficiency",
         [&](std::string_view v, const std::string& k) {
             c.battery.efficiency = to_double(v, k);
             require(c.battery.efficiency > 0.0 && c.battery.efficiency <= 1.0, "efficiency must lie in (0, 1]");
         }},
        {"battery.initial_soc", [&](std::string_view v, const std::string& k) { c.battery.initial_soc = to_double(v, k); }},
        {"hems.soc_steps", [&](std::string_view v, const std::string& k) { c.hems.soc_steps = static_cast<int>(to_int(v, k)); }},
        {"hems.interval_slots", [&](std::string_view v, const std::string& k) { c.hems.interval_slots = static_cast<int>(to_int(v, k)); }},
        {"tariff.segment",
         [&](std::string_view v, const std::string&) {
             const auto parts = detail::split(v, ',');
             require(parts.size() == 3, "segment: expected 'start_minute,buy,sell'");
             p.segments.push_back({static_cast<int>(to_int(trim(parts[0]), "segment start")), parse_price(trim(parts[1])),
                                   parse_price(trim(parts[2]))});
         }},
        {"tariff.file", [&](std::string_view v, const std::string&) { tariff_file = base_dir / std::filesystem::path(std::string(v)); }},
        {"market.trading_hours", [&](std::string_view v, const std::string&) { p.hours_all = parse_hours(v); }},
        {"market.trading_hours_s1", [&](std::string_view v, const std::string&) { p.hours_s1 = parse_hours(v); }},
        {"market.trading_hours_s2", [&](std::string_view v, const std::string&) { p.hours_s2 = parse_hours(v); }},
        {"market.period_minutes",
         [&](std::string_view v, const std::string& k) {
             c.period_minutes = static_cast<int>(to_int(v, k));
             require(c.period_minutes >= 1, "period_minutes must be positive");
         }},
        {"market.lambda",
         [&](std::string_view v, const std::string& k) {
             if (v == "auto") {
                 c.lambda.reset();
                 return;
             }
             c.lambda = to_double(v, k);
             require(*c.lambda > 0.0, "lambda must be positive");
         }},
        {"market.reserve_fraction",
         [&](std::string_view v, const std::string& k) {
             c.reserve_fraction = to_double(v, k);
             require(c.reserve_fraction >= 0.0 && c.reserve_fraction <= 1.0,
                     "reserve_fraction " + std::string(v) + " is out of range [0, 1]");
         }},
        {"market.prosumer_buyers", [&](std::string_view v, const std::string& k) { c.prosumer_buyers = to_bool(v, k); }},
        {"market.zip_beta", [&](std::string_view v, const std::string& k) { c.zip.beta = to_range(v, k); }},
        {"market.zip_gamma", [&](std::string_view v, const std::string& k) { c.zip.gamma = to_range(v, k); }},
        {"market.zip_initial_margin", [&](std::string_view v, const std::string& k) { c.zip.initial_margin = to_range(v, k); }},
        {"market.zip_perturb_relative", [&](std::string_view v, const std::string& k) { c.zip.perturb_relative = to_double(v, k); }},
        {"market.zip_perturb_absolute", [&](std::string_view v, const std::string& k) { c.zip.perturb_absolute = to_double(v, k); }},
        {"market.zip_activity", [&](std::string_view v, const std::string& k) { c.zip.activity = to_double(v, k); }},
    };

    const std::string src(source);
    std::string section = "run";
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const Location at{src, line_no};
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(at, "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> known{"run", "profiles", "battery", "hems", "tariff", "market"};
            if (!known.contains(section)) fail(at, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find_first_of("=:");
        if (eq == std::string_view::npos) fail(at, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        const auto h = handlers.find(full);
        if (h == handlers.end()) fail(at, "unknown key '" + key + "' in section [" + section + "]");
        if (value.empty()) fail(at, "missing value for '" + key + "'");
        if (full != "tariff.segment" && p.lines.contains(full)) fail(at, "duplicate key '" + key + "'");
        p.lines[full] = line_no;
        try {
            h->second(value, key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(at, e.what());
        }
    }

    auto line_of = [&](const std::string& k) { return p.lines.contains(k) ? p.lines.at(k) : 0; };

    if (!c.fixed_profiles && c.population.n_prosumers > c.population.n_households) {
        const int l = std::max(line_of("profiles.n_prosumers"), line_of("profiles.n_households"));
        fail({src, l}, "n_prosumers (" + std::to_string(c.population.n_prosumers) + ") exceeds n_households (" +
                           std::to_string(c.population.n_households) + ")");
    }
    if (c.battery.initial_soc > c.battery.capacity) {
        const int l = std::max(line_of("battery.initial_soc"), line_of("battery.capacity"));
        fail({src, l}, "initial_soc exceeds capacity");
    }

    if (tariff_file && !p.segments.empty()) fail({src, line_of("tariff.file")}, "give either tariff segments or a tariff file, not both");
    try {
        if (tariff_file) {
            std::ifstream tf(*tariff_file);
            if (!tf) throw std::invalid_argument("cannot open tariff file '" + tariff_file->string() + "'");
            c.tariff = read_tariff_csv(tf, c.population.slots_per_day);
        } else if (!p.segments.empty()) {
            c.tariff = TariffSchedule(p.segments, c.population.slots_per_day);
        } else if (c.population.slots_per_day != kMinutesPerDay) {
            throw std::invalid_argument("a non-default slots_per_day needs an explicit tariff");
        }
    } catch (const std::invalid_argument& e) {
        fail({src, tariff_file ? line_of("tariff.file") : line_of("tariff.segment")}, e.what());
    }

    if (overrides.scenarios) p.scenarios = *overrides.scenarios;
    if (overrides.mechanisms) p.mechanisms = *overrides.mechanisms;
    if (p.scenarios.empty() || p.mechanisms.empty()) throw ConfigError(src + ": no scenario or mechanism selected");

    std::vector<ScenarioConfig> out;
    for (auto s : p.scenarios) {
        for (auto m : p.mechanisms) {
            ScenarioConfig cfg = c;
            cfg.scenario = s;
            cfg.mechanism = m;
            const auto& specific = s == Scenario::pv_surplus ? p.hours_s1 : p.hours_s2;
            if (specific) cfg.period_starts = *specific;
            else if (p.hours_all) cfg.period_starts = *p.hours_all;
            try {
                validate(cfg);
            } catch (const std::exception& e) {
                throw ConfigError(src + ": " + e.what());
            }
            out.push_back(std::move(cfg));
        }
    }
    return out;
}

std::vector<ScenarioConfig> parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string(), path.parent_path(), overrides);
}

}  // namespace lemsim
