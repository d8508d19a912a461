#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "lemsim/clearing.hpp"
#include "lemsim/hems.hpp"
#include "lemsim/orderbook.hpp"
#include "lemsim/profiles.hpp"
#include "lemsim/traders.hpp"

namespace lemsim {

enum class Mechanism { p2p, centralized, vcg };

std::string_view to_string(Mechanism m);
/// Accepts "p2p", "centralized"/"centralised", "vcg".
Mechanism parse_mechanism(std::string_view s);

/// Trading-period starts used when a config gives none: 08:00-15:00 for the
/// PV-surplus scenario, 07:00-19:00 when batteries also trade.
std::vector<int> default_period_starts(Scenario scenario);

struct ScenarioConfig {
    Scenario scenario = Scenario::pv_surplus;
    Mechanism mechanism = Mechanism::p2p;
    ProfileGenParams population;
    /// When set, these households are used for every seed instead of
    /// generating a population.
    std::shared_ptr<const std::vector<HouseholdProfile>> fixed_profiles;
    BatterySpec battery;
    HemsOptions hems;
    TariffSchedule tariff = default_tariff();
    std::vector<int> period_starts;  // slots; empty means default_period_starts(scenario)
    int period_minutes = 60;
    std::optional<double> lambda;    // activations per minute; default from zip.activity
    double reserve_fraction = 0.5;
    bool prosumer_buyers = true;     // prosumers with a net import and nothing to sell may buy
    ZipParams zip;
    std::uint64_t seed = 1;
    int n_seed_replicates = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig& config);
std::vector<int> period_starts(const ScenarioConfig& config);

struct BuyerBid {
    TraderId household = 0;
    Energy quantity;
};

struct SellerOffer {
    TraderId household = 0;
    Energy quantity;
    Energy export_part;  // PV export; the rest is withheld battery energy
    Price limit;
};

/// Everything one trading period's market needs.
struct PeriodMarket {
    int start_slot = 0;
    int length = 60;
    TariffRates rates;  // ToU ceiling and FiT floor of the period
    std::vector<BuyerBid> buyers;
    std::vector<SellerOffer> sellers;

    [[nodiscard]] int hour() const { return start_slot / 60; }
};

/// Inputs shared by all mechanisms for one (scenario, seed).
struct DayPlan {
    std::vector<HouseholdProfile> households;
    std::vector<NetLoadProfile> netloads;  // index-aligned with households; empty for consumers
    std::vector<PeriodMarket> periods;
};

/// Profiles -> HEMS -> surplus -> per-period buyers and sellers.
DayPlan prepare_day(const ScenarioConfig& config, std::uint64_t seed);

/// A filled quantity seen from one side. `amount` is what the buyer paid or
/// the seller received; always non-negative for corridor-respecting trades.
struct TradeRecord {
    int start_slot = 0;
    TraderId trader = 0;
    Side role = Side::buy;
    Energy quantity;
    Money amount;

    bool operator==(const TradeRecord&) const = default;
};

struct PeriodOutcome {
    int start_slot = 0;
    TariffRates rates;
    std::vector<TradeRecord> records;
    std::vector<Trade> trades;                  // p2p only
    std::optional<LimitOrderSet> orders;        // centralized / vcg only
    std::optional<ClearingResult> clearing;     // centralized / vcg only
};

LimitOrderSet limit_orders(const PeriodMarket& market);

/// Runs one period under `mechanism`. The rng is used by the p2p session only.
PeriodOutcome run_period(const PeriodMarket& market, Mechanism mechanism, const ScenarioConfig& config, Rng& rng);

struct Settlement {
    Money savings;  // sum over buyer fills of (ToU * q - paid)
    Money profit;   // sum over seller fills of (received - FiT * q)

    bool operator==(const Settlement&) const = default;
};

Settlement compute_settlement(const std::vector<TradeRecord>& records, const TariffRates& rates);

struct HourMetrics {
    int start_slot = 0;
    Energy traded;                 // Q_T
    std::size_t fills = 0;         // buyer-side records
    Money buyer_paid;
    Money seller_received;
    Money savings;
    Money profit;
    Money prosumer_grid_cost;      // ToU cost of replacing sold battery reserve

    [[nodiscard]] int hour() const { return start_slot / 60; }
    /// Quantity-weighted buyer price, $/kWh; nullopt without trades.
    [[nodiscard]] std::optional<double> avg_price() const;
    [[nodiscard]] std::optional<double> avg_seller_price() const;
    HourMetrics& operator+=(const HourMetrics& o);
};

struct RunResult {
    std::uint64_t seed = 0;
    Scenario scenario = Scenario::pv_surplus;
    Mechanism mechanism = Mechanism::p2p;
    std::vector<HourMetrics> hours;
    HourMetrics totals;
    std::vector<PeriodOutcome> outcomes;
};

/// Runs every trading period of an already-prepared day.
RunResult run_day(const DayPlan& day, const ScenarioConfig& config, std::uint64_t seed);
RunResult run_single(const ScenarioConfig& config, std::uint64_t seed);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for fewer than two values
    std::size_t n = 0;
};

Stat summarize(const std::vector<double>& values);

struct HourSummary {
    int start_slot = 0;
    Stat avg_price;   // over seeds that traded in this hour
    Stat traded_kwh;
    Stat savings;
    Stat profit;
};

struct MetricsReport {
    Scenario scenario = Scenario::pv_surplus;
    Mechanism mechanism = Mechanism::p2p;
    std::vector<RunResult> runs;       // one per seed
    std::vector<HourSummary> hourly;   // across seeds
    HourSummary total;                 // start_slot = -1
};

MetricsReport assemble_report(const ScenarioConfig& config, std::vector<RunResult> runs);

/// Runs seeds seed .. seed + n_seed_replicates - 1.
MetricsReport run_scenario(const ScenarioConfig& config);

}  // namespace lemsim
