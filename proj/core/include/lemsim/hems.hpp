#pragma once

#include <vector>

#include "lemsim/profiles.hpp"
#include "lemsim/units.hpp"

namespace lemsim {

/// Battery parameters. Energies in kWh, rate limits in kWh per slot.
struct BatterySpec {
    double capacity = 10.0;
    double max_charge = 5.0 / 60.0;     // 5 kW at minute slots
    double max_discharge = 5.0 / 60.0;
    double efficiency = 0.9;            // round trip
    double initial_soc = 2.0;
};

void validate(const BatterySpec& battery);

struct HemsOptions {
    int soc_steps = 100;       // grid has soc_steps + 1 states, step capacity / soc_steps
    int interval_slots = 15;   // minute slots per decision interval
};

/// Optimal grid exchange for one household. All vectors have one entry per
/// slot; soc[k] is the state of charge at the end of slot k. charge is drawn
/// into the battery, discharge is delivered out of it.
struct NetLoadProfile {
    std::vector<double> x_plus;
    std::vector<double> x_minus;
    std::vector<double> charge;
    std::vector<double> discharge;
    std::vector<double> soc;
    std::vector<double> pv;  // copy of the household's generation
    double cost = 0.0;  // sum_k s+_k x+_k - s-_k x-_k, dollars
};

/// Exact minimiser of the household's import cost minus export income over
/// the discretised state-of-charge grid. Battery dynamics use
/// soc' = soc + sqrt(eff) * charge - discharge / sqrt(eff); a decision
/// interval's energy flow is spread evenly over its slots. The initial SOC is
/// snapped to the nearest grid state; terminal SOC is free. Among equal-cost
/// schedules the one that charges earliest is returned.
NetLoadProfile optimize_self_consumption(const HouseholdProfile& profile, const BatterySpec& battery,
                                         const TariffSchedule& tariff, const HemsOptions& options = {});

/// Cost of the same household with no battery at all.
double no_battery_cost(const HouseholdProfile& profile, const TariffSchedule& tariff);

enum class Scenario { pv_surplus = 1, battery_reserve = 2 };

/// Energy a prosumer offers to the local market, per slot.
struct SurplusSchedule {
    std::vector<double> export_qty;   // PV export, kWh
    std::vector<double> reserve_qty;  // battery energy held back for peak trading, kWh
    std::vector<Price> limit;         // seller floor, >= feed-in price of the slot

    [[nodiscard]] double tradeable(std::size_t k) const { return export_qty[k] + reserve_qty[k]; }
    [[nodiscard]] bool empty() const;
};

/// Tradeable export is x_minus capped by the slot's PV output, so leftover
/// battery energy dumped to the grid is never offered. Scenario 1 offers that
/// export only. Scenario 2 additionally withholds
/// reserve_fraction of the battery discharge planned for peak-tariff slots and
/// offers it in the same slots. Throws for reserve_fraction outside [0, 1].
SurplusSchedule extract_surplus(const NetLoadProfile& netload, Scenario scenario, double reserve_fraction,
                                const TariffSchedule& tariff);

struct PeriodOffer {
    Energy export_qty;
    Energy reserve_qty;
    Price limit;

    [[nodiscard]] Energy total() const { return export_qty + reserve_qty; }
};

/// Sums slots [start, start + length) and rounds to watt-hours.
PeriodOffer aggregate_offer(const SurplusSchedule& surplus, int start, int length);

}  // namespace lemsim
