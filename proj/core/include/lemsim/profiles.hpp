#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lemsim/units.hpp"

namespace lemsim {

inline constexpr int kMinutesPerDay = 1440;

struct TariffSegment {
    int start_slot = 0;
    Price buy;   // retail time-of-use price
    Price sell;  // feed-in incentive

    bool operator==(const TariffSegment&) const = default;
};

struct TariffRates {
    Price buy;
    Price sell;

    bool operator==(const TariffRates&) const = default;
};

/// Piecewise-constant retail and feed-in prices over one day. Segment i
/// covers the half-open slot range [start_i, start_{i+1}).
class TariffSchedule {
public:
    /// Throws std::invalid_argument unless the segments start at slot 0, are
    /// strictly increasing, lie inside the day, and satisfy buy > sell > 0.
    explicit TariffSchedule(std::vector<TariffSegment> segments, int slots_per_day = kMinutesPerDay);

    [[nodiscard]] TariffRates lookup(int slot) const;
    [[nodiscard]] const std::vector<TariffSegment>& segments() const { return segments_; }
    [[nodiscard]] int slots_per_day() const { return slots_per_day_; }
    /// Highest retail price of the day; slots charged at it form the peak window.
    [[nodiscard]] Price peak_buy() const;
    [[nodiscard]] bool is_peak(int slot) const { return lookup(slot).buy == peak_buy(); }

    bool operator==(const TariffSchedule&) const = default;

private:
    std::vector<TariffSegment> segments_;
    int slots_per_day_;
};

/// Default ToU/FiT day: 0.13 off-peak, 0.25 shoulder 07-14 and 20-22,
/// 0.52 peak 14-20; flat 0.08 feed-in.
TariffSchedule default_tariff();

/// Free-function form of TariffSchedule::lookup; throws std::out_of_range
/// for slots outside [0, slots_per_day).
TariffRates tariff_lookup(const TariffSchedule& schedule, int slot);

struct HouseholdProfile {
    int id = 0;
    std::vector<double> demand;  // kWh per slot
    std::vector<double> pv;      // kWh per slot, all zero for consumers
    bool is_prosumer = false;

    bool operator==(const HouseholdProfile&) const = default;
};

/// Throws std::invalid_argument when a profile breaks its invariants
/// (lengths, non-negativity, consumers with generation).
void validate_profile(const HouseholdProfile& profile, int slots_per_day);

struct ProfileGenParams {
    std::uint64_t seed = 1;
    int n_households = 100;
    int n_prosumers = 37;
    int slots_per_day = kMinutesPerDay;
    double base_load = 0.003;                                   // kWh per slot
    double appliance_event_rate = 0.5;                          // events per hour
    std::pair<double, double> appliance_event_energy{0.2, 1.5}; // kWh per event
    std::pair<double, double> pv_peak{2.0, 5.0};                // kW
    double pv_noise = 0.1;
    std::pair<int, int> daylight_window{360, 1080};             // [sunrise, sunset) slots
};

void validate(const ProfileGenParams& params);

/// Synthetic population. Households [0, n_prosumers) are prosumers.
std::vector<HouseholdProfile> generate_population(const ProfileGenParams& params);

// Text formats.
//
// Profiles: header "slot,demand_<id>[,pv_<id>]..." then one row per slot. A
// household is a prosumer exactly when it has a pv_<id> column. Values are
// printed in shortest round-trip form.
//
// Tariff: header "start_minute,buy,sell" then one row per segment, prices in
// $/kWh with up to four decimals.
void write_profiles_csv(std::ostream& out, const std::vector<HouseholdProfile>& profiles);
std::vector<HouseholdProfile> read_profiles_csv(std::istream& in);
void write_tariff_csv(std::ostream& out, const TariffSchedule& tariff);
TariffSchedule read_tariff_csv(std::istream& in, int slots_per_day = kMinutesPerDay);

}  // namespace lemsim
