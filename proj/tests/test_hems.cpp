#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lemsim/hems.hpp"
#include "oracles.hpp"

using namespace lemsim;

namespace {

HouseholdProfile prosumer_day(std::uint64_t seed, int id = 0)
{
    ProfileGenParams p;
    p.seed = seed;
    p.n_households = id + 1;
    p.n_prosumers = id + 1;
    return generate_population(p)[static_cast<std::size_t>(id)];
}

}  // namespace

TEST(Hems, ZeroCapacityMatchesNoBattery)
{
    const auto h = prosumer_day(3);
    BatterySpec b;
    b.capacity = 0.0;
    b.initial_soc = 0.0;
    const auto n = optimize_self_consumption(h, b, default_tariff());
    for (std::size_t k = 0; k < h.demand.size(); ++k) {
        EXPECT_EQ(n.x_plus[k], std::max(h.demand[k] - h.pv[k], 0.0));
        EXPECT_EQ(n.x_minus[k], std::max(h.pv[k] - h.demand[k], 0.0));
        EXPECT_EQ(n.charge[k], 0.0);
        EXPECT_EQ(n.discharge[k], 0.0);
    }
    EXPECT_NEAR(n.cost, no_battery_cost(h, default_tariff()), 1e-9);
}

TEST(Hems, ToyInstancesMatchExhaustiveSearchExactly)
{
    Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const auto x = oracle::random_dyadic_hems(rng);
        const auto n = optimize_self_consumption(x.profile, x.battery, x.tariff, x.options);
        ASSERT_EQ(n.cost, oracle::enumerate_hems_cost(x.profile, x.battery, x.tariff, x.options)) << "instance " << i;
    }
}

TEST(Hems, RealValuedInstancesMatchExhaustiveSearch)
{
    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        const auto x = oracle::random_real_hems(rng);
        const auto n = optimize_self_consumption(x.profile, x.battery, x.tariff, x.options);
        ASSERT_NEAR(n.cost, oracle::enumerate_hems_cost(x.profile, x.battery, x.tariff, x.options), 1e-12) << i;
    }
}

TEST(Hems, FullDayInvariants)
{
    const auto tariff = default_tariff();
    BatterySpec b;
    const double eta = std::sqrt(b.efficiency);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto h = prosumer_day(seed);
        const auto n = optimize_self_consumption(h, b, tariff);
        EXPECT_LE(n.cost, no_battery_cost(h, tariff) + 1e-12);
        double prev = std::round(b.initial_soc / (b.capacity / 100)) * (b.capacity / 100);
        double recomputed = 0.0;
        for (std::size_t k = 0; k < h.demand.size(); ++k) {
            const double balance = h.demand[k] - h.pv[k] + n.charge[k] - n.discharge[k] - (n.x_plus[k] - n.x_minus[k]);
            EXPECT_LE(std::abs(balance), 1e-9);
            EXPECT_TRUE(n.x_plus[k] == 0.0 || n.x_minus[k] == 0.0);
            EXPECT_TRUE(n.charge[k] == 0.0 || n.discharge[k] == 0.0);
            EXPECT_LE(n.charge[k], b.max_charge + 1e-12);
            EXPECT_LE(n.discharge[k], b.max_discharge + 1e-12);
            EXPECT_GE(n.soc[k], 0.0);
            EXPECT_LE(n.soc[k], b.capacity);
            EXPECT_NEAR(n.soc[k] - prev, eta * n.charge[k] - n.discharge[k] / eta, 1e-9);
            prev = n.soc[k];
            const auto r = tariff.lookup(static_cast<int>(k));
            recomputed += to_dollars(r.buy) * n.x_plus[k] - to_dollars(r.sell) * n.x_minus[k];
        }
        EXPECT_NEAR(recomputed, n.cost, 1e-9);
    }
}

TEST(Hems, BatteryShiftsEnergyIntoThePeak)
{
    const auto h = prosumer_day(5);
    const auto n = optimize_self_consumption(h, BatterySpec{}, default_tariff());
    double peak_discharge = 0.0;
    for (int k = 14 * 60; k < 20 * 60; ++k) peak_discharge += n.discharge[static_cast<std::size_t>(k)];
    EXPECT_GT(peak_discharge, 0.5);
}

TEST(Hems, HigherEfficiencyNeverCostsMore)
{
    const auto h = prosumer_day(9);
    BatterySpec lossy;
    lossy.efficiency = 0.81;
    BatterySpec ideal = lossy;
    ideal.efficiency = 1.0;
    EXPECT_LE(optimize_self_consumption(h, ideal, default_tariff()).cost,
              optimize_self_consumption(h, lossy, default_tariff()).cost + 1e-12);
}

TEST(Hems, RejectsInvalidBattery)
{
    const auto h = prosumer_day(1);
    BatterySpec b;
    b.initial_soc = 11.0;
    EXPECT_THROW(optimize_self_consumption(h, b, default_tariff()), std::invalid_argument);
    b = {};
    b.efficiency = 1.5;
    EXPECT_THROW(optimize_self_consumption(h, b, default_tariff()), std::invalid_argument);
    HemsOptions o;
    o.soc_steps = 0;
    EXPECT_THROW(optimize_self_consumption(h, BatterySpec{}, default_tariff(), o), std::invalid_argument);
}

TEST(Surplus, NoPvMeansNothingToSellInScenario1)
{
    HouseholdProfile h{0, std::vector<double>(1440, 0.01), std::vector<double>(1440, 0.0), true};
    const auto n = optimize_self_consumption(h, BatterySpec{}, default_tariff());
    EXPECT_TRUE(extract_surplus(n, Scenario::pv_surplus, 0.5, default_tariff()).empty());
}

TEST(Surplus, Scenario1OnlyInDaylight)
{
    const auto h = prosumer_day(4);
    const auto n = optimize_self_consumption(h, BatterySpec{}, default_tariff());
    const auto s = extract_surplus(n, Scenario::pv_surplus, 0.5, default_tariff());
    EXPECT_FALSE(s.empty());
    for (std::size_t k = 0; k < 1440; ++k) {
        if (k < 360 || k >= 1080) EXPECT_EQ(s.tradeable(k), 0.0) << k;
        EXPECT_EQ(s.reserve_qty[k], 0.0);
        EXPECT_EQ(s.limit[k], price_from_dollars(0.08));
    }
}

TEST(Surplus, ExportIsBoundedByGridExportAndPv)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto h = prosumer_day(seed);
        const auto n = optimize_self_consumption(h, BatterySpec{}, default_tariff());
        const auto s = extract_surplus(n, Scenario::pv_surplus, 0.5, default_tariff());
        double offered = 0.0, exported = 0.0;
        for (std::size_t k = 0; k < 1440; ++k) {
            ASSERT_LE(s.export_qty[k], n.x_minus[k]);
            ASSERT_LE(s.export_qty[k], h.pv[k]);
            offered += s.tradeable(k);
            exported += n.x_minus[k];
        }
        EXPECT_LE(offered, exported);
    }
}

TEST(Surplus, Scenario2ReservesPeakDischarge)
{
    const auto h = prosumer_day(4);
    const auto tariff = default_tariff();
    const auto n = optimize_self_consumption(h, BatterySpec{}, tariff);
    const auto s = extract_surplus(n, Scenario::battery_reserve, 0.5, tariff);
    double evening = 0.0;
    for (std::size_t k = 0; k < 1440; ++k) {
        const bool peak = tariff.is_peak(static_cast<int>(k));
        EXPECT_EQ(s.reserve_qty[k], peak ? 0.5 * n.discharge[k] : 0.0);
        EXPECT_EQ(s.export_qty[k], std::min(n.x_minus[k], h.pv[k]));
        if (k >= 18 * 60 && k < 20 * 60) evening += s.tradeable(k);
    }
    EXPECT_GT(evening, 0.0);
    const auto s0 = extract_surplus(n, Scenario::battery_reserve, 0.0, tariff);
    const auto s1 = extract_surplus(n, Scenario::pv_surplus, 0.0, tariff);
    EXPECT_EQ(s0.export_qty, s1.export_qty);
    EXPECT_EQ(s0.reserve_qty, s1.reserve_qty);
}

TEST(Surplus, ReserveFractionOutOfRangeThrows)
{
    const auto h = prosumer_day(4);
    const auto n = optimize_self_consumption(h, BatterySpec{}, default_tariff());
    EXPECT_THROW(extract_surplus(n, Scenario::battery_reserve, 1.5, default_tariff()), std::invalid_argument);
    EXPECT_THROW(extract_surplus(n, Scenario::battery_reserve, -0.1, default_tariff()), std::invalid_argument);
}

TEST(Surplus, AggregateOfferSumsAndRounds)
{
    SurplusSchedule s;
    s.export_qty = {0.0004, 0.0004, 1.0, 0.0};
    s.reserve_qty = {0.0, 0.0, 0.25, 0.5};
    s.limit = {ticks(800), ticks(800), ticks(800), ticks(800)};
    const auto o = aggregate_offer(s, 0, 3);
    EXPECT_EQ(o.export_qty, wh(1001));
    EXPECT_EQ(o.reserve_qty, wh(250));
    EXPECT_EQ(o.total(), wh(1251));
    EXPECT_EQ(o.limit, ticks(800));
    EXPECT_THROW(aggregate_offer(s, 2, 3), std::out_of_range);
}
