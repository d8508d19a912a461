#include "lemsim/hems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lemsim {

void validate(const BatterySpec& b)
{
    if (!(b.capacity >= 0.0) || !std::isfinite(b.capacity)) throw std::invalid_argument("battery capacity must be non-negative");
    if (!(b.max_charge > 0.0) || !(b.max_discharge > 0.0))
        throw std::invalid_argument("battery max_charge and max_discharge must be positive");
    if (!(b.efficiency > 0.0 && b.efficiency <= 1.0)) throw std::invalid_argument("battery efficiency must be in (0, 1]");
    if (!(b.initial_soc >= 0.0) || b.initial_soc > b.capacity)
        throw std::invalid_argument("battery initial_soc must lie in [0, capacity]");
}

namespace {

struct SlotPrices {
    std::vector<double> buy;
    std::vector<double> sell;
};

SlotPrices slot_prices(const TariffSchedule& tariff, std::size_t slots)
{
    SlotPrices p;
    p.buy.resize(slots);
    p.sell.resize(slots);
    for (std::size_t k = 0; k < slots; ++k) {
        const auto r = tariff.lookup(static_cast<int>(k));
        p.buy[k] = to_dollars(r.buy);
        p.sell[k] = to_dollars(r.sell);
    }
    return p;
}

inline double slot_cost(double net, double buy, double sell)
{
    return net > 0.0 ? buy * net : sell * net;
}

}  // namespace

NetLoadProfile optimize_self_consumption(const HouseholdProfile& profile, const BatterySpec& battery,
                                         const TariffSchedule& tariff, const HemsOptions& options)
{
    validate(battery);
    validate_profile(profile, tariff.slots_per_day());
    if (options.soc_steps < 1) throw std::invalid_argument("hems: soc_steps must be at least 1");
    if (options.interval_slots < 1) throw std::invalid_argument("hems: interval_slots must be at least 1");

    const std::size_t slots = profile.demand.size();
    const auto prices = slot_prices(tariff, slots);
    const int m = options.interval_slots;
    const std::size_t intervals = (slots + static_cast<std::size_t>(m) - 1) / static_cast<std::size_t>(m);

    const int steps = battery.capacity > 0.0 ? options.soc_steps : 0;
    const double step = steps > 0 ? battery.capacity / steps : 0.0;
    const int start_state = steps > 0 ? std::clamp(static_cast<int>(std::lround(battery.initial_soc / step)), 0, steps) : 0;
    const double eta = std::sqrt(battery.efficiency);

    // Per-slot battery flow b (positive charges, negative discharges) for a
    // change of `delta` grid steps over an interval of n slots.
    auto flow_per_slot = [&](int delta, int n) {
        if (delta >= 0) return delta * step / eta / n;
        return delta * step * eta / n;
    };
    auto feasible = [&](int delta, int n) {
        constexpr double slack = 1e-12;
        if (delta > 0) return delta * step / eta <= battery.max_charge * n + slack;
        if (delta < 0) return -delta * step * eta <= battery.max_discharge * n + slack;
        return true;
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto width = static_cast<std::size_t>(steps + 1);
    std::vector<double> best(width, inf), next(width);
    std::vector<int> parent(intervals * width, -1);
    best[static_cast<std::size_t>(start_state)] = 0.0;
    std::vector<double> step_cost(2 * width - 1);

    for (std::size_t i = 0; i < intervals; ++i) {
        const std::size_t k0 = i * static_cast<std::size_t>(m);
        const int n = static_cast<int>(std::min(slots, k0 + static_cast<std::size_t>(m)) - k0);
        for (int delta = -steps; delta <= steps; ++delta) {
            double c = inf;
            if (feasible(delta, n)) {
                const double b = flow_per_slot(delta, n);
                c = 0.0;
                for (std::size_t k = k0; k < k0 + static_cast<std::size_t>(n); ++k)
                    c += slot_cost(profile.demand[k] - profile.pv[k] + b, prices.buy[k], prices.sell[k]);
            }
            step_cost[static_cast<std::size_t>(delta + steps)] = c;
        }
        std::fill(next.begin(), next.end(), inf);
        int* par = parent.data() + i * width;
        for (int to = 0; to <= steps; ++to) {
            // highest predecessor first, ties keep it: charge as early as possible
            for (int from = steps; from >= 0; --from) {
                const double base = best[static_cast<std::size_t>(from)];
                if (base == inf) continue;
                const double c = step_cost[static_cast<std::size_t>(to - from + steps)];
                if (c == inf) continue;
                const double total = base + c;
                if (total < next[static_cast<std::size_t>(to)] - 1e-12) {
                    next[static_cast<std::size_t>(to)] = total;
                    par[to] = from;
                }
            }
        }
        best.swap(next);
    }

    int state = -1;
    double optimum = inf;
    for (int s = steps; s >= 0; --s) {
        if (best[static_cast<std::size_t>(s)] < optimum - 1e-12) {
            optimum = best[static_cast<std::size_t>(s)];
            state = s;
        }
    }
    if (state < 0) throw std::logic_error("hems: no feasible schedule");  // delta = 0 is always feasible

    std::vector<int> path(intervals + 1);
    path[intervals] = state;
    for (std::size_t i = intervals; i-- > 0;) {
        path[i] = parent[i * width + static_cast<std::size_t>(path[i + 1])];
    }

    NetLoadProfile out;
    out.pv = profile.pv;
    out.x_plus.resize(slots);
    out.x_minus.resize(slots);
    out.charge.resize(slots);
    out.discharge.resize(slots);
    out.soc.resize(slots);
    for (std::size_t i = 0; i < intervals; ++i) {
        const std::size_t k0 = i * static_cast<std::size_t>(m);
        const int n = static_cast<int>(std::min(slots, k0 + static_cast<std::size_t>(m)) - k0);
        const int delta = path[i + 1] - path[i];
        const double b = flow_per_slot(delta, n);
        for (int j = 0; j < n; ++j) {
            const std::size_t k = k0 + static_cast<std::size_t>(j);
            out.charge[k] = std::max(b, 0.0);
            out.discharge[k] = std::max(-b, 0.0);
            const double net = profile.demand[k] - profile.pv[k] + b;
            out.x_plus[k] = std::max(net, 0.0);
            out.x_minus[k] = std::max(-net, 0.0);
            const double soc = (path[i] + static_cast<double>(delta) * (j + 1) / n) * step;
            out.soc[k] = std::clamp(soc, 0.0, battery.capacity);
            out.cost += prices.buy[k] * out.x_plus[k] - prices.sell[k] * out.x_minus[k];
        }
    }
    return out;
}

double no_battery_cost(const HouseholdProfile& profile, const TariffSchedule& tariff)
{
    double cost = 0.0;
    for (std::size_t k = 0; k < profile.demand.size(); ++k) {
        const auto r = tariff.lookup(static_cast<int>(k));
        cost += slot_cost(profile.demand[k] - profile.pv[k], to_dollars(r.buy), to_dollars(r.sell));
    }
    return cost;
}

bool SurplusSchedule::empty() const
{
    for (std::size_t k = 0; k < export_qty.size(); ++k)
        if (tradeable(k) > 0.0) return false;
    return true;
}

SurplusSchedule extract_surplus(const NetLoadProfile& netload, Scenario scenario, double reserve_fraction,
                                const TariffSchedule& tariff)
{
    if (!(reserve_fraction >= 0.0 && reserve_fraction <= 1.0))
        throw std::invalid_argument("reserve_fraction must lie in [0, 1]");
    const std::size_t slots = netload.x_minus.size();
    SurplusSchedule s;
    s.export_qty = netload.x_minus;
    if (netload.pv.size() == slots)
        for (std::size_t k = 0; k < slots; ++k) s.export_qty[k] = std::min(s.export_qty[k], netload.pv[k]);
    s.reserve_qty.assign(slots, 0.0);
    s.limit.resize(slots);
    const Price peak = tariff.peak_buy();
    for (std::size_t k = 0; k < slots; ++k) {
        const auto r = tariff.lookup(static_cast<int>(k));
        s.limit[k] = r.sell;
        if (scenario == Scenario::battery_reserve && r.buy == peak)
            s.reserve_qty[k] = reserve_fraction * netload.discharge[k];
    }
    return s;
}

PeriodOffer aggregate_offer(const SurplusSchedule& surplus, int start, int length)
{
    if (start < 0 || length <= 0 || static_cast<std::size_t>(start + length) > surplus.export_qty.size())
        throw std::out_of_range("aggregate_offer: period outside the day");
    double exp = 0.0, res = 0.0;
    Price limit{0};
    for (int k = start; k < start + length; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        exp += surplus.export_qty[ks];
        res += surplus.reserve_qty[ks];
        limit = std::max(limit, surplus.limit[ks]);
    }
    return {energy_from_kwh(exp), energy_from_kwh(res), limit};
}

}  // namespace lemsim
