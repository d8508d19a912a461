#include "lemsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lemsim {

std::string_view to_string(Mechanism m)
{
    switch (m) {
    case Mechanism::p2p: return "p2p";
    case Mechanism::centralized: return "centralized";
    case Mechanism::vcg: return "vcg";
    }
    return "?";
}

Mechanism parse_mechanism(std::string_view s)
{
    if (s == "p2p") return Mechanism::p2p;
    if (s == "centralized" || s == "centralised") return Mechanism::centralized;
    if (s == "vcg") return Mechanism::vcg;
    throw std::invalid_argument("unknown mechanism '" + std::string(s) + "' (expected p2p, centralized or vcg)");
}

std::vector<int> default_period_starts(Scenario scenario)
{
    const int first = scenario == Scenario::pv_surplus ? 8 : 7;
    const int last = scenario == Scenario::pv_surplus ? 15 : 19;
    std::vector<int> out;
    for (int h = first; h <= last; ++h) out.push_back(h * 60);
    return out;
}

std::vector<int> period_starts(const ScenarioConfig& c)
{
    return c.period_starts.empty() ? default_period_starts(c.scenario) : c.period_starts;
}

void validate(const ScenarioConfig& c)
{
    if (c.fixed_profiles) {
        if (c.fixed_profiles->empty()) throw std::invalid_argument("profiles: file contains no households");
        for (const auto& h : *c.fixed_profiles) validate_profile(h, c.tariff.slots_per_day());
    } else {
        validate(c.population);
        if (c.population.slots_per_day != c.tariff.slots_per_day())
            throw std::invalid_argument("slots_per_day of profiles and tariff differ");
    }
    validate(c.battery);
    if (c.hems.soc_steps < 1) throw std::invalid_argument("soc_steps must be at least 1");
    if (c.hems.interval_slots < 1) throw std::invalid_argument("interval_slots must be at least 1");
    if (c.period_minutes < 1) throw std::invalid_argument("period_minutes must be positive");
    if (c.lambda && !(*c.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(c.reserve_fraction >= 0.0 && c.reserve_fraction <= 1.0))
        throw std::invalid_argument("reserve_fraction must lie in [0, 1]");
    if (c.n_seed_replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    const auto& z = c.zip;
    if (!(z.beta.first >= 0.0 && z.beta.second >= z.beta.first && z.beta.second <= 1.0))
        throw std::invalid_argument("zip_beta must be a range inside [0, 1]");
    if (!(z.gamma.first >= 0.0 && z.gamma.second >= z.gamma.first && z.gamma.second < 1.0))
        throw std::invalid_argument("zip_gamma must be a range inside [0, 1)");
    if (!(z.initial_margin.first >= 0.0 && z.initial_margin.second >= z.initial_margin.first))
        throw std::invalid_argument("zip_initial_margin must be a non-negative range");
    if (!(z.perturb_relative >= 0.0) || !(z.perturb_absolute >= 0.0) || !(z.activity > 0.0))
        throw std::invalid_argument("zip perturbation must be non-negative and activity positive");

    auto starts = period_starts(c);
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (starts[i] < 0 || starts[i] + c.period_minutes > c.tariff.slots_per_day())
            throw std::invalid_argument("trading period starting at slot " + std::to_string(starts[i]) +
                                        " does not fit in the day");
        if (i > 0 && starts[i] < starts[i - 1] + c.period_minutes)
            throw std::invalid_argument("trading periods overlap at slot " + std::to_string(starts[i]));
    }
}

DayPlan prepare_day(const ScenarioConfig& config, std::uint64_t seed)
{
    validate(config);
    DayPlan day;
    if (config.fixed_profiles) {
        day.households = *config.fixed_profiles;
    } else {
        auto params = config.population;
        params.seed = seed;
        day.households = generate_population(params);
    }

    std::vector<std::optional<SurplusSchedule>> surplus(day.households.size());
    day.netloads.resize(day.households.size());
    for (std::size_t i = 0; i < day.households.size(); ++i) {
        const auto& h = day.households[i];
        if (!h.is_prosumer) continue;
        day.netloads[i] = optimize_self_consumption(h, config.battery, config.tariff, config.hems);
        surplus[i] = extract_surplus(day.netloads[i], config.scenario, config.reserve_fraction, config.tariff);
    }

    for (int start : period_starts(config)) {
        PeriodMarket m;
        m.start_slot = start;
        m.length = config.period_minutes;
        m.rates = config.tariff.lookup(start);
        for (std::size_t i = 0; i < day.households.size(); ++i) {
            const auto& h = day.households[i];
            const auto first = h.demand.begin() + start;
            if (!h.is_prosumer) {
                const Energy q = energy_from_kwh(std::accumulate(first, first + m.length, 0.0));
                if (q > Energy{0}) m.buyers.push_back({h.id, q});
                continue;
            }
            const auto offer = aggregate_offer(*surplus[i], start, m.length);
            if (offer.total() > Energy{0}) {
                m.sellers.push_back({h.id, offer.total(), offer.export_qty, std::max(offer.limit, m.rates.sell)});
            } else if (config.prosumer_buyers) {
                const auto& xp = day.netloads[i].x_plus;
                const Energy q = energy_from_kwh(std::accumulate(xp.begin() + start, xp.begin() + start + m.length, 0.0));
                if (q > Energy{0}) m.buyers.push_back({h.id, q});
            }
        }
        day.periods.push_back(std::move(m));
    }
    return day;
}

LimitOrderSet limit_orders(const PeriodMarket& market)
{
    LimitOrderSet s;
    for (const auto& b : market.buyers) s.buys.push_back({b.household, market.rates.buy, b.quantity});
    for (const auto& o : market.sellers) s.sells.push_back({o.household, o.limit, o.quantity});
    return s;
}

PeriodOutcome run_period(const PeriodMarket& market, Mechanism mechanism, const ScenarioConfig& config, Rng& rng)
{
    PeriodOutcome out;
    out.start_slot = market.start_slot;
    out.rates = market.rates;

    if (mechanism == Mechanism::p2p) {
        if (market.buyers.empty() || market.sellers.empty()) return out;
        const double l_min = to_dollars(market.rates.sell);
        const double l_max = to_dollars(market.rates.buy);
        std::vector<ZipAgent> agents;
        agents.reserve(market.buyers.size() + market.sellers.size());
        for (const auto& b : market.buyers)
            agents.push_back(make_zip_agent(b.household, Side::buy, l_max, l_min, l_max, b.quantity, config.zip, rng));
        for (const auto& s : market.sellers)
            agents.push_back(
                make_zip_agent(s.household, Side::sell, to_dollars(s.limit), l_min, l_max, s.quantity, config.zip, rng));
        const double lambda =
            config.lambda.value_or(default_lambda(agents.size(), market.length, config.zip));
        OrderBook book;
        out.trades = session(agents, book, market.length, lambda, rng, config.zip);
        for (const auto& t : out.trades) {
            out.records.push_back({market.start_slot, t.buyer, Side::buy, t.quantity, t.price * t.quantity});
            out.records.push_back({market.start_slot, t.seller, Side::sell, t.quantity, t.price * t.quantity});
        }
        return out;
    }

    out.orders = limit_orders(market);
    out.clearing = mechanism == Mechanism::centralized ? clear_equilibrium(*out.orders) : vcg(*out.orders);
    const auto& orders = *out.orders;
    const auto& res = *out.clearing;
    for (std::size_t i = 0; i < orders.buys.size(); ++i) {
        if (res.allocation.buys[i] > Energy{0})
            out.records.push_back(
                {market.start_slot, orders.buys[i].trader, Side::buy, res.allocation.buys[i], res.buy_payments[i]});
    }
    for (std::size_t i = 0; i < orders.sells.size(); ++i) {
        if (res.allocation.sells[i] > Energy{0})
            out.records.push_back(
                {market.start_slot, orders.sells[i].trader, Side::sell, res.allocation.sells[i], -res.sell_payments[i]});
    }
    return out;
}

Settlement compute_settlement(const std::vector<TradeRecord>& records, const TariffRates& rates)
{
    Settlement s;
    for (const auto& r : records) {
        if (r.role == Side::buy) s.savings += rates.buy * r.quantity - r.amount;
        else s.profit += r.amount - rates.sell * r.quantity;
    }
    return s;
}

std::optional<double> HourMetrics::avg_price() const
{
    if (traded == Energy{0}) return std::nullopt;
    return to_dollars(buyer_paid) / to_kwh(traded);
}

std::optional<double> HourMetrics::avg_seller_price() const
{
    if (traded == Energy{0}) return std::nullopt;
    return to_dollars(seller_received) / to_kwh(traded);
}

HourMetrics& HourMetrics::operator+=(const HourMetrics& o)
{
    traded += o.traded;
    fills += o.fills;
    buyer_paid += o.buyer_paid;
    seller_received += o.seller_received;
    savings += o.savings;
    profit += o.profit;
    prosumer_grid_cost += o.prosumer_grid_cost;
    return *this;
}

namespace {

constexpr std::uint64_t kMarketStream = 0x6d61726b6574ULL;

HourMetrics period_metrics(const PeriodMarket& market, const PeriodOutcome& outcome)
{
    HourMetrics h;
    h.start_slot = market.start_slot;
    Energy sold{0};
    std::map<TraderId, Energy> sold_by;
    for (const auto& r : outcome.records) {
        if (r.role == Side::buy) {
            h.traded += r.quantity;
            h.buyer_paid += r.amount;
            ++h.fills;
        } else {
            sold += r.quantity;
            h.seller_received += r.amount;
            sold_by[r.trader] += r.quantity;
        }
    }
    if (sold != h.traded) throw std::logic_error("energy conservation violated in period " + std::to_string(h.start_slot));
    const auto s = compute_settlement(outcome.records, market.rates);
    h.savings = s.savings;
    h.profit = s.profit;
    for (const auto& o : market.sellers) {
        auto it = sold_by.find(o.household);
        if (it == sold_by.end()) continue;
        const Energy reserve_sold = std::max(Energy{0}, it->second - o.export_part);
        h.prosumer_grid_cost += market.rates.buy * reserve_sold;
    }
    return h;
}

}  // namespace

RunResult run_day(const DayPlan& day, const ScenarioConfig& config, std::uint64_t seed)
{
    RunResult run;
    run.seed = seed;
    run.scenario = config.scenario;
    run.mechanism = config.mechanism;
    run.totals.start_slot = -1;
    for (const auto& market : day.periods) {
        Rng rng(derive_seed(seed, {kMarketStream, static_cast<std::uint64_t>(market.start_slot)}));
        auto outcome = run_period(market, config.mechanism, config, rng);
        auto h = period_metrics(market, outcome);
        run.totals += h;
        run.hours.push_back(h);
        run.outcomes.push_back(std::move(outcome));
    }
    return run;
}

RunResult run_single(const ScenarioConfig& config, std::uint64_t seed)
{
    return run_day(prepare_day(config, seed), config, seed);
}

Stat summarize(const std::vector<double>& v)
{
    Stat s;
    s.n = v.size();
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

namespace {

HourSummary summarize_hours(int start_slot, const std::vector<const HourMetrics*>& hs)
{
    HourSummary out;
    out.start_slot = start_slot;
    std::vector<double> price, q, sav, prof;
    for (const auto* h : hs) {
        if (auto p = h->avg_price()) price.push_back(*p);
        q.push_back(to_kwh(h->traded));
        sav.push_back(to_dollars(h->savings));
        prof.push_back(to_dollars(h->profit));
    }
    out.avg_price = summarize(price);
    out.traded_kwh = summarize(q);
    out.savings = summarize(sav);
    out.profit = summarize(prof);
    return out;
}

}  // namespace

MetricsReport assemble_report(const ScenarioConfig& config, std::vector<RunResult> runs)
{
    MetricsReport rep;
    rep.scenario = config.scenario;
    rep.mechanism = config.mechanism;
    rep.runs = std::move(runs);
    const auto starts = period_starts(config);
    for (std::size_t p = 0; p < starts.size(); ++p) {
        std::vector<const HourMetrics*> hs;
        for (const auto& r : rep.runs) hs.push_back(&r.hours.at(p));
        rep.hourly.push_back(summarize_hours(starts[p], hs));
    }
    std::vector<const HourMetrics*> totals;
    for (const auto& r : rep.runs) totals.push_back(&r.totals);
    rep.total = summarize_hours(-1, totals);
    return rep;
}

MetricsReport run_scenario(const ScenarioConfig& config)
{
    validate(config);
    std::vector<RunResult> runs;
    for (int i = 0; i < config.n_seed_replicates; ++i) runs.push_back(run_single(config, config.seed + static_cast<std::uint64_t>(i)));
    return assemble_report(config, std::move(runs));
}

}  // namespace lemsim
