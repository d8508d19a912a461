// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are fixed here and must not be loosened.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "lemsim/clearing.hpp"
#include "lemsim/hems.hpp"
#include "lemsim/orderbook.hpp"
#include "lemsim/sim.hpp"
#include "oracles.hpp"

using namespace lemsim;

namespace {

constexpr int kSeeds = 20;
constexpr std::uint64_t kShiftSeeds = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Mechanism kMechanisms[] = {Mechanism::p2p, Mechanism::centralized, Mechanism::vcg};
constexpr Scenario kScenarios[] = {Scenario::pv_surplus, Scenario::battery_reserve};

int failures = 0;

void report(const char* id, bool ok, const std::string& detail, double seconds)
{
    std::printf("%s %s  %s  (%.1fs)\n", id, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

class Timer {
public:
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ScenarioConfig config_for(Scenario s, Mechanism m)
{
    ScenarioConfig c;
    c.scenario = s;
    c.mechanism = m;
    return c;
}

// runs[scenario][mechanism][seed index]
using Matrix = std::map<Scenario, std::map<Mechanism, std::vector<RunResult>>>;

Matrix run_matrix(const std::vector<int>* hours = nullptr, std::initializer_list<Mechanism> mechs = {Mechanism::p2p, Mechanism::centralized, Mechanism::vcg})
{
    Matrix m;
    for (auto s : kScenarios) {
        for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
            auto base = config_for(s, Mechanism::p2p);
            if (hours) base.period_starts = *hours;
            const auto day = prepare_day(base, seed);
            for (auto mech : mechs) {
                auto c = base;
                c.mechanism = mech;
                m[s][mech].push_back(run_day(day, c, seed));
            }
        }
    }
    return m;
}

double mean_of(const std::vector<RunResult>& runs, auto field)
{
    double s = 0.0;
    for (const auto& r : runs) s += field(r);
    return s / static_cast<double>(runs.size());
}

// ---------------------------------------------------------------------------

void ac1(const Matrix& m, double setup)
{
    Timer t;
    std::size_t checked = 0, bad = 0;
    for (const auto& [s, by_mech] : m)
        for (const auto& [mech, runs] : by_mech)
            for (const auto& r : runs)
                for (const auto& o : r.outcomes) {
                    for (const auto& rec : o.records) {
                        ++checked;
                        if (rec.amount < o.rates.sell * rec.quantity || rec.amount > o.rates.buy * rec.quantity) ++bad;
                    }
                    for (const auto& tr : o.trades) {
                        ++checked;
                        if (tr.price < o.rates.sell || tr.price > o.rates.buy) ++bad;
                    }
                }
    report("AC1", bad == 0 && checked > 0,
           fmt("price corridor: %zu violations in %zu fills/trades (%d seeds x 2 scenarios x 3 mechanisms)", bad, checked, kSeeds),
           setup + t.seconds());
}

void ac2(const Matrix& m)
{
    Timer t;
    std::size_t bad = 0, periods = 0;
    for (const auto& [s, by_mech] : m)
        for (const auto& [mech, runs] : by_mech)
            for (const auto& r : runs)
                for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
                    ++periods;
                    Energy b, sl;
                    for (const auto& rec : r.outcomes[i].records) (rec.role == Side::buy ? b : sl) += rec.quantity;
                    if (b != sl || b != r.hours[i].traded) ++bad;
                    if (!r.outcomes[i].trades.empty() && total_traded(r.outcomes[i].trades) != b) ++bad;
                }

    Rng rng(20240601);
    const int sequences = 10000;
    std::size_t seq_bad = 0;
    for (int k = 0; k < sequences; ++k) {
        OrderBook book;
        oracle::NaiveBook naive;
        std::map<OrderId, Energy> submitted, filled;
        const int n = 1 + static_cast<int>(rng.index(30));
        double clock = 0.0;
        for (int i = 0; i < n; ++i) {
            clock += rng.uniform();
            const Order o{static_cast<OrderId>(i + 1), static_cast<TraderId>(i), rng.index(2) ? Side::buy : Side::sell,
                          ticks(800 + 50 * static_cast<std::int64_t>(rng.index(40))),
                          wh(1 + static_cast<std::int64_t>(rng.index(5000))), clock};
            submitted[o.id] = o.quantity;
            const auto trades = book.submit(o);
            if (trades != naive.submit(o)) ++seq_bad;
            for (const auto& tr : trades) {
                filled[tr.buy_order_id] += tr.quantity;
                filled[tr.sell_order_id] += tr.quantity;
            }
            const auto bb = book.best_bid();
            const auto ba = book.best_ask();
            if (bb && ba && bb->price >= ba->price) ++seq_bad;
        }
        Energy buys, sells;
        for (const auto& tr : book.trade_log()) {
            buys += tr.quantity;
            sells += tr.quantity;
        }
        if (buys != total_traded(book.trade_log()) || sells != buys) ++seq_bad;
        for (const auto& [id, q] : filled)
            if (q > submitted[id]) ++seq_bad;
        for (const auto& o : book.bids())
            if (o.quantity + filled[o.id] != submitted[o.id]) ++seq_bad;
        for (const auto& o : book.asks())
            if (o.quantity + filled[o.id] != submitted[o.id]) ++seq_bad;
    }
    report("AC2", bad == 0 && seq_bad == 0,
           fmt("conservation: %zu/%zu simulated periods and %zu/%d random order sequences violate", bad, periods, seq_bad,
               sequences),
           t.seconds());
}

void ac3()
{
    Timer t;
    Rng rng(31);
    int welfare_bad = 0, qty_bad = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const auto o = oracle::random_order_set(rng, 8, 4);
        const auto a = max_welfare_allocation(o);
        if (welfare(o, a).raw() != oracle::enumerate_max_welfare(o)) ++welfare_bad;
        if (clear_equilibrium(o).cleared_quantity.raw() != oracle::max_matched_quantity(o)) ++qty_bad;
    }
    report("AC3", welfare_bad == 0 && qty_bad == 0,
           fmt("clearing oracle: %d welfare and %d quantity mismatches on %d instances (<= 8 orders, 0.5 kWh grid)",
               welfare_bad, qty_bad, n),
           t.seconds());
}

void ac4()
{
    Timer t;
    // Trader type: role x price (9-point grid) x quantity.
    struct Type {
        bool buyer;
        std::int64_t price;
        std::int64_t qty;
    };
    std::vector<Type> types;
    for (bool b : {true, false})
        for (int p = 1; p <= 9; ++p)
            for (std::int64_t q : {1000, 2000}) types.push_back({b, 500 * p, q});

    auto build = [](const std::vector<Type>& ts) {
        LimitOrderSet o;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const LimitOrder x{static_cast<TraderId>(i), ticks(ts[i].price), wh(ts[i].qty)};
            (ts[i].buyer ? o.buys : o.sells).push_back(x);
        }
        return o;
    };
    // utility of trader i under `result` evaluated at its true type
    auto utility = [](const LimitOrderSet& o, const ClearingResult& r, TraderId id, const Type& truth) -> std::int64_t {
        if (truth.buyer) {
            for (std::size_t k = 0; k < o.buys.size(); ++k)
                if (o.buys[k].trader == id) return truth.price * r.allocation.buys[k].raw() - r.buy_payments[k].raw();
        } else {
            for (std::size_t k = 0; k < o.sells.size(); ++k)
                if (o.sells[k].trader == id) return -r.sell_payments[k].raw() - truth.price * r.allocation.sells[k].raw();
        }
        return 0;
    };

    std::size_t instances = 0, deviations = 0, profitable = 0, negative = 0;
    std::vector<Type> ts;
    std::vector<std::size_t> pick;
    for (std::size_t n = 1; n <= 4; ++n) {
        pick.assign(n, 0);
        while (true) {
            ts.clear();
            for (auto p : pick) ts.push_back(types[p]);
            ++instances;
            const auto truthful = build(ts);
            const auto r = vcg(truthful);
            for (std::size_t i = 0; i < n; ++i) {
                const auto id = static_cast<TraderId>(i);
                const std::int64_t u = utility(truthful, r, id, ts[i]);
                if (u < 0) ++negative;
                auto lie = ts;
                for (int p = 1; p <= 9; ++p) {
                    if (500 * p == ts[i].price) continue;
                    lie[i].price = 500 * p;
                    const auto o = build(lie);
                    ++deviations;
                    if (utility(o, vcg(o), id, ts[i]) > u) ++profitable;
                }
            }
            std::size_t k = 0;
            while (k < n && ++pick[k] == types.size()) pick[k++] = 0;
            if (k == n) break;
        }
    }
    report("AC4", profitable == 0 && negative == 0,
           fmt("VCG truthfulness: %zu profitable of %zu unilateral price deviations, %zu negative truthful utilities, "
               "%zu instances (<= 4 traders, 9-point grid)",
               profitable, deviations, negative, instances),
           t.seconds());
}

void ac5(const Matrix& m)
{
    Timer t;
    const LimitOrderSet bilateral{{{0, price_from_dollars(0.25), energy_from_kwh(3)}},
                                  {{1, price_from_dollars(0.10), energy_from_kwh(3)}}};
    const Money deficit = -vcg(bilateral).budget();
    const auto per_kwh = [](const RunResult& r) {
        return r.totals.traded.raw() ? to_dollars(r.totals.buyer_paid) / to_kwh(r.totals.traded) : 0.0;
    };
    const double vcg_price = mean_of(m.at(Scenario::pv_surplus).at(Mechanism::vcg), per_kwh);
    const double eq_price = mean_of(m.at(Scenario::pv_surplus).at(Mechanism::centralized), per_kwh);
    report("AC5", deficit == money_from_dollars(0.45) && vcg_price <= eq_price,
           fmt("VCG deficit: bilateral deficit %s $ (want 0.45); scenario 1 mean buyer price VCG %.4f <= equilibrium "
               "%.4f $/kWh over %d seeds",
               format_money(deficit).c_str(), vcg_price, eq_price, kSeeds),
           t.seconds());
}

void ac6(const Matrix& m)
{
    Timer t;
    bool ok = true;
    std::string detail = "table pattern:";
    auto savings = [](const RunResult& r) { return to_dollars(r.totals.savings); };
    auto profit = [](const RunResult& r) { return to_dollars(r.totals.profit); };
    auto qt = [](const RunResult& r) { return to_kwh(r.totals.traded); };

    // (a)
    for (auto s : kScenarios)
        for (auto mech : kMechanisms) {
            const auto& runs = m.at(s).at(mech);
            const double sv = mean_of(runs, savings), pf = mean_of(runs, profit);
            ok = ok && sv > 0.0 && pf > 0.0;
            detail += fmt(" S%d/%s sav %.2f prof %.2f;", static_cast<int>(s), std::string(to_string(mech)).c_str(), sv, pf);
        }
    // (b)
    std::size_t hour_mismatch = 0;
    for (auto s : kScenarios) {
        const auto& c = m.at(s).at(Mechanism::centralized);
        const auto& v = m.at(s).at(Mechanism::vcg);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t h = 0; h < c[i].hours.size(); ++h)
                if (c[i].hours[h].traded != v[i].hours[h].traded) ++hour_mismatch;
    }
    ok = ok && hour_mismatch == 0;
    detail += fmt(" (b) %zu hourly Q_T mismatches centralized/vcg;", hour_mismatch);
    // (c)
    for (auto s : kScenarios) {
        const double p = mean_of(m.at(s).at(Mechanism::p2p), qt);
        const double c = mean_of(m.at(s).at(Mechanism::centralized), qt);
        ok = ok && p <= c;
        detail += fmt(" (c) S%d Q_T p2p %.1f <= central %.1f;", static_cast<int>(s), p, c);
    }
    // (d)
    for (auto mech : kMechanisms) {
        const double q1 = mean_of(m.at(Scenario::pv_surplus).at(mech), qt);
        const double q2 = mean_of(m.at(Scenario::battery_reserve).at(mech), qt);
        const double s1 = mean_of(m.at(Scenario::pv_surplus).at(mech), savings);
        const double s2 = mean_of(m.at(Scenario::battery_reserve).at(mech), savings);
        ok = ok && q2 > q1 && s2 > s1;
        detail += fmt(" (d) %s Q_T %.1f > %.1f, savings %.2f > %.2f;", std::string(to_string(mech)).c_str(), q2, q1, s2, s1);
    }
    report("AC6", ok, detail, t.seconds());
}

double stddev(const std::vector<double>& v)
{
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void ac7(const Matrix& m)
{
    Timer t;
    double ratio_sum = 0.0;
    std::size_t periods = 0, skipped_flat = 0, eligible = 0;
    double first_sum = 0.0, last_sum = 0.0;
    for (auto s : kScenarios)
        for (const auto& r : m.at(s).at(Mechanism::p2p))
            for (const auto& o : r.outcomes) {
                if (o.trades.size() < 8) continue;
                ++eligible;
                const std::size_t q = o.trades.size() / 4;
                std::vector<double> first, last;
                for (std::size_t i = 0; i < q; ++i) {
                    first.push_back(to_dollars(o.trades[i].price));
                    last.push_back(to_dollars(o.trades[o.trades.size() - q + i].price));
                }
                const double sf = stddev(first), sl = stddev(last);
                first_sum += sf;
                last_sum += sl;
                if (sf == 0.0) {
                    ++skipped_flat;
                    continue;
                }
                ratio_sum += sl / sf;
                ++periods;
            }
    const double mean_ratio = periods ? ratio_sum / static_cast<double>(periods) : 0.0;
    report("AC7", periods > 0 && mean_ratio <= 1.0,
           fmt("ZIP convergence: mean sd(last quartile)/sd(first quartile) = %.3f over %zu periods with >= 8 trades "
               "(%zu with a flat first quartile excluded); mean sd first %.4f, last %.4f",
               mean_ratio, periods, skipped_flat, eligible ? first_sum / static_cast<double>(eligible) : 0.0,
               eligible ? last_sum / static_cast<double>(eligible) : 0.0),
           t.seconds());
}

void ac8()
{
    Timer t;
    Rng rng(8);
    int mismatches = 0;
    const int toys = 500;
    for (int i = 0; i < toys; ++i) {
        const auto x = oracle::random_dyadic_hems(rng);
        const double dp = optimize_self_consumption(x.profile, x.battery, x.tariff, x.options).cost;
        if (dp != oracle::enumerate_hems_cost(x.profile, x.battery, x.tariff, x.options)) ++mismatches;
    }

    ProfileGenParams p;
    p.seed = 8;
    const auto tariff = default_tariff();
    const BatterySpec battery;
    int worse = 0, days = 0;
    double residual = 0.0;
    for (const auto& h : generate_population(p)) {
        if (!h.is_prosumer) continue;
        ++days;
        const auto n = optimize_self_consumption(h, battery, tariff);
        if (n.cost > no_battery_cost(h, tariff)) ++worse;
        for (std::size_t k = 0; k < h.demand.size(); ++k)
            residual = std::max(residual, std::abs(h.demand[k] - h.pv[k] + n.charge[k] - n.discharge[k] - n.x_plus[k] +
                                                   n.x_minus[k]));
    }
    report("AC8", mismatches == 0 && worse == 0 && residual <= 1e-9,
           fmt("HEMS optimality: %d/%d toy instances differ from enumeration; %d/%d full days cost more than no "
               "battery; max balance residual %.3g kWh",
               mismatches, toys, worse, days, residual),
           t.seconds());
}

void ac9()
{
    Timer t;
    std::vector<int> all_day;
    for (int h = 0; h < 24; ++h) all_day.push_back(h * 60);
    const auto m = run_matrix(&all_day, {Mechanism::p2p, Mechanism::centralized, Mechanism::vcg});
    const ProfileGenParams defaults;
    const int sunrise = defaults.daylight_window.first, sunset = defaults.daylight_window.second;

    // Scenario 1: no trade in a period that does not overlap daylight.
    std::size_t night_trades = 0;
    for (const auto& [mech, runs] : m.at(Scenario::pv_surplus))
        for (const auto& r : runs)
            for (const auto& h : r.hours)
                if ((h.start_slot + 60 <= sunrise || h.start_slot >= sunset) && h.traded > Energy{0}) ++night_trades;

    // Scenario 2: activity in the peak window after sunset, absent in scenario 1.
    auto evening_qt = [&](Scenario s) {
        double q = 0.0;
        for (const auto& r : m.at(s).at(Mechanism::p2p))
            for (const auto& h : r.hours)
                if (h.start_slot >= sunset && h.start_slot < 20 * 60) q += to_kwh(h.traded);
        return q / kSeeds;
    };
    const double ev1 = evening_qt(Scenario::pv_surplus), ev2 = evening_qt(Scenario::battery_reserve);

    // Scenario 2 with default hours, per-seed <T_p> step from 13h to 14h.
    // "Observable" means a one-sided paired t-test at the 1% level rejects
    // "no increase". The per-seed spread of the p2p step is about twice its
    // mean, so this uses a larger seed sample than the table criteria.
    std::map<Mechanism, std::vector<double>> steps, at13, at14;
    for (std::uint64_t seed = 1; seed <= kShiftSeeds; ++seed) {
        auto base = config_for(Scenario::battery_reserve, Mechanism::p2p);
        const auto day = prepare_day(base, seed);
        for (auto mech : kMechanisms) {
            auto c = base;
            c.mechanism = mech;
            const auto r = run_day(day, c, seed);
            std::optional<double> a, b;
            for (const auto& h : r.hours) {
                if (h.hour() == 13) a = h.avg_price();
                if (h.hour() == 14) b = h.avg_price();
            }
            if (!a || !b) continue;
            steps[mech].push_back(*b - *a);
            at13[mech].push_back(*a);
            at14[mech].push_back(*b);
        }
    }
    bool shift = true;
    std::string prices;
    for (auto mech : kMechanisms) {
        const auto& d = steps[mech];
        const auto n = static_cast<double>(d.size());
        double mean = 0.0, p13 = 0.0, p14 = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            mean += d[i];
            p13 += at13[mech][i];
            p14 += at14[mech][i];
        }
        mean /= n;
        const double sd = d.size() > 1 ? stddev(d) : 0.0;
        const double t_stat = sd > 0.0 ? mean / (sd / std::sqrt(n)) : (mean > 0.0 ? kInf : 0.0);
        const double crit = d.size() > 1 ? quantile(boost::math::students_t(n - 1), 0.99) : kInf;
        const std::string t_text = t_stat > 1e6 ? "constant step" : fmt("t=%.1f", t_stat);
        prices += fmt(" %s %.4f->%.4f (%s, n=%.0f)", std::string(to_string(mech)).c_str(), p13 / n, p14 / n,
                      t_text.c_str(), n);
        // VCG buyer prices sit at the short side's limits and are reported only
        if (mech != Mechanism::vcg) shift = shift && d.size() >= 2 && t_stat > crit;
    }
    report("AC9", night_trades == 0 && ev2 > 0.0 && ev1 == 0.0 && shift,
           fmt("trading hours: S1 %zu trading periods outside daylight; evening (18-20h) Q_T S1 %.2f, S2 %.2f kWh; "
               "S2 <T_p> 13h->14h over %llu seeds, paired one-sided t-test at 1%%:%s",
               night_trades, ev1, ev2, static_cast<unsigned long long>(kShiftSeeds), prices.c_str()),
           t.seconds());
}

}  // namespace

int main()
{
    Timer total;
    Timer setup;
    const Matrix m = run_matrix();
    const double setup_s = setup.seconds();
    ac1(m, setup_s);
    ac2(m);
    ac3();
    ac4();
    ac5(m);
    ac6(m);
    ac7(m);
    ac8();
    ac9();
    std::printf("acceptance: %d failing criteria, %.1fs total\n", failures, total.seconds());
    return failures == 0 ? 0 : 1;
}
