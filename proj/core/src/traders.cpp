#include "lemsim/traders.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace lemsim {

ZipAgent make_zip_agent(TraderId trader, Side side, double limit, double l_min, double l_max, Energy quantity,
                        const ZipParams& params, Rng& rng)
{
    if (!(l_min > 0.0) || !(l_max >= l_min)) throw std::invalid_argument("zip agent: invalid price corridor");
    if (!(limit > 0.0)) throw std::invalid_argument("zip agent: limit price must be positive");
    ZipAgent a;
    a.trader = trader;
    a.side = side;
    a.limit = limit;
    a.l_min = l_min;
    a.l_max = l_max;
    a.beta = rng.uniform(params.beta.first, params.beta.second);
    a.gamma = rng.uniform(params.gamma.first, params.gamma.second);
    a.margin = rng.uniform(params.initial_margin.first, params.initial_margin.second);
    a.remaining = quantity;
    a.active = quantity > Energy{0};
    return a;
}

double shaded_price(const ZipAgent& a)
{
    const double raw = a.side == Side::buy ? a.limit * (1.0 - a.margin) : a.limit * (1.0 + a.margin);
    return std::clamp(raw, a.l_min, a.l_max);
}

double quote(const ZipAgent& a)
{
    if (!a.active || a.remaining <= Energy{0}) throw std::logic_error("quote: agent is not active");
    return shaded_price(a);
}

ZipAgent update_margin(const ZipAgent& a, const MarketEvent& ev, Rng& rng, const ZipParams& params)
{
    if (!(ev.price > 0.0)) throw std::invalid_argument("market event price must be positive");
    const double p = shaded_price(a);
    const double q = ev.price;

    // +1: quote should move up, -1: down
    int dir = 0;
    if (a.side == Side::buy) {
        if (ev.matched) {
            if (p >= q) dir = -1;
            else if (ev.side == Side::sell && a.active) dir = +1;
        } else if (ev.side == Side::buy && a.active && p <= q) {
            dir = +1;
        }
    } else {
        if (ev.matched) {
            if (p <= q) dir = +1;
            else if (ev.side == Side::buy && a.active) dir = -1;
        } else if (ev.side == Side::sell && a.active && p >= q) {
            dir = -1;
        }
    }
    if (dir == 0) return a;

    const double r = dir > 0 ? rng.uniform(1.0, 1.0 + params.perturb_relative)
                             : rng.uniform(1.0 - params.perturb_relative, 1.0);
    const double abs = dir > 0 ? rng.uniform(0.0, params.perturb_absolute * q)
                               : rng.uniform(-params.perturb_absolute * q, 0.0);
    const double target = r * q + abs;
    const double move = a.beta * (target - p) + a.gamma * a.last_delta;

    ZipAgent next = a;
    next.last_delta = move;
    if (move == 0.0) return next;
    const double np = std::clamp(p + move, a.l_min, a.l_max);
    const double m = a.side == Side::buy ? 1.0 - np / a.limit : np / a.limit - 1.0;
    next.margin = std::max(0.0, m);
    return next;
}

double next_activation(Rng& rng, double lambda)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("activation rate lambda must be positive");
    return rng.exponential(lambda);
}

std::size_t select_trader(Rng& rng, std::span<const std::size_t> eligible)
{
    if (eligible.empty()) throw std::invalid_argument("select_trader: no eligible trader");
    return eligible[rng.index(eligible.size())];
}

double default_lambda(std::size_t n_agents, double t_d, const ZipParams& params)
{
    if (!(t_d > 0.0)) throw std::invalid_argument("trading period length must be positive");
    return params.activity * static_cast<double>(std::max<std::size_t>(n_agents, 1)) / t_d;
}

std::vector<Trade> session(std::vector<ZipAgent>& agents, OrderBook& book, double t_d, double lambda, Rng& rng,
                           const ZipParams& params)
{
    if (!(t_d > 0.0)) throw std::invalid_argument("trading period length must be positive");
    const std::size_t first_trade = book.trade_log().size();
    std::vector<std::optional<OrderId>> live(agents.size());
    std::unordered_map<OrderId, std::size_t> owner;
    OrderId next_id = book.clock() + 1;
    std::vector<std::size_t> eligible;
    eligible.reserve(agents.size());

    double t = 0.0;
    while (true) {
        t += next_activation(rng, lambda);
        if (t >= t_d) break;

        eligible.clear();
        bool any_idle = false;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (agents[i].remaining <= Energy{0}) continue;
            eligible.push_back(i);
            any_idle = any_idle || !live[i];
        }
        if (!any_idle) break;

        const std::size_t idx = select_trader(rng, eligible);
        if (live[idx]) continue;  // no stacking on top of a resting order

        ZipAgent& agent = agents[idx];
        const Price floor = price_from_dollars(agent.l_min);
        const Price ceiling = price_from_dollars(agent.l_max);
        Order order;
        order.id = next_id++;
        order.trader = agent.trader;
        order.side = agent.side;
        order.price = std::clamp(price_from_dollars(quote(agent)), floor, ceiling);
        order.quantity = agent.remaining;
        order.timestamp = t;
        owner.emplace(order.id, idx);

        const auto trades = book.submit(order);
        for (const auto& tr : trades) {
            const std::size_t other = owner.at(agent.side == Side::buy ? tr.sell_order_id : tr.buy_order_id);
            agent.remaining -= tr.quantity;
            agents[other].remaining -= tr.quantity;
            if (agents[other].remaining == Energy{0}) {
                agents[other].active = false;
                live[other].reset();
            }
        }
        if (agent.remaining > Energy{0}) {
            live[idx] = order.id;
        } else {
            agent.active = false;
        }

        MarketEvent ev;
        ev.side = order.side;
        ev.matched = !trades.empty();
        ev.price = to_dollars(ev.matched ? trades.back().price : order.price);
        for (auto& a : agents) a = update_margin(a, ev, rng, params);
    }
    const auto& log = book.trade_log();
    return {log.begin() + static_cast<std::ptrdiff_t>(first_trade), log.end()};
}

}  // namespace lemsim
