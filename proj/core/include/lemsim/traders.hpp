#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lemsim/orderbook.hpp"
#include "lemsim/rng.hpp"

namespace lemsim {

/// ZIP population parameters. Learning rate, momentum and opening margin are
/// drawn per agent from the given ranges; target prices are perturbed by
/// R in [1, 1 + perturb_relative] and A in [0, perturb_absolute * price] when
/// the quote has to move up, and by the mirrored ranges when it moves down.
struct ZipParams {
    std::pair<double, double> beta{0.1, 0.5};
    std::pair<double, double> gamma{0.0, 0.1};
    std::pair<double, double> initial_margin{0.05, 0.35};
    double perturb_relative = 0.05;
    double perturb_absolute = 0.05;
    double activity = 10.0;  // expected activations per agent per period
};

struct ZipAgent {
    TraderId trader = 0;
    Side side = Side::buy;
    double limit = 0.0;   // $/kWh; buyers' willingness to pay, sellers' floor
    double l_min = 0.0;   // price corridor of the period
    double l_max = 0.0;
    double margin = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double last_delta = 0.0;
    Energy remaining;
    bool active = true;

    bool operator==(const ZipAgent&) const = default;
};

/// Draws beta, gamma and the opening margin from `params`.
ZipAgent make_zip_agent(TraderId trader, Side side, double limit, double l_min, double l_max, Energy quantity,
                        const ZipParams& params, Rng& rng);

/// Margin-shaded price clamped to [l_min, l_max]. Throws std::logic_error
/// for an agent that is inactive or has nothing left to trade.
double quote(const ZipAgent& agent);

/// quote() without the activity precondition; used when revising margins.
double shaded_price(const ZipAgent& agent);

/// What every agent observes after an order is processed. `price` is the last
/// transaction price when the order traded, else the order's own price.
struct MarketEvent {
    Side side = Side::buy;
    bool matched = false;
    double price = 0.0;
};

/// One step of the ZIP rule. Buyers raise their margin when a trade happened
/// at or below their quote; they lower it when a seller's order traded above
/// their quote, or when a buyer's order at or above their quote went
/// unmatched. Sellers mirror this. Movement is Widrow-Hoff with momentum
/// toward a perturbed target; the margin never goes negative.
ZipAgent update_margin(const ZipAgent& agent, const MarketEvent& event, Rng& rng, const ZipParams& params = {});

/// Exponential inter-arrival time for activation rate `lambda` per minute.
double next_activation(Rng& rng, double lambda);

/// Uniform choice among `eligible`; throws when it is empty.
std::size_t select_trader(Rng& rng, std::span<const std::size_t> eligible);

/// Rate giving `params.activity` expected activations per agent over t_d minutes.
double default_lambda(std::size_t n_agents, double t_d, const ZipParams& params = {});

/// Runs one trading period. Each activation picks an agent with quantity
/// left; if it has no order resting it submits its whole remaining quantity
/// at its quote, and the resulting event is broadcast to all agents. The loop
/// stops when t_d elapses, nobody has quantity left, or every agent with
/// quantity already has an order resting. Returns the trades of the period.
std::vector<Trade> session(std::vector<ZipAgent>& agents, OrderBook& book, double t_d, double lambda, Rng& rng,
                           const ZipParams& params = {});

}  // namespace lemsim
