#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "lemsim/units.hpp"

namespace lemsim {

enum class Side { buy, sell };

using OrderId = std::uint64_t;
using TraderId = int;

struct Order {
    OrderId id = 0;
    TraderId trader = 0;
    Side side = Side::buy;
    Price price;
    Energy quantity;        // remaining
    double timestamp = 0.0; // arrival time within the trading period, minutes

    bool operator==(const Order&) const = default;
};

struct Trade {
    OrderId buy_order_id = 0;
    OrderId sell_order_id = 0;
    TraderId buyer = 0;
    TraderId seller = 0;
    Price price;
    Energy quantity;
    double timestamp = 0.0;  // arrival time of the order that triggered the match

    bool operator==(const Trade&) const = default;
};

/// Continuous double auction book for one trading period. Bids are ranked by
/// price descending, asks by price ascending, and equal prices by arrival
/// time, then by submission sequence. A crossing pair trades at the resting
/// order's price. Orders live until the period closes; there is no
/// cancellation.
class OrderBook {
public:
    /// Matches `order` against the opposite side while prices cross, then
    /// rests any remainder. Returns the trades it produced, in execution order.
    /// Throws std::invalid_argument for non-positive price or quantity or an
    /// id already used in this book.
    std::vector<Trade> submit(const Order& order);

    [[nodiscard]] std::optional<Order> best_bid() const;
    [[nodiscard]] std::optional<Order> best_ask() const;

    /// Remaining quantity of a resting order, or nullopt once it has left the book.
    [[nodiscard]] std::optional<Energy> resting_quantity(OrderId id) const;

    [[nodiscard]] const std::vector<Trade>& trade_log() const { return trades_; }
    [[nodiscard]] std::uint64_t clock() const { return clock_; }
    [[nodiscard]] std::size_t bid_count() const { return bids_.size(); }
    [[nodiscard]] std::size_t ask_count() const { return asks_.size(); }

    /// Resting orders in priority order.
    [[nodiscard]] std::vector<Order> bids() const;
    [[nodiscard]] std::vector<Order> asks() const;

private:
    // (price key, timestamp, sequence); bids negate the price so that both
    // sides sort ascending with the best order first.
    using Key = std::tuple<std::int64_t, double, std::uint64_t>;

    std::map<Key, Order> bids_;
    std::map<Key, Order> asks_;
    std::map<OrderId, std::pair<Side, Key>> resting_;
    std::unordered_set<OrderId> seen_ids_;
    std::vector<Trade> trades_;
    std::uint64_t clock_ = 0;
};

/// Total traded energy of a trade log.
Energy total_traded(std::span<const Trade> trades);

/// CSV: "period,timestamp,buy_id,sell_id,price,quantity" with the header row.
void write_trade_log_csv(std::ostream& out, int period, std::span<const Trade> trades, bool header = true);

struct TradeLogRow {
    int period = 0;
    double timestamp = 0.0;
    OrderId buy_id = 0;
    OrderId sell_id = 0;
    Price price;
    Energy quantity;

    bool operator==(const TradeLogRow&) const = default;
};

std::vector<TradeLogRow> read_trade_log_csv(std::istream& in);

}  // namespace lemsim
