#include "lemsim/orderbook.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace lemsim {

std::vector<Trade> OrderBook::submit(const Order& order)
{
    if (order.price <= Price{0}) throw std::invalid_argument("order " + std::to_string(order.id) + ": price must be positive");
    if (order.quantity <= Energy{0})
        throw std::invalid_argument("order " + std::to_string(order.id) + ": quantity must be positive");
    if (!seen_ids_.insert(order.id).second)
        throw std::invalid_argument("order " + std::to_string(order.id) + ": duplicate id");

    const std::uint64_t seq = clock_++;
    const bool is_buy = order.side == Side::buy;
    auto& opposite = is_buy ? asks_ : bids_;
    Energy remaining = order.quantity;
    std::vector<Trade> fills;

    while (remaining > Energy{0} && !opposite.empty()) {
        auto head = opposite.begin();
        Order& resting = head->second;
        const bool crosses = is_buy ? order.price >= resting.price : resting.price >= order.price;
        if (!crosses) break;

        const Energy q = std::min(remaining, resting.quantity);
        Trade t;
        t.buy_order_id = is_buy ? order.id : resting.id;
        t.sell_order_id = is_buy ? resting.id : order.id;
        t.buyer = is_buy ? order.trader : resting.trader;
        t.seller = is_buy ? resting.trader : order.trader;
        t.price = resting.price;
        t.quantity = q;
        t.timestamp = order.timestamp;
        fills.push_back(t);

        remaining -= q;
        resting.quantity -= q;
        if (resting.quantity == Energy{0}) {
            resting_.erase(resting.id);
            opposite.erase(head);
        }
    }

    if (remaining > Energy{0}) {
        Order rest = order;
        rest.quantity = remaining;
        const Key key{is_buy ? -order.price.raw() : order.price.raw(), order.timestamp, seq};
        (is_buy ? bids_ : asks_).emplace(key, rest);
        resting_.emplace(order.id, std::pair{order.side, key});
    }

    trades_.insert(trades_.end(), fills.begin(), fills.end());
    return fills;
}

std::optional<Order> OrderBook::best_bid() const
{
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->second;
}

std::optional<Order> OrderBook::best_ask() const
{
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->second;
}

std::optional<Energy> OrderBook::resting_quantity(OrderId id) const
{
    auto it = resting_.find(id);
    if (it == resting_.end()) return std::nullopt;
    const auto& [side, key] = it->second;
    const auto& book = side == Side::buy ? bids_ : asks_;
    return book.at(key).quantity;
}

std::vector<Order> OrderBook::bids() const
{
    std::vector<Order> out;
    for (const auto& [k, o] : bids_) out.push_back(o);
    return out;
}

std::vector<Order> OrderBook::asks() const
{
    std::vector<Order> out;
    for (const auto& [k, o] : asks_) out.push_back(o);
    return out;
}

Energy total_traded(std::span<const Trade> trades)
{
    return std::accumulate(trades.begin(), trades.end(), Energy{0},
                           [](Energy acc, const Trade& t) { return acc + t.quantity; });
}

void write_trade_log_csv(std::ostream& out, int period, std::span<const Trade> trades, bool header)
{
    if (header) out << "period,timestamp,buy_id,sell_id,price,quantity\n";
    for (const auto& t : trades) {
        out << period << ',' << detail::shortest(t.timestamp) << ',' << t.buy_order_id << ',' << t.sell_order_id << ','
            << format_price(t.price) << ',' << format_kwh(t.quantity) << '\n';
    }
}

std::vector<TradeLogRow> read_trade_log_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "period,timestamp,buy_id,sell_id,price,quantity")
        throw std::invalid_argument("trade log: unexpected header");
    std::vector<TradeLogRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto c = detail::split(detail::trim(line), ',');
        if (c.size() != 6) throw std::invalid_argument("trade log: line " + std::to_string(line_no) + ": expected 6 columns");
        TradeLogRow r;
        r.period = detail::parse_number_or_throw<int>(c[0], "period");
        r.timestamp = detail::parse_number_or_throw<double>(c[1], "timestamp");
        r.buy_id = detail::parse_number_or_throw<OrderId>(c[2], "buy_id");
        r.sell_id = detail::parse_number_or_throw<OrderId>(c[3], "sell_id");
        r.price = parse_price(detail::trim(c[4]));
        r.quantity = parse_kwh(detail::trim(c[5]));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace lemsim
