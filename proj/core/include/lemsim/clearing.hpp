#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemsim/orderbook.hpp"
#include "lemsim/units.hpp"

namespace lemsim {

struct LimitOrder {
    TraderId trader = 0;
    Price price;
    Energy quantity;

    bool operator==(const LimitOrder&) const = default;
};

/// Truthful limit orders of one trading period. A trader appears at most
/// once across both sides.
struct LimitOrderSet {
    std::vector<LimitOrder> buys;
    std::vector<LimitOrder> sells;
};

/// Throws std::invalid_argument on non-positive prices or quantities or a
/// repeated trader id.
void validate(const LimitOrderSet& orders);

/// Cleared energy per order, index-aligned with the order set.
struct Allocation {
    std::vector<Energy> buys;
    std::vector<Energy> sells;
    Energy cleared;

    bool operator==(const Allocation&) const = default;
};

/// Sum of buyer values minus seller costs under linear utilities.
Money welfare(const LimitOrderSet& orders, const Allocation& allocation);

/// Welfare-maximising allocation: buyers by price descending, sellers
/// ascending, matched while the buyer's price is at least the seller's.
/// When a price level is only partly cleared its orders are filled in
/// proportion to their quantity (largest remainder, then lower index, for the
/// last watt-hours).
Allocation max_welfare_allocation(const LimitOrderSet& orders);

struct PriceInterval {
    Price lo;
    Price hi;
};

/// The range of uniform prices at which the welfare-maximising quantity
/// clears: from the cheapest supply price covering it to the highest demand
/// price still covering it. nullopt when nothing clears.
std::optional<PriceInterval> clearing_interval(const LimitOrderSet& orders);

struct ClearingResult {
    std::optional<Price> mcp;
    Allocation allocation;
    std::vector<Money> buy_payments;   // positive: trader pays
    std::vector<Money> sell_payments;  // negative: trader receives
    Energy cleared_quantity;

    [[nodiscard]] Money budget() const;  // sum of all payments; negative is a deficit
};

/// Uniform-price clearing at the midpoint of clearing_interval (rounded down
/// to a whole tick). Empty or non-crossing markets return a zero-trade result
/// without a price.
ClearingResult clear_equilibrium(const LimitOrderSet& orders);

/// Same allocation; each trader pays the welfare the others lose because of
/// its presence (Clarke pivot, both sides).
ClearingResult vcg(const LimitOrderSet& orders);

/// Rows "period,mechanism,trader,role,quantity,payment,mcp" for every order.
void write_clearing_csv(std::ostream& out, int period, std::string_view mechanism, const LimitOrderSet& orders,
                        const ClearingResult& result, bool header = true);

struct ClearingRow {
    int period = 0;
    std::string mechanism;
    TraderId trader = 0;
    Side role = Side::buy;
    Energy quantity;
    Money payment;
    std::optional<Price> mcp;

    bool operator==(const ClearingRow&) const = default;
};

std::vector<ClearingRow> read_clearing_csv(std::istream& in);

}  // namespace lemsim
