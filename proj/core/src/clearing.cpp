#include "lemsim/clearing.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "text_util.hpp"

namespace lemsim {

void validate(const LimitOrderSet& orders)
{
    std::unordered_set<TraderId> traders;
    auto check = [&](const LimitOrder& o) {
        if (o.price <= Price{0}) throw std::invalid_argument("trader " + std::to_string(o.trader) + ": price must be positive");
        if (o.quantity <= Energy{0})
            throw std::invalid_argument("trader " + std::to_string(o.trader) + ": quantity must be positive");
        if (!traders.insert(o.trader).second)
            throw std::invalid_argument("trader " + std::to_string(o.trader) + " appears more than once");
    };
    std::for_each(orders.buys.begin(), orders.buys.end(), check);
    std::for_each(orders.sells.begin(), orders.sells.end(), check);
}

Money welfare(const LimitOrderSet& orders, const Allocation& a)
{
    Money w{0};
    for (std::size_t i = 0; i < orders.buys.size(); ++i) w += orders.buys[i].price * a.buys[i];
    for (std::size_t i = 0; i < orders.sells.size(); ++i) w -= orders.sells[i].price * a.sells[i];
    return w;
}

namespace {

__extension__ typedef __int128 i128;

struct Level {
    Price price;
    std::vector<std::size_t> members;
    Energy total;
    Energy filled;
};

// Groups orders into price levels, best first.
std::vector<Level> levels(const std::vector<LimitOrder>& side, bool descending)
{
    std::vector<std::size_t> idx(side.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return descending ? side[a].price > side[b].price : side[a].price < side[b].price;
    });
    std::vector<Level> out;
    for (auto i : idx) {
        if (out.empty() || out.back().price != side[i].price) out.push_back({side[i].price, {}, Energy{0}, Energy{0}});
        out.back().members.push_back(i);
        out.back().total += side[i].quantity;
    }
    return out;
}

void ration(const Level& level, const std::vector<LimitOrder>& side, std::vector<Energy>& alloc)
{
    if (level.filled == level.total) {
        for (auto i : level.members) alloc[i] = side[i].quantity;
        return;
    }
    if (level.filled == Energy{0}) return;
    const auto filled = static_cast<i128>(level.filled.raw());
    const auto total = static_cast<i128>(level.total.raw());
    std::int64_t given = 0;
    std::vector<std::pair<std::int64_t, std::size_t>> remainders;  // (remainder, order index)
    for (auto i : level.members) {
        const i128 num = filled * side[i].quantity.raw();
        const auto base = static_cast<std::int64_t>(num / total);
        alloc[i] = Energy{base};
        given += base;
        remainders.emplace_back(static_cast<std::int64_t>(num % total), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::int64_t k = 0; k < level.filled.raw() - given; ++k) alloc[remainders[static_cast<std::size_t>(k)].second] += Energy{1};
}

}  // namespace

Allocation max_welfare_allocation(const LimitOrderSet& orders)
{
    auto bl = levels(orders.buys, true);
    auto sl = levels(orders.sells, false);
    Allocation a;
    a.buys.assign(orders.buys.size(), Energy{0});
    a.sells.assign(orders.sells.size(), Energy{0});

    std::size_t bi = 0, si = 0;
    while (bi < bl.size() && si < sl.size() && bl[bi].price >= sl[si].price) {
        const Energy m = std::min(bl[bi].total - bl[bi].filled, sl[si].total - sl[si].filled);
        bl[bi].filled += m;
        sl[si].filled += m;
        a.cleared += m;
        if (bl[bi].filled == bl[bi].total) ++bi;
        if (sl[si].filled == sl[si].total) ++si;
    }
    for (const auto& l : bl) ration(l, orders.buys, a.buys);
    for (const auto& l : sl) ration(l, orders.sells, a.sells);
    return a;
}

std::optional<PriceInterval> clearing_interval(const LimitOrderSet& orders)
{
    const Energy q = max_welfare_allocation(orders).cleared;
    if (q == Energy{0}) return std::nullopt;
    PriceInterval iv{};
    Energy acc{0};
    for (const auto& l : levels(orders.sells, false)) {
        acc += l.total;
        if (acc >= q) {
            iv.lo = l.price;
            break;
        }
    }
    acc = Energy{0};
    for (const auto& l : levels(orders.buys, true)) {
        acc += l.total;
        if (acc >= q) {
            iv.hi = l.price;
            break;
        }
    }
    return iv;
}

Money ClearingResult::budget() const
{
    Money m{0};
    for (auto p : buy_payments) m += p;
    for (auto p : sell_payments) m += p;
    return m;
}

namespace {

ClearingResult empty_result(const LimitOrderSet& orders, Allocation alloc)
{
    ClearingResult r;
    r.cleared_quantity = alloc.cleared;
    r.allocation = std::move(alloc);
    r.buy_payments.assign(orders.buys.size(), Money{0});
    r.sell_payments.assign(orders.sells.size(), Money{0});
    return r;
}

}  // namespace

ClearingResult clear_equilibrium(const LimitOrderSet& orders)
{
    validate(orders);
    ClearingResult r = empty_result(orders, max_welfare_allocation(orders));
    if (r.cleared_quantity == Energy{0}) return r;
    const auto iv = clearing_interval(orders);
    const Price mcp{(iv->lo.raw() + iv->hi.raw()) / 2};
    r.mcp = mcp;
    for (std::size_t i = 0; i < orders.buys.size(); ++i) r.buy_payments[i] = mcp * r.allocation.buys[i];
    for (std::size_t i = 0; i < orders.sells.size(); ++i) r.sell_payments[i] = -(mcp * r.allocation.sells[i]);
    return r;
}

ClearingResult vcg(const LimitOrderSet& orders)
{
    validate(orders);
    ClearingResult r = empty_result(orders, max_welfare_allocation(orders));
    if (r.cleared_quantity == Energy{0}) return r;
    const Money total = welfare(orders, r.allocation);

    auto optimum_without = [&](bool buy_side, std::size_t skip) {
        LimitOrderSet reduced = orders;
        auto& side = buy_side ? reduced.buys : reduced.sells;
        side.erase(side.begin() + static_cast<std::ptrdiff_t>(skip));
        return welfare(reduced, max_welfare_allocation(reduced));
    };

    // Traders with nothing allocated leave the optimum unchanged and pay 0.
    for (std::size_t i = 0; i < orders.buys.size(); ++i) {
        if (r.allocation.buys[i] == Energy{0}) continue;
        const Money own = orders.buys[i].price * r.allocation.buys[i];
        r.buy_payments[i] = optimum_without(true, i) - (total - own);
    }
    for (std::size_t i = 0; i < orders.sells.size(); ++i) {
        if (r.allocation.sells[i] == Energy{0}) continue;
        const Money own = -(orders.sells[i].price * r.allocation.sells[i]);
        r.sell_payments[i] = optimum_without(false, i) - (total - own);
    }
    return r;
}

void write_clearing_csv(std::ostream& out, int period, std::string_view mechanism, const LimitOrderSet& orders,
                        const ClearingResult& result, bool header)
{
    if (header) out << "period,mechanism,trader,role,quantity,payment,mcp\n";
    const std::string mcp = result.mcp ? format_price(*result.mcp) : std::string{};
    for (std::size_t i = 0; i < orders.buys.size(); ++i)
        out << period << ',' << mechanism << ',' << orders.buys[i].trader << ",buyer,"
            << format_kwh(result.allocation.buys[i]) << ',' << format_money(result.buy_payments[i]) << ',' << mcp << '\n';
    for (std::size_t i = 0; i < orders.sells.size(); ++i)
        out << period << ',' << mechanism << ',' << orders.sells[i].trader << ",seller,"
            << format_kwh(result.allocation.sells[i]) << ',' << format_money(result.sell_payments[i]) << ',' << mcp
            << '\n';
}

std::vector<ClearingRow> read_clearing_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "period,mechanism,trader,role,quantity,payment,mcp")
        throw std::invalid_argument("clearing csv: unexpected header");
    std::vector<ClearingRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto c = detail::split(detail::trim(line), ',');
        if (c.size() != 7) throw std::invalid_argument("clearing csv: line " + std::to_string(line_no) + ": expected 7 columns");
        ClearingRow r;
        r.period = detail::parse_number_or_throw<int>(c[0], "period");
        r.mechanism = std::string(detail::trim(c[1]));
        r.trader = detail::parse_number_or_throw<TraderId>(c[2], "trader");
        const auto role = detail::trim(c[3]);
        if (role != "buyer" && role != "seller")
            throw std::invalid_argument("clearing csv: line " + std::to_string(line_no) + ": bad role");
        r.role = role == "buyer" ? Side::buy : Side::sell;
        r.quantity = parse_kwh(detail::trim(c[4]));
        r.payment = parse_money(detail::trim(c[5]));
        if (!detail::trim(c[6]).empty()) r.mcp = parse_price(detail::trim(c[6]));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace lemsim
