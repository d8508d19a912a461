#include "lemsim/units.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lemsim {

namespace {

std::int64_t round_scaled(double v, std::int64_t scale)
{
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in fixed-point conversion");
    return static_cast<std::int64_t>(std::llround(v * static_cast<double>(scale)));
}

std::string format_scaled(std::int64_t raw, std::int64_t scale, int digits)
{
    const bool neg = raw < 0;
    // raw == INT64_MIN never occurs for physically meaningful values
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-raw) : static_cast<std::uint64_t>(raw);
    const auto uscale = static_cast<std::uint64_t>(scale);
    std::string whole = std::to_string(mag / uscale);
    std::string frac = std::to_string(mag % uscale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    return (neg ? "-" : "") + whole + "." + frac;
}

std::int64_t parse_scaled(std::string_view s, int digits, const char* what)
{
    auto fail = [&] {
        throw std::invalid_argument(std::string("malformed ") + what + " '" + std::string(s) + "'");
    };
    if (s.empty()) fail();
    bool neg = false;
    if (s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() || frac.size() > static_cast<std::size_t>(digits)) fail();
    std::int64_t w = 0;
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (ec != std::errc{} || p != whole.data() + whole.size()) fail();
    std::int64_t f = 0;
    if (!frac.empty()) {
        auto [q, ec2] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
        if (ec2 != std::errc{} || q != frac.data() + frac.size()) fail();
        for (auto i = frac.size(); i < static_cast<std::size_t>(digits); ++i) f *= 10;
    }
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const std::int64_t v = w * scale + f;
    return neg ? -v : v;
}

}  // namespace

Energy energy_from_kwh(double kwh) { return Energy{round_scaled(kwh, kWhPerKwh)}; }
Price price_from_dollars(double d) { return Price{round_scaled(d, kTicksPerDollarPerKwh)}; }
Money money_from_dollars(double d) { return Money{round_scaled(d, kMoneyUnitsPerDollar)}; }

double to_kwh(Energy e) { return static_cast<double>(e.raw()) / kWhPerKwh; }
double to_dollars(Price p) { return static_cast<double>(p.raw()) / kTicksPerDollarPerKwh; }
double to_dollars(Money m) { return static_cast<double>(m.raw()) / kMoneyUnitsPerDollar; }

std::string format_kwh(Energy e) { return format_scaled(e.raw(), kWhPerKwh, 3); }
std::string format_price(Price p) { return format_scaled(p.raw(), kTicksPerDollarPerKwh, 4); }
std::string format_money(Money m) { return format_scaled(m.raw(), kMoneyUnitsPerDollar, 7); }

Energy parse_kwh(std::string_view s) { return Energy{parse_scaled(s, 3, "energy")}; }
Price parse_price(std::string_view s) { return Price{parse_scaled(s, 4, "price")}; }
Money parse_money(std::string_view s) { return Money{parse_scaled(s, 7, "money")}; }

}  // namespace lemsim
