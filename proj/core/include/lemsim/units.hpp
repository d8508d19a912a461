#pragma once

// Fixed-point quantities used throughout the market code. Energy is counted in
// watt-hours, prices in 1e-4 $/kWh ("ticks"), and money in 1e-7 $, which is
// exactly one tick times one watt-hour. Every product price * energy is
// therefore an exact integer and all aggregate identities hold without
// tolerance.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lemsim {

template <typename Tag>
class FixedQuantity {
public:
    using rep = std::int64_t;

    constexpr FixedQuantity() = default;
    constexpr explicit FixedQuantity(rep raw) : raw_(raw) {}

    [[nodiscard]] constexpr rep raw() const { return raw_; }

    constexpr auto operator<=>(const FixedQuantity&) const = default;

    constexpr FixedQuantity& operator+=(FixedQuantity o) { raw_ += o.raw_; return *this; }
    constexpr FixedQuantity& operator-=(FixedQuantity o) { raw_ -= o.raw_; return *this; }
    friend constexpr FixedQuantity operator+(FixedQuantity a, FixedQuantity b) { return a += b; }
    friend constexpr FixedQuantity operator-(FixedQuantity a, FixedQuantity b) { return a -= b; }
    friend constexpr FixedQuantity operator-(FixedQuantity a) { return FixedQuantity{-a.raw_}; }
    friend constexpr FixedQuantity operator*(FixedQuantity a, rep k) { return FixedQuantity{a.raw_ * k}; }
    friend constexpr FixedQuantity operator*(rep k, FixedQuantity a) { return FixedQuantity{a.raw_ * k}; }

private:
    rep raw_ = 0;
};

struct EnergyTag {};
struct PriceTag {};
struct MoneyTag {};

/// Energy in watt-hours.
using Energy = FixedQuantity<EnergyTag>;
/// Unit price in 1e-4 $/kWh.
using Price = FixedQuantity<PriceTag>;
/// Currency in 1e-7 $.
using Money = FixedQuantity<MoneyTag>;

inline constexpr std::int64_t kWhPerKwh = 1'000;
inline constexpr std::int64_t kTicksPerDollarPerKwh = 10'000;
inline constexpr std::int64_t kMoneyUnitsPerDollar = 10'000'000;

constexpr Money operator*(Price p, Energy e) { return Money{p.raw() * e.raw()}; }
constexpr Money operator*(Energy e, Price p) { return p * e; }

constexpr Energy wh(std::int64_t v) { return Energy{v}; }
constexpr Price ticks(std::int64_t v) { return Price{v}; }

// Conversions from floating point round to nearest.
Energy energy_from_kwh(double kwh);
Price price_from_dollars(double dollars_per_kwh);
Money money_from_dollars(double dollars);

double to_kwh(Energy e);
double to_dollars(Price p);
double to_dollars(Money m);

// Exact decimal rendering: energy as kWh with 3 decimals, prices with 4,
// money with 7. parse_* accept exactly what format_* produce (and shorter
// fractional parts); anything else throws std::invalid_argument.
std::string format_kwh(Energy e);
std::string format_price(Price p);
std::string format_money(Money m);
Energy parse_kwh(std::string_view s);
Price parse_price(std::string_view s);
Money parse_money(std::string_view s);

}  // namespace lemsim
