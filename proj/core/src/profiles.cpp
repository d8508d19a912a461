#include "lemsim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lemsim/rng.hpp"
#include "text_util.hpp"

namespace lemsim {

TariffSchedule::TariffSchedule(std::vector<TariffSegment> segments, int slots_per_day)
    : segments_(std::move(segments)), slots_per_day_(slots_per_day)
{
    if (slots_per_day_ <= 0) throw std::invalid_argument("tariff: slots_per_day must be positive");
    if (segments_.empty()) throw std::invalid_argument("tariff: no segments");
    if (segments_.front().start_slot != 0) throw std::invalid_argument("tariff: first segment must start at slot 0");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (s.start_slot < 0 || s.start_slot >= slots_per_day_)
            throw std::invalid_argument("tariff: segment start " + std::to_string(s.start_slot) + " outside the day");
        if (i > 0 && s.start_slot <= segments_[i - 1].start_slot)
            throw std::invalid_argument("tariff: segment starts must be strictly increasing");
        if (!(s.sell > Price{0}) || !(s.buy > s.sell))
            throw std::invalid_argument("tariff: need buy > sell > 0 at slot " + std::to_string(s.start_slot));
    }
}

TariffRates TariffSchedule::lookup(int slot) const
{
    if (slot < 0 || slot >= slots_per_day_)
        throw std::out_of_range("tariff lookup: slot " + std::to_string(slot) + " outside [0, " +
                                std::to_string(slots_per_day_) + ")");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), slot,
                               [](int k, const TariffSegment& s) { return k < s.start_slot; });
    --it;  // segments_.front().start_slot == 0 <= slot
    return {it->buy, it->sell};
}

Price TariffSchedule::peak_buy() const
{
    return std::max_element(segments_.begin(), segments_.end(),
                            [](const auto& a, const auto& b) { return a.buy < b.buy; })
        ->buy;
}

TariffSchedule default_tariff()
{
    const Price off = price_from_dollars(0.13);
    const Price shoulder = price_from_dollars(0.25);
    const Price peak = price_from_dollars(0.52);
    const Price fit = price_from_dollars(0.08);
    return TariffSchedule({{0, off, fit},
                           {7 * 60, shoulder, fit},
                           {14 * 60, peak, fit},
                           {20 * 60, shoulder, fit},
                           {22 * 60, off, fit}});
}

TariffRates tariff_lookup(const TariffSchedule& schedule, int slot) { return schedule.lookup(slot); }

void validate_profile(const HouseholdProfile& p, int slots_per_day)
{
    const std::string who = "household " + std::to_string(p.id);
    if (std::ssize(p.demand) != slots_per_day || std::ssize(p.pv) != slots_per_day)
        throw std::invalid_argument(who + ": profile length does not match slots_per_day");
    auto bad = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
    if (std::any_of(p.demand.begin(), p.demand.end(), bad))
        throw std::invalid_argument(who + ": negative or non-finite demand");
    if (std::any_of(p.pv.begin(), p.pv.end(), bad))
        throw std::invalid_argument(who + ": negative or non-finite pv");
    if (!p.is_prosumer && std::any_of(p.pv.begin(), p.pv.end(), [](double v) { return v != 0.0; }))
        throw std::invalid_argument(who + ": consumer with non-zero pv");
}

void validate(const ProfileGenParams& p)
{
    if (p.n_households < 1) throw std::invalid_argument("n_households must be at least 1");
    if (p.n_prosumers < 0) throw std::invalid_argument("n_prosumers must be non-negative");
    if (p.n_prosumers > p.n_households)
        throw std::invalid_argument("n_prosumers (" + std::to_string(p.n_prosumers) + ") exceeds n_households (" +
                                    std::to_string(p.n_households) + ")");
    if (p.slots_per_day <= 0) throw std::invalid_argument("slots_per_day must be positive");
    if (!(p.base_load >= 0.0)) throw std::invalid_argument("base_load must be non-negative");
    if (!(p.appliance_event_rate >= 0.0)) throw std::invalid_argument("appliance_event_rate must be non-negative");
    if (!(p.appliance_event_energy.first >= 0.0) || p.appliance_event_energy.second < p.appliance_event_energy.first)
        throw std::invalid_argument("appliance_event_energy must be a non-negative range lo <= hi");
    if (!(p.pv_peak.first >= 0.0) || p.pv_peak.second < p.pv_peak.first)
        throw std::invalid_argument("pv_peak must be a non-negative range lo <= hi");
    if (!(p.pv_noise >= 0.0)) throw std::invalid_argument("pv_noise must be non-negative");
    const auto [rise, set] = p.daylight_window;
    if (rise < 0 || set > p.slots_per_day || rise >= set)
        throw std::invalid_argument("daylight_window must satisfy 0 <= sunrise < sunset <= slots_per_day");
}

namespace {

constexpr int kMinEventMinutes = 5;
constexpr int kMaxEventMinutes = 60;

HouseholdProfile make_household(const ProfileGenParams& params, int id)
{
    Rng rng(derive_seed(params.seed, {static_cast<std::uint64_t>(id)}));
    const int slots = params.slots_per_day;
    const double hours_per_slot = 24.0 / slots;

    HouseholdProfile h;
    h.id = id;
    h.is_prosumer = id < params.n_prosumers;
    h.demand.assign(static_cast<std::size_t>(slots), params.base_load);
    h.pv.assign(static_cast<std::size_t>(slots), 0.0);

    if (params.appliance_event_rate > 0.0) {
        const double rate_per_slot = params.appliance_event_rate * hours_per_slot;
        double t = rng.exponential(rate_per_slot);
        while (t < slots) {
            const int start = static_cast<int>(t);
            const int minutes = kMinEventMinutes + static_cast<int>(rng.index(kMaxEventMinutes - kMinEventMinutes + 1));
            const int duration = std::max(1, static_cast<int>(std::lround(minutes / (60.0 * hours_per_slot))));
            const double energy = rng.uniform(params.appliance_event_energy.first, params.appliance_event_energy.second);
            const double per_slot = energy / duration;
            for (int k = start; k < std::min(start + duration, slots); ++k) h.demand[static_cast<std::size_t>(k)] += per_slot;
            t += rng.exponential(rate_per_slot);
        }
    }

    if (h.is_prosumer) {
        const double peak_kw = rng.uniform(params.pv_peak.first, params.pv_peak.second);
        const auto [rise, set] = params.daylight_window;
        const double span = set - rise;
        for (int k = rise; k < set; ++k) {
            const double shape = std::sin(std::numbers::pi * (k + 0.5 - rise) / span);
            const double noise = std::clamp(1.0 + params.pv_noise * rng.normal(), 0.0, 2.0);
            h.pv[static_cast<std::size_t>(k)] = peak_kw * hours_per_slot * shape * noise;
        }
    }
    return h;
}

}  // namespace

std::vector<HouseholdProfile> generate_population(const ProfileGenParams& params)
{
    validate(params);
    std::vector<HouseholdProfile> out;
    out.reserve(static_cast<std::size_t>(params.n_households));
    for (int id = 0; id < params.n_households; ++id) out.push_back(make_household(params, id));
    return out;
}

void write_profiles_csv(std::ostream& out, const std::vector<HouseholdProfile>& profiles)
{
    out << "slot";
    for (const auto& h : profiles) {
        out << ",demand_" << h.id;
        if (h.is_prosumer) out << ",pv_" << h.id;
    }
    out << '\n';
    const std::size_t slots = profiles.empty() ? 0 : profiles.front().demand.size();
    for (std::size_t k = 0; k < slots; ++k) {
        out << k;
        for (const auto& h : profiles) {
            out << ',' << detail::shortest(h.demand[k]);
            if (h.is_prosumer) out << ',' << detail::shortest(h.pv[k]);
        }
        out << '\n';
    }
}

std::vector<HouseholdProfile> read_profiles_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("profiles: empty input");
    const auto header = detail::split(detail::trim(line), ',');
    if (header.empty() || header[0] != "slot") throw std::invalid_argument("profiles: header must start with 'slot'");

    struct Column {
        std::size_t household;
        bool is_pv;
    };
    std::vector<HouseholdProfile> out;
    std::map<int, std::size_t> index_of;
    std::vector<Column> columns;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto name = detail::trim(header[c]);
        const bool is_pv = name.starts_with("pv_");
        if (!is_pv && !name.starts_with("demand_"))
            throw std::invalid_argument("profiles: unexpected column '" + std::string(name) + "'");
        const int id = detail::parse_number_or_throw<int>(name.substr(is_pv ? 3 : 7), "household id");
        auto [it, inserted] = index_of.try_emplace(id, out.size());
        if (inserted) out.push_back(HouseholdProfile{id, {}, {}, false});
        if (is_pv) out[it->second].is_prosumer = true;
        columns.push_back({it->second, is_pv});
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(detail::trim(line), ',');
        if (cells.size() != header.size())
            throw std::invalid_argument("profiles: line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " columns");
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const double v = detail::parse_number_or_throw<double>(cells[c], "kWh value");
            auto& h = out[columns[c - 1].household];
            (columns[c - 1].is_pv ? h.pv : h.demand).push_back(v);
        }
    }
    for (auto& h : out) {
        if (!h.is_prosumer) h.pv.assign(h.demand.size(), 0.0);
        validate_profile(h, static_cast<int>(h.demand.size()));
    }
    return out;
}

void write_tariff_csv(std::ostream& out, const TariffSchedule& tariff)
{
    out << "start_minute,buy,sell\n";
    for (const auto& s : tariff.segments())
        out << s.start_slot << ',' << format_price(s.buy) << ',' << format_price(s.sell) << '\n';
}

TariffSchedule read_tariff_csv(std::istream& in, int slots_per_day)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "start_minute,buy,sell")
        throw std::invalid_argument("tariff: header must be 'start_minute,buy,sell'");
    std::vector<TariffSegment> segments;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        const auto cells = detail::split(t, ',');
        if (cells.size() != 3) throw std::invalid_argument("tariff: line " + std::to_string(line_no) + ": expected 3 columns");
        try {
            segments.push_back({detail::parse_number_or_throw<int>(cells[0], "start_minute"),
                                parse_price(detail::trim(cells[1])), parse_price(detail::trim(cells[2]))});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("tariff: line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return TariffSchedule(std::move(segments), slots_per_day);
}

}  // namespace lemsim
