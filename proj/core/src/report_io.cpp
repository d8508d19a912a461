#include "lemsim/report_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "text_util.hpp"

namespace lemsim {

namespace {

std::string opt(std::optional<double> v) { return v ? detail::shortest(*v) : std::string{}; }

int scenario_number(Scenario s) { return static_cast<int>(s); }

void settlement_row(std::ostream& out, const MetricsReport& r, std::uint64_t seed, const std::string& hour,
                    const HourMetrics& h)
{
    out << scenario_number(r.scenario) << ',' << to_string(r.mechanism) << ',' << seed << ',' << hour << ','
        << format_money(h.savings) << ',' << format_money(h.profit) << ',' << format_money(h.prosumer_grid_cost) << ','
        << format_money(h.buyer_paid) << ',' << format_money(h.seller_received) << '\n';
}

void summary_row(std::ostream& out, const MetricsReport& r, const std::string& hour, const HourSummary& s)
{
    out << scenario_number(r.scenario) << ',' << to_string(r.mechanism) << ',' << hour << ',' << s.traded_kwh.n << ','
        << s.avg_price.n << ',' << detail::shortest(s.avg_price.mean) << ',' << detail::shortest(s.avg_price.stddev)
        << ',' << detail::shortest(s.traded_kwh.mean) << ',' << detail::shortest(s.traded_kwh.stddev) << ','
        << detail::shortest(s.savings.mean) << ',' << detail::shortest(s.savings.stddev) << ','
        << detail::shortest(s.profit.mean) << ',' << detail::shortest(s.profit.stddev) << '\n';
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    out << "scenario,mechanism,seed,hour,q_t,avg_price,avg_seller_price,fills\n";
    for (const auto& r : reports)
        for (const auto& run : r.runs)
            for (const auto& h : run.hours)
                out << scenario_number(r.scenario) << ',' << to_string(r.mechanism) << ',' << run.seed << ','
                    << h.hour() << ',' << format_kwh(h.traded) << ',' << opt(h.avg_price()) << ','
                    << opt(h.avg_seller_price()) << ',' << h.fills << '\n';
}

void write_settlement_csv(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    out << "scenario,mechanism,seed,hour,savings,profit,prosumer_grid_cost,buyer_paid,seller_received\n";
    for (const auto& r : reports)
        for (const auto& run : r.runs) {
            for (const auto& h : run.hours) settlement_row(out, r, run.seed, std::to_string(h.hour()), h);
            settlement_row(out, r, run.seed, "total", run.totals);
        }
}

void write_summary_csv(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    out << "scenario,mechanism,hour,seeds,priced_seeds,avg_price_mean,avg_price_std,q_t_mean,q_t_std,"
           "savings_mean,savings_std,profit_mean,profit_std\n";
    for (const auto& r : reports) {
        for (const auto& h : r.hourly) summary_row(out, r, std::to_string(h.start_slot / 60), h);
        summary_row(out, r, "total", r.total);
    }
}

void write_trades_csv(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    out << "scenario,mechanism,seed,period,timestamp,buy_id,sell_id,price,quantity\n";
    for (const auto& r : reports) {
        if (r.mechanism != Mechanism::p2p) continue;
        for (const auto& run : r.runs)
            for (const auto& o : run.outcomes) {
                const std::string prefix = std::to_string(scenario_number(r.scenario)) + "," +
                                           std::string(to_string(r.mechanism)) + "," + std::to_string(run.seed) + ",";
                for (const auto& t : o.trades) {
                    out << prefix;
                    write_trade_log_csv(out, o.start_slot / 60, std::span<const Trade>(&t, 1), false);
                }
            }
    }
}

void write_clearing_runs_csv(std::ostream& out, const std::vector<MetricsReport>& reports)
{
    out << "scenario,seed,period,mechanism,trader,role,quantity,payment,mcp\n";
    for (const auto& r : reports) {
        if (r.mechanism == Mechanism::p2p) continue;
        for (const auto& run : r.runs)
            for (const auto& o : run.outcomes) {
                if (!o.orders || !o.clearing) continue;
                std::ostringstream rows;
                write_clearing_csv(rows, o.start_slot / 60, to_string(r.mechanism), *o.orders, *o.clearing, false);
                std::istringstream in(rows.str());
                std::string line;
                while (std::getline(in, line))
                    out << scenario_number(r.scenario) << ',' << run.seed << ',' << line << '\n';
            }
    }
}

std::string series_file_name(const MetricsReport& r, Series s)
{
    return std::string(s == Series::avg_price ? "avg_price" : "energy_traded") + "_s" +
           std::to_string(scenario_number(r.scenario)) + "_" + std::string(to_string(r.mechanism)) + ".dat";
}

void write_series_dat(std::ostream& out, const MetricsReport& r, Series s)
{
    out << "# scenario " << scenario_number(r.scenario) << ", mechanism " << to_string(r.mechanism) << ", "
        << (s == Series::avg_price ? "average transaction price ($/kWh)" : "energy traded Q_T (kWh)") << '\n'
        << "# hour mean std n\n";
    for (const auto& h : r.hourly) {
        const Stat& st = s == Series::avg_price ? h.avg_price : h.traded_kwh;
        out << h.start_slot / 60 << ' ' << detail::shortest(st.mean) << ' ' << detail::shortest(st.stddev) << ' '
            << st.n << '\n';
    }
}

void write_netload_csv(std::ostream& out, const HouseholdProfile& h, const NetLoadProfile& n)
{
    out << "slot,demand,pv,charge,discharge,soc,x_plus,x_minus\n";
    for (std::size_t k = 0; k < n.x_plus.size(); ++k) {
        out << k << ',' << detail::shortest(h.demand[k]) << ',' << detail::shortest(h.pv[k]) << ','
            << detail::shortest(n.charge[k]) << ',' << detail::shortest(n.discharge[k]) << ','
            << detail::shortest(n.soc[k]) << ',' << detail::shortest(n.x_plus[k]) << ','
            << detail::shortest(n.x_minus[k]) << '\n';
    }
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::out_of_range("csv: no column '" + std::string(name) + "'");
}

CsvTable read_csv_table(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
    for (auto c : detail::split(detail::trim(line), ',')) t.header.emplace_back(c);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> row;
        for (auto c : detail::split(detail::trim(line), ',')) row.emplace_back(c);
        if (row.size() != t.header.size())
            throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(t.header.size()) + " columns, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace lemsim
