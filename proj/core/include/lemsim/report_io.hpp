#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lemsim/sim.hpp"

namespace lemsim {

// Run-level output files. Every file starts with a header row; money,
// prices and energy use the exact fixed-point renderings from units.hpp.

/// metrics.csv: scenario,mechanism,seed,hour,q_t,avg_price,avg_seller_price,fills
void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// settlement.csv: per-hour and "total" rows of savings and profit.
void write_settlement_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// summary.csv: per-hour and total mean/std across seeds.
void write_summary_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// trades.csv: scenario,mechanism,seed followed by the order-book trade log columns (p2p runs).
void write_trades_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// clearing.csv: scenario,seed followed by the clearing result columns (centralized and vcg runs).
void write_clearing_runs_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

enum class Series { avg_price, traded };

/// gnuplot-ready "hour mean std n" rows for one report.
void write_series_dat(std::ostream& out, const MetricsReport& report, Series series);
std::string series_file_name(const MetricsReport& report, Series series);

/// slot,demand,pv,charge,discharge,soc,x_plus,x_minus
void write_netload_csv(std::ostream& out, const HouseholdProfile& household, const NetLoadProfile& netload);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws std::out_of_range for an unknown column.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Plain comma-separated reader (no quoting), used for parse-back checks.
CsvTable read_csv_table(std::istream& in);

}  // namespace lemsim
