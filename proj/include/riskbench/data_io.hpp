#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskbench/backtest.hpp"
#include "riskbench/estimators.hpp"

namespace riskbench::data_io {

struct ReturnSeries {
    std::string name;
    std::vector<std::chrono::year_month_day> dates;  // empty, or one per value
    std::vector<double> values;                      // decimal units

    void validate() const;
};

enum class Scale { decimal, percent };
Scale parse_scale(std::string_view tag);

struct SimulationSpec {
    estimators::GaussianParams params;
    std::size_t length = 0;
    std::uint64_t seed = 0;
};

/// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a header row plus numeric rows. The first column is read as dates when its
/// header is empty or "date", or when its first cell parses as YYYYMMDD / YYYY-MM-DD.
/// An empty column selector picks the first value column.
ReturnSeries parse_returns_csv(std::istream& in, const std::string& column, Scale scale,
                               const std::string& source = "<stream>");
ReturnSeries load_returns_csv(const std::filesystem::path& path, const std::string& column, Scale scale);

void write_series_csv(const ReturnSeries& series, std::ostream& out);

estimators::GaussianParams fit_gaussian(const ReturnSeries& series);
ReturnSeries simulate_series(const SimulationSpec& spec);

enum class ReportFormat { json, csv, long_csv };
ReportFormat parse_report_format(std::string_view tag);

std::string backtest_report_json(const backtest::BacktestReport& report);
std::string backtest_report_csv(const backtest::BacktestReport& report);
std::string backtest_report_long_csv(const backtest::BacktestReport& report);
/// Restores the per-method statistics (and, for JSON, the header fields).
backtest::BacktestReport backtest_report_from_json(const std::string& text);
backtest::BacktestReport backtest_report_from_csv(const std::string& text);

std::string replication_summary_json(const backtest::ReplicationSummary& summary);
std::string replication_summary_csv(const backtest::ReplicationSummary& summary);
std::string replication_summary_long_csv(const backtest::ReplicationSummary& summary);
backtest::ReplicationSummary replication_summary_from_json(const std::string& text);
backtest::ReplicationSummary replication_summary_from_csv(const std::string& text);

std::string render(const backtest::BacktestReport& report, ReportFormat format);
std::string render(const backtest::ReplicationSummary& summary, ReportFormat format);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_report(const backtest::BacktestReport& report, const std::filesystem::path& path, ReportFormat format);
void write_report(const backtest::ReplicationSummary& summary, const std::filesystem::path& path,
                  ReportFormat format);

}  // namespace riskbench::data_io
