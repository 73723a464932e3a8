#include "riskbench/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "json_format.hpp"
#include "riskbench/error.hpp"
#include "riskbench/stats.hpp"

namespace riskbench::data_io {

using backtest::BacktestReport;
using backtest::MethodReport;
using backtest::MethodSummary;
using backtest::ReplicationSummary;
using detail::format_double;
using estimators::Method;
using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::optional<std::chrono::year_month_day> parse_date(const std::string& cell) {
    int y = 0;
    unsigned m = 0, d = 0;
    auto all_digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (cell.size() == 8 && all_digits(cell)) {
        y = std::stoi(cell.substr(0, 4));
        m = static_cast<unsigned>(std::stoi(cell.substr(4, 2)));
        d = static_cast<unsigned>(std::stoi(cell.substr(6, 2)));
    } else if (cell.size() == 10 && cell[4] == '-' && cell[7] == '-' && all_digits(cell.substr(0, 4)) &&
               all_digits(cell.substr(5, 2)) && all_digits(cell.substr(8, 2))) {
        y = std::stoi(cell.substr(0, 4));
        m = static_cast<unsigned>(std::stoi(cell.substr(5, 2)));
        d = static_cast<unsigned>(std::stoi(cell.substr(8, 2)));
    } else {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::string format_date(const std::chrono::year_month_day& ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

bool is_sentinel(double raw) { return raw == -99.99 || raw == -999.0; }

std::string row_list(const std::vector<std::size_t>& rows) {
    std::ostringstream os;
    const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) os << (i ? ", " : "") << rows[i];
    if (rows.size() > shown) os << ", ... (" << rows.size() << " rows total)";
    return os.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const nlohmann::json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

std::optional<double> opt_from_cell(const std::string& cell, const std::string& what) {
    if (cell.empty()) return std::nullopt;
    const auto v = parse_number(cell);
    if (!v) fail(ErrorKind::data, "unparseable number '" + cell + "' in " + what);
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Series ingestion

void ReturnSeries::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) fail(ErrorKind::data, name + ": non-finite value at index " + std::to_string(i));
    }
    if (!dates.empty()) {
        if (dates.size() != values.size()) fail(ErrorKind::data, name + ": dates and values differ in length");
        for (std::size_t i = 1; i < dates.size(); ++i) {
            if (!(dates[i - 1] < dates[i])) {
                fail(ErrorKind::data, name + ": dates not strictly increasing at index " + std::to_string(i));
            }
        }
    }
}

Scale parse_scale(std::string_view tag) {
    if (tag == "decimal") return Scale::decimal;
    if (tag == "percent") return Scale::percent;
    fail(ErrorKind::configuration, "unknown scale '" + std::string(tag) + "'; valid: decimal, percent");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

ReturnSeries parse_returns_csv(std::istream& in, const std::string& column, Scale scale, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) fail(ErrorKind::ingestion, source + ": no header row");

    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        rows.emplace_back(line_no, split_csv_line(line));
    }

    const std::string first_header = lower(header[0]);
    bool has_dates = first_header.empty() || first_header == "date";
    if (!has_dates && !rows.empty() && !rows.front().second.empty()) {
        has_dates = parse_date(rows.front().second[0]).has_value();
    }
    if (has_dates && header.size() < 2) fail(ErrorKind::ingestion, source + ": no value columns after the date column");

    std::size_t col = has_dates ? 1 : 0;
    if (!column.empty()) {
        const auto it = std::find(header.begin() + (has_dates ? 1 : 0), header.end(), column);
        if (it == header.end()) {
            std::string available;
            for (std::size_t i = has_dates ? 1 : 0; i < header.size(); ++i) {
                available += (available.empty() ? "" : ", ") + header[i];
            }
            fail(ErrorKind::ingestion, source + ": column '" + column + "' not found; available columns: " + available);
        }
        col = static_cast<std::size_t>(it - header.begin());
    }

    ReturnSeries series;
    series.name = column.empty() ? header[col] : column;
    std::vector<std::size_t> bad_cells, sentinels, bad_dates;
    for (const auto& [row_no, cells] : rows) {
        if (cells.size() <= col) {
            bad_cells.push_back(row_no);
            continue;
        }
        const auto value = parse_number(cells[col]);
        if (!value || !std::isfinite(*value)) {
            bad_cells.push_back(row_no);
            continue;
        }
        if (is_sentinel(*value)) {
            sentinels.push_back(row_no);
            continue;
        }
        if (has_dates) {
            const auto date = parse_date(cells[0]);
            if (!date) {
                bad_dates.push_back(row_no);
                continue;
            }
            series.dates.push_back(*date);
        }
        series.values.push_back(scale == Scale::percent ? *value / 100.0 : *value);
    }

    std::string problems;
    if (!bad_cells.empty()) problems += "\n  unparseable or missing cells on lines: " + row_list(bad_cells);
    if (!sentinels.empty()) problems += "\n  missing-value sentinels (-99.99/-999) on lines: " + row_list(sentinels);
    if (!bad_dates.empty()) problems += "\n  unparseable dates on lines: " + row_list(bad_dates);
    if (!problems.empty()) fail(ErrorKind::ingestion, source + ": rejected column '" + series.name + "'" + problems);

    for (std::size_t i = 1; i < series.dates.size(); ++i) {
        if (!(series.dates[i - 1] < series.dates[i])) {
            fail(ErrorKind::ingestion, source + ": dates are not strictly increasing (" + format_date(series.dates[i]) + ")");
        }
    }
    return series;
}

ReturnSeries load_returns_csv(const std::filesystem::path& path, const std::string& column, Scale scale) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ingestion, "cannot open input file: " + path.string());
    return parse_returns_csv(in, column, scale, path.string());
}

void write_series_csv(const ReturnSeries& series, std::ostream& out) {
    const bool dated = !series.dates.empty();
    if (dated) out << "date,";
    out << csv_escape(series.name) << "\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (dated) out << format_date(series.dates[i]) << ",";
        out << format_double(series.values[i]) << "\n";
    }
}

estimators::GaussianParams fit_gaussian(const ReturnSeries& series) {
    if (series.values.size() < 2) fail(ErrorKind::size, "fit_gaussian: need at least 2 observations");
    const auto m = stats::sample_moments(series.values);
    if (!(m.sd > 0.0)) fail(ErrorKind::data, "fit_gaussian: degenerate series with zero standard deviation");
    return {m.mean, m.sd};
}

ReturnSeries simulate_series(const SimulationSpec& spec) {
    if (spec.length < 1) fail(ErrorKind::size, "simulate_series: length must be at least 1");
    if (!(spec.params.sigma > 0.0)) fail(ErrorKind::domain, "simulate_series: sigma must be positive");
    stats::SeededRng rng(spec.seed, 0);
    ReturnSeries out;
    out.name = "sim_mu" + format_double(spec.params.mu) + "_sigma" + format_double(spec.params.sigma) + "_seed" +
               std::to_string(spec.seed);
    out.values = stats::draw_gaussian(rng, spec.length, spec.params.mu, spec.params.sigma);
    return out;
}

// ---------------------------------------------------------------------------
// Report serialization

ReportFormat parse_report_format(std::string_view tag) {
    if (tag == "json") return ReportFormat::json;
    if (tag == "csv") return ReportFormat::csv;
    if (tag == "long") return ReportFormat::long_csv;
    fail(ErrorKind::configuration, "unknown format '" + std::string(tag) + "'; valid: json, csv, long");
}

namespace {

struct OptField {
    const char* name;
    std::optional<double> MethodReport::*member;
};

constexpr OptField kReportOptFields[] = {
    {"bias_statistic", &MethodReport::bias_statistic},
    {"var_mean_score", &MethodReport::var_mean_score},
    {"es_bias_statistic", &MethodReport::es_bias_statistic},
    {"es_z_statistic", &MethodReport::es_z_statistic},
    {"joint_mean_score", &MethodReport::joint_mean_score},
};

struct SummaryField {
    const char* name;
    std::optional<double> MethodSummary::*member;
};

constexpr SummaryField kSummaryOptFields[] = {
    {"rd_mean", &MethodSummary::rd_mean},
    {"rd_sd", &MethodSummary::rd_sd},
    {"or_rate", &MethodSummary::or_rate},
    {"var_score_mean", &MethodSummary::var_score_mean},
    {"var_score_ref_not_worse", &MethodSummary::var_score_ref_not_worse},
    {"z_mean", &MethodSummary::z_mean},
    {"z_sd", &MethodSummary::z_sd},
    {"z_or_rate", &MethodSummary::z_or_rate},
    {"joint_score_mean", &MethodSummary::joint_score_mean},
    {"joint_score_ref_not_worse", &MethodSummary::joint_score_ref_not_worse},
};

json config_json(const backtest::BacktestConfig& c) {
    json j;
    j["window"] = c.window;
    j["alpha"] = c.alpha;
    j["measure"] = std::string(backtest::to_string(c.measure));
    auto methods = json::array();
    for (Method m : c.methods) methods.push_back(std::string(estimators::to_string(m)));
    j["methods"] = std::move(methods);
    j["gpd_threshold_quantile"] = c.gpd_threshold_quantile;
    j["reference"] = std::string(estimators::to_string(c.reference));
    return j;
}

backtest::BacktestConfig config_from_json(const nlohmann::json& j) {
    backtest::BacktestConfig c;
    c.window = j.at("window").get<std::size_t>();
    c.alpha = j.at("alpha").get<double>();
    c.measure = backtest::parse_measure_selection(j.at("measure").get<std::string>());
    for (const auto& m : j.at("methods")) c.methods.push_back(estimators::parse_method(m.get<std::string>()));
    c.gpd_threshold_quantile = j.at("gpd_threshold_quantile").get<double>();
    c.reference = estimators::parse_method(j.at("reference").get<std::string>());
    return c;
}

template <typename F>
auto guarded_parse(const char* what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, std::string(what) + ": " + e.what());
    }
}

const std::vector<std::string>& report_csv_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"method", "failed", "exceedance_rate", "exceedance_count", "evaluated_points"};
        for (const auto& f : kReportOptFields) c.emplace_back(f.name);
        c.emplace_back("failure_reason");
        return c;
    }();
    return cols;
}

const std::vector<std::string>& summary_csv_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"method", "replications", "failures", "er_mean", "er_sd", "rd_undefined"};
        for (const auto& f : kSummaryOptFields) c.emplace_back(f.name);
        return c;
    }();
    return cols;
}

std::string join_header(const std::vector<std::string>& cols) {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    return out + "\n";
}

std::vector<std::vector<std::string>> csv_body(const std::string& text, const std::vector<std::string>& expected,
                                               const char* what) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != expected) {
        fail(ErrorKind::data, std::string(what) + ": unexpected CSV header");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != expected.size()) fail(ErrorKind::data, std::string(what) + ": wrong number of CSV cells");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t parse_count(const std::string& cell, const char* what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        fail(ErrorKind::data, std::string(what) + ": bad integer '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string backtest_report_json(const BacktestReport& r) {
    json doc;
    doc["kind"] = "backtest_report";
    doc["version"] = 1;
    doc["series"] = json{{"name", r.series_name}, {"length", r.series_length}};
    doc["config"] = config_json(r.config);
    doc["windows"] = r.windows;
    doc["pairs"] = r.pairs;
    json methods = json::object();
    for (const auto& m : r.methods) {
        json j;
        j["failed"] = m.failed;
        if (m.failed) j["failure_reason"] = m.failure_reason;
        j["exceedance_rate"] = m.exceedance_rate;
        j["exceedance_count"] = m.exceedance_count;
        j["evaluated_points"] = m.evaluated_points;
        for (const auto& f : kReportOptFields) j[f.name] = opt_json(m.*f.member);
        json absent = json::object();
        for (const auto& [name, reason] : m.absent) absent[name] = reason;
        j["absent"] = std::move(absent);
        methods[std::string(estimators::to_string(m.method))] = std::move(j);
    }
    doc["methods"] = std::move(methods);
    return detail::dump_json(doc) + "\n";
}

BacktestReport backtest_report_from_json(const std::string& text) {
    return guarded_parse("backtest report", [&] {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("kind") != "backtest_report") fail(ErrorKind::data, "not a backtest report");
        BacktestReport r;
        r.series_name = doc.at("series").at("name").get<std::string>();
        r.series_length = doc.at("series").at("length").get<std::size_t>();
        r.config = config_from_json(doc.at("config"));
        r.windows = doc.at("windows").get<std::size_t>();
        r.pairs = doc.at("pairs").get<std::size_t>();
        // nlohmann::json sorts object keys; restore the configured method order.
        for (Method method : r.config.methods) {
            const auto key = std::string(estimators::to_string(method));
            if (!doc.at("methods").contains(key)) continue;
            const auto& j = doc.at("methods").at(key);
            MethodReport m;
            m.method = method;
            m.failed = j.at("failed").get<bool>();
            if (m.failed) m.failure_reason = j.at("failure_reason").get<std::string>();
            m.exceedance_rate = j.at("exceedance_rate").get<double>();
            m.exceedance_count = j.at("exceedance_count").get<std::size_t>();
            m.evaluated_points = j.at("evaluated_points").get<std::size_t>();
            for (const auto& f : kReportOptFields) m.*f.member = opt_from_json(j.at(f.name));
            for (const auto& [name, reason] : j.at("absent").items()) m.absent.emplace_back(name, reason.get<std::string>());
            r.methods.push_back(std::move(m));
        }
        return r;
    });
}

std::string backtest_report_csv(const BacktestReport& r) {
    std::string out = join_header(report_csv_columns());
    for (const auto& m : r.methods) {
        out += std::string(estimators::to_string(m.method)) + "," + (m.failed ? "1" : "0") + "," +
               format_double(m.exceedance_rate) + "," + std::to_string(m.exceedance_count) + "," +
               std::to_string(m.evaluated_points);
        for (const auto& f : kReportOptFields) out += "," + opt_cell(m.*f.member);
        out += "," + csv_escape(m.failure_reason) + "\n";
    }
    return out;
}

BacktestReport backtest_report_from_csv(const std::string& text) {
    BacktestReport r;
    for (const auto& cells : csv_body(text, report_csv_columns(), "backtest report CSV")) {
        MethodReport m;
        m.method = estimators::parse_method(cells[0]);
        m.failed = cells[1] == "1";
        m.exceedance_rate = opt_from_cell(cells[2], "exceedance_rate").value_or(0.0);
        m.exceedance_count = parse_count(cells[3], "exceedance_count");
        m.evaluated_points = parse_count(cells[4], "evaluated_points");
        std::size_t c = 5;
        for (const auto& f : kReportOptFields) m.*f.member = opt_from_cell(cells[c++], f.name);
        m.failure_reason = cells[c];
        r.config.methods.push_back(m.method);
        r.methods.push_back(std::move(m));
    }
    return r;
}

std::string backtest_report_long_csv(const BacktestReport& r) {
    std::string out = "method,statistic,value\n";
    for (const auto& m : r.methods) {
        const std::string name(estimators::to_string(m.method));
        if (m.failed) continue;
        out += name + ",exceedance_rate," + format_double(m.exceedance_rate) + "\n";
        out += name + ",exceedance_count," + std::to_string(m.exceedance_count) + "\n";
        for (const auto& f : kReportOptFields)
            if (const auto& v = m.*f.member) out += name + "," + f.name + "," + format_double(*v) + "\n";
    }
    return out;
}

std::string replication_summary_json(const ReplicationSummary& s) {
    json doc;
    doc["kind"] = "replication_summary";
    doc["version"] = 1;
    doc["config"] = config_json(s.config);
    doc["generator"] = json{{"mu", s.generator.mu}, {"sigma", s.generator.sigma}};
    doc["series_length"] = s.series_length;
    doc["replications"] = s.replications;
    doc["seed"] = s.seed;
    json methods = json::object();
    for (const auto& m : s.methods) {
        json j;
        j["replications"] = m.replications;
        j["failures"] = m.failures;
        j["er_mean"] = m.er_mean;
        j["er_sd"] = m.er_sd;
        j["rd_undefined"] = m.rd_undefined;
        for (const auto& f : kSummaryOptFields) j[f.name] = opt_json(m.*f.member);
        methods[std::string(estimators::to_string(m.method))] = std::move(j);
    }
    doc["methods"] = std::move(methods);
    return detail::dump_json(doc) + "\n";
}

ReplicationSummary replication_summary_from_json(const std::string& text) {
    return guarded_parse("replication summary", [&] {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("kind") != "replication_summary") fail(ErrorKind::data, "not a replication summary");
        ReplicationSummary s;
        s.config = config_from_json(doc.at("config"));
        s.generator.mu = doc.at("generator").at("mu").get<double>();
        s.generator.sigma = doc.at("generator").at("sigma").get<double>();
        s.series_length = doc.at("series_length").get<std::size_t>();
        s.replications = doc.at("replications").get<std::size_t>();
        s.seed = doc.at("seed").get<std::uint64_t>();
        for (Method method : s.config.methods) {
            const auto key = std::string(estimators::to_string(method));
            if (!doc.at("methods").contains(key)) continue;
            const auto& j = doc.at("methods").at(key);
            MethodSummary m;
            m.method = method;
            m.replications = j.at("replications").get<std::size_t>();
            m.failures = j.at("failures").get<std::size_t>();
            m.er_mean = j.at("er_mean").get<double>();
            m.er_sd = j.at("er_sd").get<double>();
            m.rd_undefined = j.at("rd_undefined").get<std::size_t>();
            for (const auto& f : kSummaryOptFields) m.*f.member = opt_from_json(j.at(f.name));
            s.methods.push_back(std::move(m));
        }
        return s;
    });
}

std::string replication_summary_csv(const ReplicationSummary& s) {
    std::string out = join_header(summary_csv_columns());
    for (const auto& m : s.methods) {
        out += std::string(estimators::to_string(m.method)) + "," + std::to_string(m.replications) + "," +
               std::to_string(m.failures) + "," + format_double(m.er_mean) + "," + format_double(m.er_sd) + "," +
               std::to_string(m.rd_undefined);
        for (const auto& f : kSummaryOptFields) out += "," + opt_cell(m.*f.member);
        out += "\n";
    }
    return out;
}

ReplicationSummary replication_summary_from_csv(const std::string& text) {
    ReplicationSummary s;
    for (const auto& cells : csv_body(text, summary_csv_columns(), "replication summary CSV")) {
        MethodSummary m;
        m.method = estimators::parse_method(cells[0]);
        m.replications = parse_count(cells[1], "replications");
        m.failures = parse_count(cells[2], "failures");
        m.er_mean = opt_from_cell(cells[3], "er_mean").value_or(0.0);
        m.er_sd = opt_from_cell(cells[4], "er_sd").value_or(0.0);
        m.rd_undefined = parse_count(cells[5], "rd_undefined");
        std::size_t c = 6;
        for (const auto& f : kSummaryOptFields) m.*f.member = opt_from_cell(cells[c++], f.name);
        s.config.methods.push_back(m.method);
        s.methods.push_back(std::move(m));
    }
    return s;
}

std::string replication_summary_long_csv(const ReplicationSummary& s) {
    std::string out = "method,statistic,value\n";
    for (const auto& m : s.methods) {
        const std::string name(estimators::to_string(m.method));
        out += name + ",er_mean," + format_double(m.er_mean) + "\n";
        out += name + ",er_sd," + format_double(m.er_sd) + "\n";
        for (const auto& f : kSummaryOptFields)
            if (const auto& v = m.*f.member) out += name + "," + f.name + "," + format_double(*v) + "\n";
    }
    return out;
}

std::string render(const BacktestReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: return backtest_report_json(report);
        case ReportFormat::csv: return backtest_report_csv(report);
        case ReportFormat::long_csv: return backtest_report_long_csv(report);
    }
    return {};
}

std::string render(const ReplicationSummary& summary, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: return replication_summary_json(summary);
        case ReportFormat::csv: return replication_summary_csv(summary);
        case ReportFormat::long_csv: return replication_summary_long_csv(summary);
    }
    return {};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

void write_report(const BacktestReport& report, const std::filesystem::path& path, ReportFormat format) {
    write_text(path, render(report, format));
}

void write_report(const ReplicationSummary& summary, const std::filesystem::path& path, ReportFormat format) {
    write_text(path, render(summary, format));
}

}  // namespace riskbench::data_io
