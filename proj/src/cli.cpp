#include "riskbench/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "json_format.hpp"
#include "riskbench/backtest.hpp"
#include "riskbench/calibration.hpp"
#include "riskbench/data_io.hpp"
#include "riskbench/error.hpp"
#include "riskbench/estimators.hpp"

namespace riskbench::cli {

namespace {

using calibration::CalibrationTable;
using estimators::Method;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::configuration: return usage;
        case ErrorKind::data:
        case ErrorKind::ingestion:
        case ErrorKind::io:
        case ErrorKind::size: return data_error;
        default: return numeric_error;
    }
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fixed(const std::optional<double>& v, int digits = 6) { return v ? fixed(*v, digits) : "-"; }

std::string shortg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

// Shared option state; each subcommand only reads the fields it registers.
struct Options {
    // calibrate
    std::size_t n = 0;
    std::size_t samples = calibration::kDefaultCalibrationSamples;
    double tol = calibration::kDefaultCalibrationTolerance;

    // common
    double alpha = 0.0;
    std::uint64_t seed = 42;
    std::string table_path;
    std::string format = "table";
    std::string out_path;

    // input
    std::string input;
    std::string column;
    std::string scale;
    bool simulate = false;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t length = 0;

    // estimation
    std::string methods;
    std::string measure = "var";
    double gpd_q = estimators::kDefaultGpdThresholdQuantile;
    std::optional<double> gpd_u;
    std::string kernel = "gaussian";
    std::optional<double> bandwidth;
    std::optional<std::size_t> auto_calibrate;
    std::size_t window = 50;
    std::string reference = "u";
    std::size_t reps = 0;
    unsigned threads = 0;
};

std::string table_path_or_env(const Options& o) {
    if (!o.table_path.empty()) return o.table_path;
    if (const char* env = std::getenv("RISKBENCH_TABLE"); env && *env) return env;
    return {};
}

CalibrationTable load_table(const Options& o) {
    const auto path = table_path_or_env(o);
    if (path.empty()) return {};
    if (!fs::exists(path)) fail(ErrorKind::io, "calibration table not found: " + path);
    return CalibrationTable::load(path);
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
    if (o.out_path.empty()) {
        out << text;
    } else {
        data_io::write_text(o.out_path, text);
    }
}

data_io::ReturnSeries input_series(const Options& o) {
    if (o.simulate) {
        if (o.length == 0) fail(ErrorKind::configuration, "--simulate requires --length");
        return data_io::simulate_series({{o.mu, o.sigma}, o.length, o.seed});
    }
    if (o.input.empty()) fail(ErrorKind::configuration, "one of --input or --simulate is required");
    if (o.scale.empty()) fail(ErrorKind::configuration, "--scale {decimal,percent} is required with --input");
    return data_io::load_returns_csv(o.input, o.column, data_io::parse_scale(o.scale));
}

estimators::Kernel parse_kernel(const std::string& tag) {
    if (tag == "gaussian") return estimators::Kernel::gaussian;
    if (tag == "epanechnikov") return estimators::Kernel::epanechnikov;
    fail(ErrorKind::configuration, "unknown kernel '" + tag + "'; valid: gaussian, epanechnikov");
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const Options& o, std::ostream& out) {
    const auto entry = calibration::solve_unbiased_es_constant(o.n, estimators::RiskLevel(o.alpha), o.samples, o.seed, o.tol);
    const auto path = table_path_or_env(o);
    if (!path.empty()) {
        CalibrationTable table;
        if (fs::exists(path)) table = CalibrationTable::load(path);
        table.insert(entry);
        table.save(path);
    }
    if (o.format == "json") {
        nlohmann::ordered_json j;
        j["n"] = entry.n;
        j["alpha"] = entry.alpha;
        j["b_n"] = entry.b_n;
        j["a_n"] = entry.a_n;
        j["mc_samples"] = entry.mc_samples;
        j["seed"] = entry.seed;
        j["residual"] = entry.residual;
        out << detail::dump_json(j) << "\n";
    } else if (o.format == "csv") {
        out << "n,alpha,b_n,a_n,mc_samples,seed,residual\n"
            << entry.n << "," << detail::format_double(entry.alpha) << "," << detail::format_double(entry.b_n) << ","
            << detail::format_double(entry.a_n) << "," << entry.mc_samples << "," << entry.seed << ","
            << detail::format_double(entry.residual) << "\n";
    } else {
        out << "n        " << entry.n << "\n"
            << "alpha    " << shortg(entry.alpha) << "\n"
            << "b_n      " << fixed(entry.b_n, 6) << "\n"
            << "a_n      " << fixed(entry.a_n, 5) << "\n"
            << "samples  " << entry.mc_samples << "\n"
            << "seed     " << entry.seed << "\n"
            << "residual " << detail::format_double(entry.residual) << "\n";
        if (!path.empty()) out << "table    " << path << "\n";
    }
    return ok;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const auto series = input_series(o);
    series.validate();
    const auto methods = estimators::parse_method_list(o.methods);
    const auto measure = estimators::parse_measure(o.measure);
    const estimators::RiskLevel alpha(o.alpha);

    auto table = load_table(o);
    if (o.auto_calibrate && measure == estimators::Measure::es && !table.find(series.values.size(), o.alpha)) {
        for (Method m : methods) {
            if (m != Method::gaussian_unbiased) continue;
            table.insert(calibration::solve_unbiased_es_constant(series.values.size(), alpha, *o.auto_calibrate, 42));
            break;
        }
    }

    estimators::EstimatorOptions opts;
    opts.gpd_threshold_quantile = o.gpd_q;
    opts.gpd_threshold = o.gpd_u;
    opts.kde_kernel = parse_kernel(o.kernel);
    opts.kde_bandwidth = o.bandwidth;
    opts.table = table.empty() ? nullptr : &table;

    std::vector<estimators::RiskEstimate> results;
    for (Method m : methods) results.push_back(estimators::estimate(m, measure, series.values, alpha, opts));

    std::string text;
    if (o.format == "json") {
        nlohmann::ordered_json doc;
        doc["series"] = series.name;
        doc["n"] = series.values.size();
        auto list = nlohmann::ordered_json::array();
        for (const auto& r : results) {
            nlohmann::ordered_json j;
            j["method"] = std::string(estimators::to_string(r.method));
            j["measure"] = std::string(estimators::to_string(r.measure));
            j["alpha"] = r.alpha;
            j["n"] = r.n;
            j["capital"] = r.capital;
            list.push_back(std::move(j));
        }
        doc["estimates"] = std::move(list);
        text = detail::dump_json(doc) + "\n";
    } else if (o.format == "csv" || o.format == "long") {
        text = "method,measure,alpha,n,capital\n";
        for (const auto& r : results) {
            text += std::string(estimators::to_string(r.method)) + "," + std::string(estimators::to_string(r.measure)) +
                    "," + detail::format_double(r.alpha) + "," + std::to_string(r.n) + "," +
                    detail::format_double(r.capital) + "\n";
        }
    } else {
        text = pad("method", 20) + pad("measure", 9) + pad("alpha", 8) + pad("n", 8) + "capital\n";
        for (const auto& r : results) {
            text += pad(std::string(estimators::to_string(r.method)), 20) + pad(std::string(estimators::to_string(r.measure)), 9) +
                    pad(fixed(r.alpha, 4), 8) + pad(std::to_string(r.n), 8) + fixed(r.capital, 8) + "\n";
        }
    }
    emit(text, o, out);
    return ok;
}

backtest::BacktestConfig make_config(const Options& o) {
    backtest::BacktestConfig c;
    c.window = o.window;
    c.alpha = o.alpha;
    c.methods = estimators::parse_method_list(o.methods);
    c.measure = backtest::parse_measure_selection(o.measure);
    c.gpd_threshold_quantile = o.gpd_q;
    c.reference = estimators::parse_method(o.reference);
    c.auto_calibrate_samples = o.auto_calibrate;
    c.validate();
    return c;
}

std::string backtest_table(const backtest::BacktestReport& r) {
    std::string t = "series " + r.series_name + "  length " + std::to_string(r.series_length) + "  window " +
                    std::to_string(r.config.window) + "  alpha " + shortg(r.config.alpha) +
                    "  pairs " + std::to_string(r.pairs) + "\n";
    t += pad("method", 20) + pad("ER", 10) + pad("exc/pts", 13) + pad("bias", 11) + pad("var_score", 11) +
         pad("es_bias", 11) + pad("Z", 10) + "joint_score\n";
    for (const auto& m : r.methods) {
        t += pad(std::string(estimators::to_string(m.method)), 20);
        if (m.failed) {
            t += "failed: " + m.failure_reason + "\n";
            continue;
        }
        t += pad(fixed(m.exceedance_rate, 4), 10) +
             pad(std::to_string(m.exceedance_count) + "/" + std::to_string(m.evaluated_points), 13) +
             pad(fixed(m.bias_statistic), 11) + pad(fixed(m.var_mean_score), 11) + pad(fixed(m.es_bias_statistic), 11) +
             pad(fixed(m.es_z_statistic, 4), 10) + fixed(m.joint_mean_score) + "\n";
    }
    for (const auto& m : r.methods) {
        for (const auto& [stat, reason] : m.absent) {
            t += "  note: " + std::string(estimators::to_string(m.method)) + " " + stat + " absent: " + reason + "\n";
        }
    }
    return t;
}

int cmd_backtest(const Options& o, std::ostream& out) {
    const auto series = input_series(o);
    series.validate();
    const auto config = make_config(o);
    auto table = load_table(o);
    backtest::ensure_calibration(config, table);
    const auto report = backtest::rolling_backtest(series.values, config, table, series.name);
    const auto text = o.format == "table" ? backtest_table(report)
                                          : data_io::render(report, data_io::parse_report_format(o.format));
    emit(text, o, out);
    return ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto series = data_io::simulate_series({{o.mu, o.sigma}, o.length, o.seed});
    std::ostringstream os;
    data_io::write_series_csv(series, os);
    emit(os.str(), o, out);
    return ok;
}

std::string replication_table(const backtest::ReplicationSummary& s) {
    std::string t = "replications " + std::to_string(s.replications) + "  length " + std::to_string(s.series_length) +
                    "  window " + std::to_string(s.config.window) + "  alpha " + shortg(s.config.alpha) +
                    "  reference " + std::string(estimators::to_string(s.config.reference)) + "\n";
    t += pad("method", 20) + pad("ER mean", 10) + pad("ER sd", 10) + pad("RD", 10) + pad("OR", 9) + pad("Z mean", 10) +
         pad("Z OR", 9) + pad("score", 11) + "joint\n";
    for (const auto& m : s.methods) {
        t += pad(std::string(estimators::to_string(m.method)), 20) + pad(fixed(m.er_mean, 5), 10) +
             pad(fixed(m.er_sd, 5), 10) + pad(fixed(m.rd_mean, 4), 10) + pad(fixed(m.or_rate, 4), 9) +
             pad(fixed(m.z_mean, 4), 10) + pad(fixed(m.z_or_rate, 4), 9) + pad(fixed(m.var_score_mean), 11) +
             fixed(m.joint_score_mean) + "\n";
    }
    return t;
}

int cmd_replicate(const Options& o, std::ostream& out) {
    const auto config = make_config(o);
    auto table = load_table(o);
    backtest::ensure_calibration(config, table);
    const auto summary =
        backtest::replication_study(config, {o.mu, o.sigma}, o.length, o.reps, o.seed, table, o.threads);
    const auto text = o.format == "table" ? replication_table(summary)
                                          : data_io::render(summary, data_io::parse_report_format(o.format));
    emit(text, o, out);
    return ok;
}

const std::vector<std::string> kFormats{"table", "json", "csv", "long"};

void add_alpha(CLI::App* sub, Options& o) {
    sub->add_option("--alpha", o.alpha, "Tail level in (0,1)")->required()->check(CLI::Range(0.0, 1.0));
}

void add_table(CLI::App* sub, Options& o) {
    sub->add_option("--table", o.table_path, "Calibration table JSON (default: $RISKBENCH_TABLE)");
}

void add_auto_calibrate(CLI::App* sub, Options& o) {
    // A bare --auto-calibrate uses 10^6 draws.
    sub->add_option("--auto-calibrate", o.auto_calibrate,
                    "Calibrate missing unbiased-ES constants with this many MC draws")
        ->expected(0, 1)
        ->default_str("1000000");
}

void add_input(CLI::App* sub, Options& o, bool allow_simulate) {
    auto* input = sub->add_option("--input", o.input, "Returns CSV");
    sub->add_option("--column", o.column, "Value column (default: first value column)");
    sub->add_option("--scale", o.scale, "Units of the input values")->check(CLI::IsMember({"decimal", "percent"}));
    if (allow_simulate) {
        auto* sim = sub->add_flag("--simulate", o.simulate, "Use a simulated Gaussian series instead of --input");
        sim->excludes(input);
        sub->add_option("--mu", o.mu, "Simulation mean")->capture_default_str();
        sub->add_option("--sigma", o.sigma, "Simulation standard deviation")->capture_default_str();
        sub->add_option("--length", o.length, "Simulation length");
        sub->add_option("--seed", o.seed, "Simulation seed")->capture_default_str();
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"riskbench: VaR/ES estimation, calibration and backtesting", "riskbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "riskbench 1.0.0");

    auto* calibrate = app.add_subcommand("calibrate", "Solve for the unbiased-ES constant a_n");
    calibrate->add_option("--n", o.n, "Window length")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    add_alpha(calibrate, o);
    calibrate->add_option("--samples", o.samples, "Monte-Carlo draws")->capture_default_str();
    calibrate->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    calibrate->add_option("--tol", o.tol, "Bisection tolerance on the ES residual")->capture_default_str();
    add_table(calibrate, o);
    calibrate->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}))->capture_default_str();

    auto* estimate = app.add_subcommand("estimate", "Estimate VaR or ES capital for one series");
    add_input(estimate, o, false);
    estimate->add_option("--method", o.methods, "Method tags, comma separated: " + estimators::method_tag_help())->required();
    estimate->add_option("--measure", o.measure, "Risk measure")->check(CLI::IsMember({"var", "es"}))->capture_default_str();
    add_alpha(estimate, o);
    add_table(estimate, o);
    add_auto_calibrate(estimate, o);
    estimate->add_option("--gpd-q", o.gpd_q, "GPD threshold as a return quantile")->capture_default_str();
    estimate->add_option("--gpd-u", o.gpd_u, "Explicit GPD threshold (overrides --gpd-q)");
    estimate->add_option("--kernel", o.kernel, "KDE kernel")->check(CLI::IsMember({"gaussian", "epanechnikov"}))->capture_default_str();
    estimate->add_option("--bandwidth", o.bandwidth, "KDE bandwidth (default: 1.06 sd n^-1/5)");
    estimate->add_option("--format", o.format, "Output format")->check(CLI::IsMember(kFormats))->capture_default_str();
    estimate->add_option("--out", o.out_path, "Write output here instead of stdout");

    auto* bt = app.add_subcommand("backtest", "Rolling disjoint-window backtest");
    add_input(bt, o, true);
    bt->add_option("--window", o.window, "Window length")->capture_default_str();
    add_alpha(bt, o);
    o.methods = "emp,norm,cf,u";
    bt->add_option("--methods", o.methods, "Method tags, comma separated: " + estimators::method_tag_help())->capture_default_str();
    bt->add_option("--measure", o.measure, "Measures to backtest")->check(CLI::IsMember({"var", "es", "both"}))->capture_default_str();
    bt->add_option("--gpd-q", o.gpd_q, "GPD threshold as a return quantile")->capture_default_str();
    add_table(bt, o);
    add_auto_calibrate(bt, o);
    bt->add_option("--out", o.out_path, "Write output here instead of stdout");
    bt->add_option("--format", o.format, "Output format")->check(CLI::IsMember(kFormats))->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "Write a simulated Gaussian return series as CSV");
    sim->add_option("--mu", o.mu, "Mean")->capture_default_str();
    sim->add_option("--sigma", o.sigma, "Standard deviation")->capture_default_str();
    sim->add_option("--length", o.length, "Number of observations")->required();
    sim->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    sim->add_option("--out", o.out_path, "Write output here instead of stdout");

    auto* rep = app.add_subcommand("replicate", "Replicated backtests on simulated Gaussian series");
    rep->add_option("--reps", o.reps, "Number of replications")->required();
    rep->add_option("--length", o.length, "Series length")->required();
    rep->add_option("--window", o.window, "Window length")->capture_default_str();
    add_alpha(rep, o);
    rep->add_option("--mu", o.mu, "Generator mean")->capture_default_str();
    rep->add_option("--sigma", o.sigma, "Generator standard deviation")->capture_default_str();
    rep->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    rep->add_option("--methods", o.methods, "Method tags, comma separated: " + estimators::method_tag_help())->capture_default_str();
    rep->add_option("--measure", o.measure, "Measures to backtest")->check(CLI::IsMember({"var", "es", "both"}))->capture_default_str();
    rep->add_option("--reference", o.reference, "Reference method for RD/OR")->capture_default_str();
    rep->add_option("--gpd-q", o.gpd_q, "GPD threshold as a return quantile")->capture_default_str();
    rep->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    add_table(rep, o);
    add_auto_calibrate(rep, o);
    rep->add_option("--out", o.out_path, "Write output here instead of stdout");
    rep->add_option("--format", o.format, "Output format")->check(CLI::IsMember(kFormats))->capture_default_str();

    std::vector<const char*> argv{"riskbench"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    }

    try {
        if (*calibrate) return cmd_calibrate(o, out);
        if (*estimate) return cmd_estimate(o, out);
        if (*bt) return cmd_backtest(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*rep) return cmd_replicate(o, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return numeric_error;
    }
    return usage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace riskbench::cli
