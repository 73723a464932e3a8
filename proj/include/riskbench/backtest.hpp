#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskbench/calibration.hpp"
#include "riskbench/estimators.hpp"

namespace riskbench::backtest {

using estimators::Method;
using estimators::RiskLevel;

enum class MeasureSelection { var, es, both };

std::string_view to_string(MeasureSelection m);
MeasureSelection parse_measure_selection(std::string_view tag);

struct BacktestConfig {
    std::size_t window = 50;
    double alpha = 0.05;
    std::vector<Method> methods;
    MeasureSelection measure = MeasureSelection::var;
    double gpd_threshold_quantile = estimators::kDefaultGpdThresholdQuantile;
    /// Reference estimator for RD/OR in replication studies.
    Method reference = Method::gaussian_unbiased;
    /// When set, missing unbiased-ES constants are computed with this many MC draws.
    std::optional<std::size_t> auto_calibrate_samples;
    std::uint64_t calibration_seed = 42;

    void validate() const;
};

/// Consecutive, disjoint windows of equal length; the trailing remainder is dropped.
struct WindowPairing {
    std::size_t window = 0;
    std::size_t count = 0;    // full windows
    std::size_t dropped = 0;  // trailing observations not used

    std::size_t pairs() const noexcept { return count == 0 ? 0 : count - 1; }
    std::span<const double> at(std::span<const double> values, std::size_t k) const {
        return values.subspan(k * window, window);
    }
};

WindowPairing split_windows(std::span<const double> series, std::size_t w);

struct ExceedanceCount {
    std::size_t count = 0;
    std::size_t points = 0;
    double rate() const { return points == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(points); }
};

/// capitals[k] is evaluated against evaluation_windows[k]; exceedance is x + capital < 0.
ExceedanceCount count_exceedances(std::span<const double> capitals,
                                  std::span<const std::span<const double>> evaluation_windows);
double exceedance_rate(std::span<const double> capitals, std::span<const std::span<const double>> evaluation_windows);

/// Empirical VaR (type-7) or ES (tail average below the empirical VaR) of x_i + capital_i.
double bias_statistic(std::span<const double> samples, std::span<const double> capitals, RiskLevel alpha,
                      estimators::Measure measure);

/// Acerbi-Szekely "Test 2" statistic; empty when any ES capital is not strictly positive.
std::optional<double> acerbi_z(std::span<const double> var_capitals, std::span<const double> es_capitals,
                               std::span<const std::span<const double>> evaluation_windows, RiskLevel alpha);

/// S(x, y) = (1{x >= y} - alpha)(x - y) with forecast x = -capital.
double var_score(double forecast_quantile, double outcome, RiskLevel alpha);
/// Joint VaR/ES score with logistic weight; x1 = -VaR capital, x2 = -ES capital.
double joint_var_es_score(double x1, double x2, double outcome, RiskLevel alpha);

enum class ScoreKind { var, joint };

/// Average over windows of the per-window average score. es_forecasts is ignored for ScoreKind::var.
double mean_score(std::span<const double> var_forecasts, std::span<const double> es_forecasts,
                  std::span<const std::span<const double>> evaluation_windows, ScoreKind kind, RiskLevel alpha);

struct MethodReport {
    Method method = Method::empirical;
    bool failed = false;  // VaR could not be produced on some window
    std::string failure_reason;

    std::size_t exceedance_count = 0;
    std::size_t evaluated_points = 0;
    double exceedance_rate = 0.0;
    std::optional<double> bias_statistic;
    std::optional<double> var_mean_score;

    std::optional<double> es_bias_statistic;
    std::optional<double> es_z_statistic;
    std::optional<double> joint_mean_score;

    /// (statistic name, reason) for every statistic reported as absent.
    std::vector<std::pair<std::string, std::string>> absent;
};

struct BacktestReport {
    std::string series_name;
    std::size_t series_length = 0;
    BacktestConfig config;
    std::size_t windows = 0;
    std::size_t pairs = 0;
    std::vector<MethodReport> methods;

    const MethodReport* find(Method m) const;
};

/// Makes sure `table` holds the unbiased-ES constant for (window, alpha) when the
/// config needs it, calibrating on demand if allowed.
void ensure_calibration(const BacktestConfig& config, calibration::CalibrationTable& table);

BacktestReport rolling_backtest(std::span<const double> series, const BacktestConfig& config,
                                const calibration::CalibrationTable& table, std::string series_name = "series");

struct MethodSummary {
    Method method = Method::empirical;
    std::size_t replications = 0;  // replications where this method produced VaR
    std::size_t failures = 0;
    double er_mean = 0.0;
    double er_sd = 0.0;
    // Relative to the reference; absent for the reference itself.
    std::optional<double> rd_mean;
    std::optional<double> rd_sd;
    std::optional<double> or_rate;
    std::size_t rd_undefined = 0;  // replications with reference ER = 0

    std::optional<double> var_score_mean;
    /// Share of replications where the reference's VaR score is <= this method's.
    std::optional<double> var_score_ref_not_worse;

    std::optional<double> z_mean;
    std::optional<double> z_sd;
    /// Share of replications where |Z(method)| > |Z(reference)|.
    std::optional<double> z_or_rate;
    std::optional<double> joint_score_mean;
    std::optional<double> joint_score_ref_not_worse;
};

struct ReplicationSummary {
    BacktestConfig config;
    estimators::GaussianParams generator;
    std::size_t series_length = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;

    const MethodSummary* find(Method m) const;
};

/// Simulates `replications` Gaussian series (stream id = replication index), backtests
/// each and aggregates ER / RD / OR and the score and Z statistics.
ReplicationSummary replication_study(const BacktestConfig& config, const estimators::GaussianParams& generator,
                                     std::size_t series_length, std::size_t replications, std::uint64_t seed,
                                     const calibration::CalibrationTable& table, unsigned threads = 0);

}  // namespace riskbench::backtest
