#include "riskbench/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "riskbench/error.hpp"
#include "riskbench/stats.hpp"

namespace riskbench::backtest {

using estimators::Measure;

std::string_view to_string(MeasureSelection m) {
    switch (m) {
        case MeasureSelection::var: return "var";
        case MeasureSelection::es: return "es";
        case MeasureSelection::both: return "both";
    }
    return "var";
}

MeasureSelection parse_measure_selection(std::string_view tag) {
    if (tag == "var") return MeasureSelection::var;
    if (tag == "es") return MeasureSelection::es;
    if (tag == "both") return MeasureSelection::both;
    fail(ErrorKind::configuration, "unknown measure '" + std::string(tag) + "'; valid: var, es, both");
}

void BacktestConfig::validate() const {
    if (window < 2) fail(ErrorKind::configuration, "window must be at least 2");
    RiskLevel{alpha};
    if (!(gpd_threshold_quantile > 0.0 && gpd_threshold_quantile < 1.0)) {
        fail(ErrorKind::configuration, "GPD threshold quantile must lie in (0,1)");
    }
    if (methods.empty()) fail(ErrorKind::configuration, "no methods selected");
}

WindowPairing split_windows(std::span<const double> series, std::size_t w) {
    if (w == 0) fail(ErrorKind::size, "split_windows: window length must be positive");
    if (series.size() < 2 * w) {
        fail(ErrorKind::size, "split_windows: series of length " + std::to_string(series.size()) +
                                  " cannot form an estimate/evaluate pair with window " + std::to_string(w));
    }
    WindowPairing out;
    out.window = w;
    out.count = series.size() / w;
    out.dropped = series.size() - out.count * w;
    return out;
}

ExceedanceCount count_exceedances(std::span<const double> capitals,
                                  std::span<const std::span<const double>> evaluation_windows) {
    if (capitals.size() != evaluation_windows.size()) {
        fail(ErrorKind::size, "count_exceedances: capitals and evaluation windows are not aligned");
    }
    ExceedanceCount out;
    for (std::size_t k = 0; k < capitals.size(); ++k) {
        for (double x : evaluation_windows[k]) {
            if (x + capitals[k] < 0.0) ++out.count;
            ++out.points;
        }
    }
    return out;
}

double exceedance_rate(std::span<const double> capitals, std::span<const std::span<const double>> evaluation_windows) {
    return count_exceedances(capitals, evaluation_windows).rate();
}

double bias_statistic(std::span<const double> samples, std::span<const double> capitals, RiskLevel alpha,
                      Measure measure) {
    if (samples.size() != capitals.size()) fail(ErrorKind::size, "bias_statistic: samples and capitals not aligned");
    if (samples.empty()) fail(ErrorKind::size, "bias_statistic: empty sample");
    std::vector<double> secured(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) secured[i] = samples[i] + capitals[i];
    if (measure == Measure::var) {
        if (secured.size() < 2) return -secured[0];
        return estimators::var_empirical(secured, alpha).capital;
    }
    return estimators::es_empirical(secured, alpha).capital;
}

std::optional<double> acerbi_z(std::span<const double> var_capitals, std::span<const double> es_capitals,
                               std::span<const std::span<const double>> evaluation_windows, RiskLevel alpha) {
    if (var_capitals.size() != evaluation_windows.size() || es_capitals.size() != evaluation_windows.size()) {
        fail(ErrorKind::size, "acerbi_z: inputs are not aligned");
    }
    if (evaluation_windows.empty()) fail(ErrorKind::size, "acerbi_z: no evaluation windows");
    double total = 0.0;
    for (std::size_t k = 0; k < evaluation_windows.size(); ++k) {
        if (!(es_capitals[k] > 0.0)) return std::nullopt;
        const auto& window = evaluation_windows[k];
        double s = 0.0;
        for (double x : window)
            if (x + var_capitals[k] < 0.0) s += x / (alpha.value() * es_capitals[k]);
        total += s / static_cast<double>(window.size());
    }
    return total / static_cast<double>(evaluation_windows.size()) + 1.0;
}

double var_score(double x, double y, RiskLevel alpha) {
    return ((x >= y ? 1.0 : 0.0) - alpha.value()) * (x - y);
}

double joint_var_es_score(double x1, double x2, double y, RiskLevel alpha) {
    // Logistic weight e^x2 / (1 + e^x2), written to stay finite for large |x2|.
    const double w = x2 >= 0.0 ? 1.0 / (1.0 + std::exp(-x2)) : std::exp(x2) / (1.0 + std::exp(x2));
    const double hit = x1 >= y ? 1.0 : 0.0;
    return (hit - alpha.value()) * (x1 - y) + w * hit * (x1 - y) / alpha.value() + w * (x2 - x1) - w;
}

double mean_score(std::span<const double> var_forecasts, std::span<const double> es_forecasts,
                  std::span<const std::span<const double>> evaluation_windows, ScoreKind kind, RiskLevel alpha) {
    if (var_forecasts.size() != evaluation_windows.size() ||
        (kind == ScoreKind::joint && es_forecasts.size() != evaluation_windows.size())) {
        fail(ErrorKind::size, "mean_score: forecasts and windows are not aligned");
    }
    if (evaluation_windows.empty()) fail(ErrorKind::size, "mean_score: no evaluation windows");
    double total = 0.0;
    for (std::size_t k = 0; k < evaluation_windows.size(); ++k) {
        const auto& window = evaluation_windows[k];
        if (window.empty()) fail(ErrorKind::size, "mean_score: empty evaluation window");
        double s = 0.0;
        for (double y : window) {
            s += kind == ScoreKind::var ? var_score(var_forecasts[k], y, alpha)
                                        : joint_var_es_score(var_forecasts[k], es_forecasts[k], y, alpha);
        }
        total += s / static_cast<double>(window.size());
    }
    return total / static_cast<double>(evaluation_windows.size());
}

const MethodReport* BacktestReport::find(Method m) const {
    for (const auto& r : methods)
        if (r.method == m) return &r;
    return nullptr;
}

const MethodSummary* ReplicationSummary::find(Method m) const {
    for (const auto& r : methods)
        if (r.method == m) return &r;
    return nullptr;
}

namespace {

bool wants_es(const BacktestConfig& c) { return c.measure != MeasureSelection::var; }

bool needs_unbiased_es(const BacktestConfig& c) {
    return wants_es(c) && std::find(c.methods.begin(), c.methods.end(), Method::gaussian_unbiased) != c.methods.end();
}

}  // namespace

void ensure_calibration(const BacktestConfig& config, calibration::CalibrationTable& table) {
    if (!needs_unbiased_es(config) || table.find(config.window, config.alpha)) return;
    if (!config.auto_calibrate_samples) return;  // reported per method as a calibration-missing failure
    table.insert(calibration::solve_unbiased_es_constant(config.window, RiskLevel(config.alpha),
                                                         *config.auto_calibrate_samples, config.calibration_seed));
}

BacktestReport rolling_backtest(std::span<const double> series, const BacktestConfig& config,
                                const calibration::CalibrationTable& table, std::string series_name) {
    config.validate();
    const auto pairing = split_windows(series, config.window);
    const RiskLevel alpha(config.alpha);

    std::vector<std::span<const double>> windows;
    for (std::size_t k = 0; k < pairing.count; ++k) windows.push_back(pairing.at(series, k));
    const std::span<const std::span<const double>> estimation(windows.data(), pairing.pairs());
    const std::span<const std::span<const double>> evaluation(windows.data() + 1, pairing.pairs());

    // Observations of the evaluation windows, flattened, for the secured-position statistics.
    std::vector<double> observed;
    for (const auto& w : evaluation) observed.insert(observed.end(), w.begin(), w.end());

    estimators::EstimatorOptions options;
    options.gpd_threshold_quantile = config.gpd_threshold_quantile;
    options.table = &table;

    BacktestReport report;
    report.series_name = std::move(series_name);
    report.series_length = series.size();
    report.config = config;
    report.windows = pairing.count;
    report.pairs = pairing.pairs();

    auto capitals_for = [&](Method method, Measure measure) {
        std::vector<double> caps(estimation.size());
        for (std::size_t k = 0; k < estimation.size(); ++k) {
            try {
                caps[k] = estimators::estimate(method, measure, estimation[k], alpha, options).capital;
            } catch (const Error& e) {
                throw Error(e.kind(), "window " + std::to_string(k + 1) + ": " + e.what());
            }
        }
        return caps;
    };
    auto per_observation = [&](const std::vector<double>& caps) {
        std::vector<double> out;
        out.reserve(observed.size());
        for (std::size_t k = 0; k < caps.size(); ++k) out.insert(out.end(), evaluation[k].size(), caps[k]);
        return out;
    };

    for (const Method method : config.methods) {
        MethodReport mr;
        mr.method = method;
        std::vector<double> var_caps;
        try {
            var_caps = capitals_for(method, Measure::var);
        } catch (const Error& e) {
            mr.failed = true;
            mr.failure_reason = e.what();
            report.methods.push_back(std::move(mr));
            continue;
        }

        const auto exc = count_exceedances(var_caps, evaluation);
        mr.exceedance_count = exc.count;
        mr.evaluated_points = exc.points;
        mr.exceedance_rate = exc.rate();

        const auto var_obs_caps = per_observation(var_caps);
        try {
            mr.bias_statistic = bias_statistic(observed, var_obs_caps, alpha, Measure::var);
        } catch (const Error& e) {
            mr.absent.emplace_back("bias_statistic", e.what());
        }

        std::vector<double> var_forecasts(var_caps.size());
        std::transform(var_caps.begin(), var_caps.end(), var_forecasts.begin(), [](double c) { return -c; });
        mr.var_mean_score = mean_score(var_forecasts, {}, evaluation, ScoreKind::var, alpha);

        if (wants_es(config)) {
            std::vector<double> es_caps;
            std::string es_failure;
            if (!estimators::supports_es(method)) {
                es_failure = "method has no ES form";
            } else {
                try {
                    es_caps = capitals_for(method, Measure::es);
                } catch (const Error& e) {
                    es_failure = e.what();
                }
            }
            if (!es_failure.empty()) {
                for (const char* name : {"es_bias_statistic", "es_z_statistic", "joint_mean_score"})
                    mr.absent.emplace_back(name, es_failure);
            } else {
                mr.es_z_statistic = acerbi_z(var_caps, es_caps, evaluation, alpha);
                if (!mr.es_z_statistic) mr.absent.emplace_back("es_z_statistic", "non-positive ES capital in some window");
                try {
                    mr.es_bias_statistic = bias_statistic(observed, per_observation(es_caps), alpha, Measure::es);
                } catch (const Error& e) {
                    mr.absent.emplace_back("es_bias_statistic", e.what());
                }
                std::vector<double> es_forecasts(es_caps.size());
                std::transform(es_caps.begin(), es_caps.end(), es_forecasts.begin(), [](double c) { return -c; });
                mr.joint_mean_score = mean_score(var_forecasts, es_forecasts, evaluation, ScoreKind::joint, alpha);
            }
        }
        report.methods.push_back(std::move(mr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Replication study

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    if (v.empty()) return out;
    double s = 0.0;
    for (double x : v) s += x;
    out.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

std::optional<double> share(std::size_t hits, std::size_t total) {
    if (total == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

ReplicationSummary replication_study(const BacktestConfig& config, const estimators::GaussianParams& generator,
                                     std::size_t series_length, std::size_t replications, std::uint64_t seed,
                                     const calibration::CalibrationTable& table, unsigned threads) {
    config.validate();
    if (replications < 2) fail(ErrorKind::size, "replication_study: need at least 2 replications");
    if (!(generator.sigma > 0.0)) fail(ErrorKind::domain, "replication_study: generator sigma must be positive");
    split_windows(std::vector<double>(series_length), config.window);  // length check up front

    std::vector<BacktestReport> reports(replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= replications) return;
            try {
                stats::SeededRng rng(seed, i);
                const auto series = stats::draw_gaussian(rng, series_length, generator.mu, generator.sigma);
                reports[i] = rolling_backtest(series, config, table);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, replications));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);

    ReplicationSummary summary;
    summary.config = config;
    summary.generator = generator;
    summary.series_length = series_length;
    summary.replications = replications;
    summary.seed = seed;

    const bool has_ref =
        std::find(config.methods.begin(), config.methods.end(), config.reference) != config.methods.end();

    for (const Method method : config.methods) {
        MethodSummary ms;
        ms.method = method;
        const bool is_ref = method == config.reference;
        std::vector<double> er, rd, vscore, jscore, z;
        std::size_t or_hits = 0, or_total = 0;
        std::size_t vs_hits = 0, vs_total = 0, js_hits = 0, js_total = 0, z_hits = 0, z_total = 0;

        for (const auto& rep : reports) {
            const MethodReport* r = rep.find(method);
            if (r == nullptr || r->failed) {
                ++ms.failures;
                continue;
            }
            er.push_back(r->exceedance_rate);
            if (r->var_mean_score) vscore.push_back(*r->var_mean_score);
            if (r->joint_mean_score) jscore.push_back(*r->joint_mean_score);
            if (r->es_z_statistic) z.push_back(*r->es_z_statistic);

            if (!has_ref || is_ref) continue;
            const MethodReport* ref = rep.find(config.reference);
            if (ref == nullptr || ref->failed) continue;

            if (ref->exceedance_rate == 0.0) {
                ++ms.rd_undefined;
            } else {
                rd.push_back((r->exceedance_rate - ref->exceedance_rate) / ref->exceedance_rate);
            }
            ++or_total;
            if (std::abs(r->exceedance_rate - config.alpha) > std::abs(ref->exceedance_rate - config.alpha)) ++or_hits;

            if (r->var_mean_score && ref->var_mean_score) {
                ++vs_total;
                if (*ref->var_mean_score <= *r->var_mean_score) ++vs_hits;
            }
            if (r->joint_mean_score && ref->joint_mean_score) {
                ++js_total;
                if (*ref->joint_mean_score <= *r->joint_mean_score) ++js_hits;
            }
            if (r->es_z_statistic && ref->es_z_statistic) {
                ++z_total;
                if (std::abs(*r->es_z_statistic) > std::abs(*ref->es_z_statistic)) ++z_hits;
            }
        }

        ms.replications = er.size();
        const auto er_stats = mean_sd(er);
        ms.er_mean = er_stats.mean;
        ms.er_sd = er_stats.sd;
        if (has_ref && !is_ref) {
            if (!rd.empty()) {
                const auto rd_stats = mean_sd(rd);
                ms.rd_mean = rd_stats.mean;
                ms.rd_sd = rd_stats.sd;
            }
            ms.or_rate = share(or_hits, or_total);
            ms.var_score_ref_not_worse = share(vs_hits, vs_total);
            ms.joint_score_ref_not_worse = share(js_hits, js_total);
            ms.z_or_rate = share(z_hits, z_total);
        }
        if (!vscore.empty()) ms.var_score_mean = mean_sd(vscore).mean;
        if (!jscore.empty()) ms.joint_score_mean = mean_sd(jscore).mean;
        if (!z.empty()) {
            const auto zs = mean_sd(z);
            ms.z_mean = zs.mean;
            ms.z_sd = zs.sd;
        }
        summary.methods.push_back(std::move(ms));
    }
    return summary;
}

}  // namespace riskbench::backtest
