#include "riskbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_format.hpp"
#include "riskbench/error.hpp"
#include "riskbench/stats.hpp"

namespace riskbench::calibration {

using estimators::GaussianParams;
using estimators::Measure;
using estimators::Method;
using estimators::RiskLevel;

double a_from_b(double b_n, std::size_t n) {
    const double nd = static_cast<double>(n);
    return -b_n * std::sqrt((nd - 1.0) * (nd + 1.0) / nd);
}

// ---------------------------------------------------------------------------
// Table

std::int64_t CalibrationTable::alpha_key(double alpha) { return std::llround(alpha * 1e6); }

std::optional<CalibrationEntry> CalibrationTable::find(std::size_t n, double alpha) const {
    const auto it = entries_.find({n, alpha_key(alpha)});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void CalibrationTable::insert(const CalibrationEntry& entry) { entries_[{entry.n, alpha_key(entry.alpha)}] = entry; }

std::vector<CalibrationEntry> CalibrationTable::entries() const {
    std::vector<CalibrationEntry> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) out.push_back(entry);
    return out;
}

std::string CalibrationTable::to_json() const {
    nlohmann::ordered_json doc;
    doc["version"] = kCalibrationTableVersion;
    auto list = nlohmann::ordered_json::array();
    for (const auto& [key, e] : entries_) {
        nlohmann::ordered_json item;
        item["n"] = e.n;
        item["alpha"] = e.alpha;
        item["a_n"] = e.a_n;
        item["b_n"] = e.b_n;
        item["mc_samples"] = e.mc_samples;
        item["seed"] = e.seed;
        item["residual"] = e.residual;
        list.push_back(std::move(item));
    }
    doc["entries"] = std::move(list);
    return detail::dump_json(doc) + "\n";
}

CalibrationTable CalibrationTable::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, std::string("calibration table: malformed JSON: ") + e.what());
    }
    if (!doc.contains("version") || doc["version"] != kCalibrationTableVersion) {
        fail(ErrorKind::data, "calibration table: unsupported or missing version tag");
    }
    CalibrationTable table;
    try {
        for (const auto& item : doc.at("entries")) {
            CalibrationEntry e;
            e.n = item.at("n").get<std::size_t>();
            e.alpha = item.at("alpha").get<double>();
            e.a_n = item.at("a_n").get<double>();
            e.b_n = item.at("b_n").get<double>();
            e.mc_samples = item.at("mc_samples").get<std::size_t>();
            e.seed = item.at("seed").get<std::uint64_t>();
            e.residual = item.at("residual").get<double>();
            if (table.find(e.n, e.alpha)) {
                fail(ErrorKind::data, "calibration table: duplicate entry for n=" + std::to_string(e.n));
            }
            table.insert(e);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, std::string("calibration table: ") + e.what());
    }
    return table;
}

void CalibrationTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open calibration table for writing: " + path.string());
    out << to_json();
    if (!out) fail(ErrorKind::io, "failed writing calibration table: " + path.string());
}

CalibrationTable CalibrationTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open calibration table: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

// ---------------------------------------------------------------------------
// Empirical ES and the pivotal solver

std::size_t tail_count(std::size_t m, double alpha) {
    const double t = alpha * static_cast<double>(m);
    const double r = std::round(t);
    // alpha * m lands a few ulps above an integer for e.g. 0.05 * 100.
    double k = (std::abs(t - r) <= 1e-9 * std::max(1.0, t)) ? r : std::ceil(t);
    k = std::clamp(k, 1.0, static_cast<double>(m));
    return static_cast<std::size_t>(k);
}

namespace {

// Negative mean of the k smallest entries; reorders `work`.
double lower_tail_es(std::vector<double>& work, std::size_t k) {
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k - 1), work.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += work[i];
    return -sum / static_cast<double>(k);
}

}  // namespace

double empirical_es(std::span<const double> values, double alpha) {
    if (values.empty()) fail(ErrorKind::size, "empirical_es: empty input");
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::domain, "empirical_es: alpha must lie in (0,1]");
    std::vector<double> work(values.begin(), values.end());
    return lower_tail_es(work, tail_count(work.size(), alpha));
}

std::vector<PivotalDraw> draw_pivotal_sample(std::size_t n, std::size_t count, std::uint64_t seed) {
    stats::SeededRng rng(seed, static_cast<std::uint64_t>(n));
    std::vector<PivotalDraw> draws(count);
    for (auto& d : draws) {
        const auto pair = stats::draw_pivotal_pair(rng, n);
        d = {pair.z, pair.v};
    }
    return draws;
}

namespace {

class PivotalObjective {
public:
    PivotalObjective(std::span<const PivotalDraw> draws, double alpha)
        : draws_(draws), work_(draws.size()), k_(tail_count(draws.size(), alpha)) {}

    double operator()(double b) {
        for (std::size_t i = 0; i < draws_.size(); ++i) work_[i] = draws_[i].z + b * draws_[i].v;
        return lower_tail_es(work_, k_);
    }

private:
    std::span<const PivotalDraw> draws_;
    std::vector<double> work_;
    std::size_t k_;
};

}  // namespace

double pivotal_es(std::span<const PivotalDraw> draws, double b, double alpha) {
    if (draws.empty()) fail(ErrorKind::size, "pivotal_es: empty sample");
    PivotalObjective g(draws, alpha);
    return g(b);
}

CalibrationEntry solve_unbiased_es_constant(std::size_t n, RiskLevel alpha, std::size_t mc_samples, std::uint64_t seed,
                                            double tolerance) {
    if (n < 2) fail(ErrorKind::size, "solve_unbiased_es_constant: window size must be at least 2");
    if (mc_samples < 100'000) fail(ErrorKind::size, "solve_unbiased_es_constant: need at least 1e5 MC samples");
    if (!(tolerance > 0.0)) fail(ErrorKind::domain, "solve_unbiased_es_constant: tolerance must be positive");

    const auto draws = draw_pivotal_sample(n, mc_samples, seed);
    PivotalObjective g(draws, alpha.value());

    constexpr int kMaxDoublings = 60;
    double lo = 0.0, hi = 1.0;
    double g_lo = g(lo);
    if (g_lo <= 0.0) {
        // Only happens when alpha is so close to 1 that ES(Z) is at MC-noise level.
        hi = 0.0;
        lo = -1.0;
        int d = 0;
        while ((g_lo = g(lo)) <= 0.0) {
            if (++d > kMaxDoublings) fail(ErrorKind::calibration_failure, "calibration: lower bracket not found");
            lo *= 2.0;
        }
    } else {
        int d = 0;
        while (g(hi) >= 0.0) {
            if (++d > kMaxDoublings) fail(ErrorKind::calibration_failure, "calibration: upper bracket not found");
            hi *= 2.0;
        }
    }

    double b = 0.5 * (lo + hi);
    double gb = g(b);
    while (hi - lo > 1e-8 && std::abs(gb) > tolerance) {
        (gb > 0.0 ? lo : hi) = b;
        b = 0.5 * (lo + hi);
        gb = g(b);
    }
    const double residual = std::abs(gb);

    CalibrationEntry entry;
    entry.n = n;
    entry.alpha = alpha.value();
    entry.b_n = b;
    entry.a_n = a_from_b(b, n);
    entry.mc_samples = mc_samples;
    entry.seed = seed;
    entry.residual = residual;
    return entry;
}

// ---------------------------------------------------------------------------
// Pivotality / unbiasedness checks

namespace {

bool depends_on_mean_and_sd_only(Method method) {
    return method == Method::gaussian || method == Method::gaussian_unbiased || method == Method::mean;
}

// Capital of a (mean, sd)-only estimator evaluated on simulated sufficient statistics.
double capital_from_moments(Method method, Measure measure, double mean, double sd, std::size_t n, double alpha,
                            double a_n) {
    using namespace estimators;
    if (method == Method::mean) return -mean;
    if (measure == Measure::var) {
        return method == Method::gaussian ? gaussian_var_capital(mean, sd, alpha)
                                          : gaussian_unbiased_var_capital(mean, sd, n, alpha);
    }
    return method == Method::gaussian ? gaussian_es_capital(mean, sd, alpha) : gaussian_unbiased_es_capital(mean, sd, a_n);
}

// Runs `trials` (window, out-of-sample) simulations and calls sink(x_out, capital).
template <typename Sink>
void simulate_secured_positions(Method method, Measure measure, std::size_t n, RiskLevel alpha, std::size_t trials,
                                std::uint64_t seed, const GaussianParams& params,
                                const estimators::EstimatorOptions& options, Sink&& sink) {
    if (n < 2) fail(ErrorKind::size, "window size must be at least 2");
    if (trials < 10'000) fail(ErrorKind::size, "need at least 1e4 trials");
    if (!(params.sigma > 0.0)) fail(ErrorKind::domain, "simulation sigma must be positive");
    if (measure == Measure::es && !estimators::supports_es(method)) {
        fail(ErrorKind::configuration, "method " + std::string(estimators::to_string(method)) + " has no ES form");
    }

    double a_n = 0.0;
    if (measure == Measure::es && method == Method::gaussian_unbiased) {
        const auto entry = options.table ? options.table->find(n, alpha.value()) : std::nullopt;
        if (!entry) fail(ErrorKind::calibration_missing, "no calibration entry for n=" + std::to_string(n));
        a_n = entry->a_n;
    }

    stats::SeededRng rng(seed, 0);
    const double nd = static_cast<double>(n);
    if (depends_on_mean_and_sd_only(method)) {
        // Sample mean and sd have exact laws under Gaussian data: N(mu, sigma^2/n) and sigma chi_{n-1}/sqrt(n-1).
        // These capitals are all of the form -mean + sd * c.
        const double c = capital_from_moments(method, measure, 0.0, 1.0, n, alpha.value(), a_n);
        for (std::size_t t = 0; t < trials; ++t) {
            const auto pair = stats::draw_pivotal_pair(rng, n);
            const double mean = params.mu + params.sigma * pair.z / std::sqrt(nd);
            const double sd = params.sigma * pair.v / std::sqrt(nd - 1.0);
            const double x_out = params.mu + params.sigma * rng.standard_normal();
            sink(x_out, -mean + sd * c);
        }
        return;
    }
    for (std::size_t t = 0; t < trials; ++t) {
        const auto window = stats::draw_gaussian(rng, n, params.mu, params.sigma);
        const double capital = estimators::estimate(method, measure, window, alpha, options).capital;
        const double x_out = params.mu + params.sigma * rng.standard_normal();
        sink(x_out, capital);
    }
}

}  // namespace

PivotalityResult pivotality_check(Method method, std::size_t n, RiskLevel alpha, std::size_t trials, std::uint64_t seed,
                                  const GaussianParams& params, Measure measure,
                                  const estimators::EstimatorOptions& options) {
    std::size_t hits = 0;
    double conditional = 0.0;
    simulate_secured_positions(method, measure, n, alpha, trials, seed, params, options,
                               [&](double x_out, double capital) {
                                   if (x_out + capital < 0.0) ++hits;
                                   conditional += stats::gaussian_cdf((-capital - params.mu) / params.sigma);
                               });
    PivotalityResult out;
    out.trials = trials;
    out.frequency = static_cast<double>(hits) / static_cast<double>(trials);
    out.standard_error = std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(trials));
    out.conditional_probability = conditional / static_cast<double>(trials);
    return out;
}

double secured_position_es(Method method, std::size_t n, RiskLevel alpha, std::size_t trials, std::uint64_t seed,
                           const GaussianParams& params, Measure measure, const estimators::EstimatorOptions& options) {
    std::vector<double> secured;
    secured.reserve(trials);
    simulate_secured_positions(method, measure, n, alpha, trials, seed, params, options,
                               [&](double x_out, double capital) { secured.push_back(x_out + capital); });
    return empirical_es(secured, alpha.value());
}

}  // namespace riskbench::calibration
