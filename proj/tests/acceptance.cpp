// Acceptance runner: prints one PASS/FAIL line per criterion (1-10).
// Usage: riskbench_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "riskbench/backtest.hpp"
#include "riskbench/calibration.hpp"
#include "riskbench/cli.hpp"
#include "riskbench/data_io.hpp"
#include "riskbench/estimators.hpp"
#include "riskbench/stats.hpp"

using namespace riskbench;
using backtest::BacktestConfig;
using backtest::MeasureSelection;
using estimators::GaussianParams;
using estimators::Measure;
using estimators::Method;
using estimators::RiskLevel;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

__attribute__((format(printf, 1, 2))) std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) ok = false;
        if (!detail.empty()) detail += "; ";
        detail += (cond ? "" : "!! ") + what;
    }
};

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

// Calibration entry for (50, 0.10) shared by criteria 1, 6 and 8.
calibration::CalibrationTable& shared_table() {
    static calibration::CalibrationTable table;
    if (!table.find(50, 0.10)) table.insert(calibration::solve_unbiased_es_constant(50, RiskLevel(0.10), 10'000'000, 42));
    return table;
}

const backtest::MethodSummary& summary_of(const backtest::ReplicationSummary& s, Method m) {
    const auto* r = s.find(m);
    if (!r) throw std::runtime_error("method missing from summary");
    return *r;
}

BacktestConfig config(std::vector<Method> methods, double alpha, MeasureSelection measure, Method reference) {
    BacktestConfig c;
    c.window = 50;
    c.alpha = alpha;
    c.methods = std::move(methods);
    c.measure = measure;
    c.reference = reference;
    return c;
}

// ---------------------------------------------------------------------------

Check criterion1() {
    Check c;
    const auto t0 = Clock::now();
    const auto e = calibration::solve_unbiased_es_constant(50, RiskLevel(0.10), 10'000'000, 42);
    const double secs = seconds_since(t0);
    c.require(within(e.a_n, -1.81033, 0.002), fmt("a_50 = %.6f (target -1.81033 +- 0.002, b_50 = %.6f)", e.a_n, e.b_n));
    c.require(secs < 120.0, fmt("%.1f s single-threaded (< 120 s)", secs));
    shared_table().insert(e);
    return c;
}

Check criterion2() {
    Check c;
    const auto u = calibration::pivotality_check(Method::gaussian_unbiased, 50, RiskLevel(0.05), 1'000'000, 2024, {0.0, 1.0});
    c.require(within(u.frequency, 0.05, 0.0007), fmt("unbiased frequency %.5f (0.0500 +- 0.0007)", u.frequency));
    const auto g = calibration::pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 1'000'000, 2024, {0.0, 1.0});
    c.require(g.frequency > 0.05 + 3 * g.standard_error,
              fmt("gaussian frequency %.5f > 0.05 + 3 se = %.5f", g.frequency, 0.05 + 3 * g.standard_error));
    return c;
}

Check criterion3() {
    Check c;
    const auto series = data_io::simulate_series({{0.0, 1.0}, 4000, 7});
    const auto cfg = config({Method::empirical, Method::gaussian, Method::cornish_fisher, Method::gaussian_unbiased},
                            0.05, MeasureSelection::var, Method::gaussian_unbiased);
    const auto report = backtest::rolling_backtest(series.values, cfg, {}, series.name);
    const std::map<Method, double> targets{{Method::gaussian_unbiased, 0.050},
                                           {Method::gaussian, 0.056},
                                           {Method::empirical, 0.064},
                                           {Method::cornish_fisher, 0.058}};
    for (const auto& [m, target] : targets) {
        const double er = report.find(m)->exceedance_rate;
        c.require(within(er, target, 0.008), fmt("%s %.4f (%.3f)", estimators::short_tag(m).data(), er, target));
    }
    return c;
}

Check criterion4() {
    Check c;
    const auto cfg = config({Method::empirical, Method::gaussian, Method::cornish_fisher, Method::gaussian_unbiased},
                            0.05, MeasureSelection::var, Method::gaussian_unbiased);
    const auto t0 = Clock::now();
    const auto s = backtest::replication_study(cfg, {0.0, 1.0}, 4000, 10'000, 4000, {});
    const double secs = seconds_since(t0);
    const std::map<Method, double> targets{{Method::gaussian_unbiased, 0.050},
                                           {Method::gaussian, 0.057},
                                           {Method::empirical, 0.067},
                                           {Method::cornish_fisher, 0.057}};
    for (const auto& [m, target] : targets) {
        const auto& ms = summary_of(s, m);
        c.require(within(ms.er_mean, target, 0.002) && ms.er_sd >= 0.7 * 0.0026 && ms.er_sd <= 1.3 * 0.0028,
                  fmt("%s er %.4f (%.3f) sd %.4f", estimators::short_tag(m).data(), ms.er_mean, target, ms.er_sd));
    }
    c.require(secs < 900.0, fmt("%.1f s", secs));
    return c;
}

Check criterion5() {
    Check c;
    const auto cfg = config({Method::empirical, Method::cornish_fisher, Method::gaussian, Method::gpd,
                             Method::gaussian_unbiased},
                            0.05, MeasureSelection::var, Method::gaussian_unbiased);
    const auto s = backtest::replication_study(cfg, {0.0, 1.0}, 2500, 10'000, 2500, {});
    struct Row {
        Method m;
        double er, rd, orate;
    };
    const Row rows[] = {{Method::empirical, 0.067, 0.292, 1.000},
                        {Method::cornish_fisher, 0.057, 0.112, 0.917},
                        {Method::gaussian, 0.057, 0.098, 0.882},
                        {Method::gpd, 0.058, 0.125, 0.933},
                        {Method::gaussian_unbiased, 0.052, NAN, NAN}};
    for (const auto& r : rows) {
        const auto& ms = summary_of(s, r.m);
        const char* tag = estimators::short_tag(r.m).data();
        c.require(within(ms.er_mean, r.er, 0.002), fmt("%s er %.4f (%.3f)", tag, ms.er_mean, r.er));
        if (std::isnan(r.rd)) continue;
        c.require(ms.rd_mean && within(*ms.rd_mean, r.rd, 0.02), fmt("rd %.1f%% (%.1f%%)", 100 * ms.rd_mean.value_or(NAN), 100 * r.rd));
        c.require(ms.or_rate && within(*ms.or_rate, r.orate, 0.03),
                  fmt("or %.1f%% (%.1f%%)", 100 * ms.or_rate.value_or(NAN), 100 * r.orate));
    }
    return c;
}

Check criterion6() {
    Check c;
    const auto cfg = config({Method::empirical, Method::gaussian, Method::gaussian_unbiased}, 0.10, MeasureSelection::es,
                            Method::gaussian_unbiased);
    const auto s = backtest::replication_study(cfg, {0.0, 1.0}, 2500, 10'000, 6, shared_table());
    const double ze = summary_of(s, Method::empirical).z_mean.value_or(NAN);
    const double zn = summary_of(s, Method::gaussian).z_mean.value_or(NAN);
    const double zu = summary_of(s, Method::gaussian_unbiased).z_mean.value_or(NAN);
    const double or_norm = summary_of(s, Method::gaussian).z_or_rate.value_or(NAN);
    c.require(ze < zn && zn < zu, fmt("z emp %.4f < norm %.4f < u %.4f", ze, zn, zu));
    c.require(std::abs(zu) < 0.08, fmt("|z u| %.4f < 0.08", std::abs(zu)));
    c.require(ze > -0.25 && ze < -0.10, fmt("z emp in (-0.25, -0.10)"));
    c.require(or_norm >= 0.90, fmt("Z-OR u vs norm %.1f%% >= 90%%", 100 * or_norm));
    return c;
}

Check criterion7() {
    Check c;
    stats::SeededRng rng(7, 0);
    int violations = 0, cases = 0;
    for (double alpha : {0.05, 0.10, 0.5}) {
        for (int trial = 0; trial < 100; ++trial, ++cases) {
            const int atoms = 1 + static_cast<int>(rng.next_u64() % 6);
            std::vector<std::pair<double, double>> dist;
            double total = 0;
            for (int j = 0; j < atoms; ++j) {
                const double v = std::round(4000.0 * (rng.uniform() - 0.5)) / 1000.0;
                const double w = rng.uniform();
                dist.emplace_back(v, w);
                total += w;
            }
            for (auto& d : dist) d.second /= total;
            std::sort(dist.begin(), dist.end());
            double cum = 0, q_lo = NAN, q_hi = NAN;
            for (const auto& [v, p] : dist) {
                cum += p;
                if (std::isnan(q_lo) && cum >= alpha - 1e-12) q_lo = v;
                if (std::isnan(q_hi) && cum > alpha + 1e-12) q_hi = v;
            }
            double best = INFINITY, arg_lo = NAN, arg_hi = NAN;
            for (int g = -2500; g <= 2500; ++g) {
                const double x = g / 1000.0;
                double e = 0;
                for (const auto& [v, p] : dist) e += p * backtest::var_score(x, v, RiskLevel(alpha));
                if (e < best - 1e-12) {
                    best = e;
                    arg_lo = arg_hi = x;
                } else if (std::abs(e - best) <= 1e-12) {
                    arg_hi = x;
                }
            }
            if (arg_lo < q_lo - 1e-9 || arg_hi > q_hi + 1e-9) ++violations;
        }
    }
    c.require(violations == 0, fmt("%d distributions, %d minimizers outside the quantile interval", cases, violations));
    return c;
}

Check criterion8() {
    Check c;
    for (double alpha : {0.05, 0.10}) {
        const auto cfg = config({Method::empirical, Method::gaussian_unbiased}, alpha, MeasureSelection::both,
                                Method::gaussian_unbiased);
        const auto s = backtest::replication_study(cfg, {0.0, 1.0}, 2500, 1000, 8, shared_table());
        if (alpha == 0.05) {
            const double v = summary_of(s, Method::empirical).var_score_ref_not_worse.value_or(NAN);
            c.require(v >= 0.90, fmt("alpha 0.05: var score u <= emp in %.1f%%", 100 * v));
        } else {
            const double v = summary_of(s, Method::empirical).var_score_ref_not_worse.value_or(NAN);
            const double j = summary_of(s, Method::empirical).joint_score_ref_not_worse.value_or(NAN);
            c.require(v >= 0.90, fmt("alpha 0.10: var score u <= emp in %.1f%%", 100 * v));
            c.require(j >= 0.90, fmt("joint score u <= emp in %.1f%%", 100 * j));
        }
    }
    return c;
}

Check criterion9() {
    Check c;
    const std::size_t ns[] = {50, 200, 1000, 5000};
    std::vector<double> gaps, es;
    std::string gap_text, es_text;
    for (std::size_t n : ns) {
        const std::size_t trials = std::max<std::size_t>(40'000, 200'000'000 / n);
        const auto p = calibration::pivotality_check(Method::empirical_simple, n, RiskLevel(0.05), trials, 9, {0.0, 1.0});
        gaps.push_back(std::abs(p.conditional_probability - 0.05));
        gap_text += fmt(" %zu:%.5f", n, gaps.back());
        es.push_back(calibration::secured_position_es(Method::gaussian, n, RiskLevel(0.10), 20'000'000, 9, {0.0, 1.0},
                                                      Measure::es));
        es_text += fmt(" %zu:%.5f", n, es.back());
    }
    const auto decreasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
    };
    c.require(decreasing(gaps) && gaps.back() < 0.002, "emp_simple gap" + gap_text);
    c.require(decreasing(es) && es.back() < 0.01, "gaussian secured ES" + es_text);
    return c;
}

Check criterion10() {
    Check c;

    // Equivariance over every estimator and measure.
    calibration::CalibrationTable table;
    table.insert({250, 0.05, 0.3, calibration::a_from_b(0.3, 250), 0, 0, 0.0});
    estimators::EstimatorOptions opts;
    opts.table = &table;
    const std::pair<Method, Measure> cases[] = {
        {Method::empirical, Measure::var},        {Method::empirical_simple, Measure::var},
        {Method::gaussian, Measure::var},         {Method::cornish_fisher, Measure::var},
        {Method::student_t, Measure::var},        {Method::gpd, Measure::var},
        {Method::kde, Measure::var},              {Method::gaussian_unbiased, Measure::var},
        {Method::mean, Measure::var},             {Method::empirical, Measure::es},
        {Method::gaussian, Measure::es},          {Method::cornish_fisher, Measure::es},
        {Method::gpd, Measure::es},               {Method::gaussian_unbiased, Measure::es},
    };
    std::set<std::string> translation_bad, scale_bad;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        stats::SeededRng rng(1000 + seed, 0);
        std::vector<double> x(250);
        for (auto& v : x) {
            const double z = rng.standard_normal();
            v = 0.01 * (z + 0.3 * z * z);
        }
        for (const auto& [m, meas] : cases) {
            const std::string name = std::string(estimators::short_tag(m)) + "/" + std::string(estimators::to_string(meas));
            const double base = estimators::estimate(m, meas, x, RiskLevel(0.05), opts).capital;
            for (double d : {0.37, -0.05, 1e-3}) {
                std::vector<double> y(x);
                for (auto& v : y) v += d;
                if (std::abs(estimators::estimate(m, meas, y, RiskLevel(0.05), opts).capital - (base - d)) > 1e-10)
                    translation_bad.insert(name);
            }
            for (double lambda : {0.5, 3.0, 17.25}) {
                std::vector<double> y(x);
                for (auto& v : y) v *= lambda;
                if (std::abs(estimators::estimate(m, meas, y, RiskLevel(0.05), opts).capital - lambda * base) > 1e-10)
                    scale_bad.insert(name);
            }
        }
    }
    const auto join = [](const std::set<std::string>& s) {
        std::string out;
        for (const auto& v : s) out += (out.empty() ? "" : ",") + v;
        return out.empty() ? std::string("none") : out;
    };
    c.require(translation_bad.empty(), "translation failures: " + join(translation_bad));
    c.require(scale_bad.empty(), "homogeneity failures: " + join(scale_bad));

    // Weighted-penalty identity of the VaR score.
    stats::SeededRng rng(10, 0);
    double worst = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        const double cap = 3.0 * rng.standard_normal();
        const double x = 2.0 * rng.standard_normal();
        const double alpha = rng.uniform();
        const double s = x + cap;
        const double rhs = alpha * std::max(s, 0.0) + (1.0 - alpha) * std::max(-s, 0.0);
        worst = std::max(worst, std::abs(backtest::var_score(-cap, x, RiskLevel(alpha)) - rhs));
    }
    c.require(worst <= 1e-12, fmt("score identity max error %.1e", worst));

    // Calibration table round trip.
    calibration::CalibrationTable t;
    t.insert(calibration::solve_unbiased_es_constant(50, RiskLevel(0.10), 100'000, 5));
    t.insert({7, 1.0 / 3.0, 0.1 + 0.2, calibration::a_from_b(0.3, 7), 123, 9, 1e-17});
    const auto path = std::filesystem::temp_directory_path() / "riskbench_acceptance_table.json";
    t.save(path);
    const auto back = calibration::CalibrationTable::load(path);
    std::filesystem::remove(path);
    c.require(back.entries() == t.entries(), "table round trip");

    // CLI determinism.
    bool same = true;
    for (const char* format : {"json", "csv"}) {
        const std::vector<std::vector<std::string>> invocations{
            {"backtest", "--simulate", "--length", "2000", "--alpha", "0.05", "--seed", "11", "--methods",
             "emp,norm,cf,t,gpd,kde,u", "--format", format},
            {"replicate", "--reps", "40", "--length", "1000", "--alpha", "0.05", "--methods", "emp,norm,u", "--format",
             format},
            {"calibrate", "--n", "30", "--alpha", "0.05", "--samples", "100000", "--format", format},
        };
        for (const auto& args : invocations) {
            std::ostringstream o1, o2, e1, e2;
            const int r1 = cli::run(args, o1, e1);
            const int r2 = cli::run(args, o2, e2);
            same = same && r1 == 0 && r2 == 0 && o1.str() == o2.str() && !o1.str().empty();
        }
    }
    c.require(same, "CLI byte-identical json/csv output");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Check()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
        if (!selected.empty() && !selected.count(k)) continue;
        const auto t0 = Clock::now();
        Check result;
        try {
            result = criteria[k - 1]();
        } catch (const std::exception& e) {
            result.require(false, std::string("exception: ") + e.what());
        }
        if (!result.ok) ++failures;
        std::printf("criterion %d: %s [%.1fs] %s\n", k, result.ok ? "PASS" : "FAIL", seconds_since(t0),
                    result.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
