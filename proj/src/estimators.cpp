#include "riskbench/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>

#include "riskbench/calibration.hpp"
#include "riskbench/error.hpp"
#include "riskbench/stats.hpp"

namespace riskbench::estimators {

namespace {

struct MethodName {
    Method method;
    std::string_view full;
    std::string_view tag;
};

constexpr MethodName kMethodNames[] = {
    {Method::empirical, "empirical", "emp"},
    {Method::empirical_simple, "empirical_simple", "emp_simple"},
    {Method::gaussian, "gaussian", "norm"},
    {Method::cornish_fisher, "cornish_fisher", "cf"},
    {Method::student_t, "student_t", "t"},
    {Method::gpd, "gpd", "gpd"},
    {Method::kde, "kde", "kde"},
    {Method::gaussian_unbiased, "gaussian_unbiased", "u"},
    {Method::mean, "mean", "mean"},
};

void require_size(std::span<const double> x, std::size_t min_n, const char* who) {
    if (x.size() < min_n) {
        fail(ErrorKind::size, std::string(who) + ": need at least " + std::to_string(min_n) +
                                  " observations, got " + std::to_string(x.size()));
    }
}


RiskEstimate make(Measure measure, Method method, RiskLevel alpha, std::size_t n, double capital) {
    if (!std::isfinite(capital)) {
        fail(ErrorKind::estimation, std::string(to_string(method)) + ": non-finite capital");
    }
    return RiskEstimate{measure, method, alpha.value(), n, capital};
}

}  // namespace

RiskLevel::RiskLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        fail(ErrorKind::domain, "risk level must lie in (0,1), got " + std::to_string(alpha));
    }
}

std::string_view to_string(Measure measure) { return measure == Measure::var ? "VaR" : "ES"; }

std::string_view to_string(Method method) {
    for (const auto& m : kMethodNames)
        if (m.method == method) return m.full;
    return "unknown";
}

std::string_view short_tag(Method method) {
    for (const auto& m : kMethodNames)
        if (m.method == method) return m.tag;
    return "unknown";
}

Method parse_method(std::string_view tag) {
    for (const auto& m : kMethodNames)
        if (tag == m.full || tag == m.tag) return m.method;
    fail(ErrorKind::configuration, "unknown method tag '" + std::string(tag) + "'; valid tags: " + method_tag_help());
}

Measure parse_measure(std::string_view tag) {
    if (tag == "var" || tag == "VaR") return Measure::var;
    if (tag == "es" || tag == "ES") return Measure::es;
    fail(ErrorKind::configuration, "unknown measure '" + std::string(tag) + "'; valid: var, es");
}

std::vector<Method> parse_method_list(std::string_view csv) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto piece = csv.substr(start, comma == std::string_view::npos ? csv.size() - start : comma - start);
        if (!piece.empty()) {
            const Method m = parse_method(piece);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) fail(ErrorKind::configuration, "empty method list; valid tags: " + method_tag_help());
    return out;
}

std::string method_tag_help() {
    std::ostringstream os;
    bool first = true;
    for (const auto& m : kMethodNames) {
        if (!first) os << ", ";
        first = false;
        os << m.tag << " (" << m.full << ")";
    }
    return os.str();
}

bool supports_es(Method method) {
    switch (method) {
        case Method::empirical:
        case Method::gaussian:
        case Method::cornish_fisher:
        case Method::gpd:
        case Method::gaussian_unbiased:
        case Method::mean:
            return true;
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Closed forms

double gaussian_var_capital(double mean, double sd, double alpha) {
    return -(mean + sd * stats::gaussian_quantile(alpha));
}

double gaussian_unbiased_var_capital(double mean, double sd, std::size_t n, double alpha) {
    const double nd = static_cast<double>(n);
    return -(mean + sd * std::sqrt((nd + 1.0) / nd) * stats::student_t_quantile(alpha, nd - 1.0));
}

double gaussian_es_capital(double mean, double sd, double alpha) {
    return -mean + sd * stats::gaussian_pdf(stats::gaussian_quantile(alpha)) / alpha;
}

double gaussian_unbiased_es_capital(double mean, double sd, double a_n) { return -mean - sd * a_n; }

double student_t_var_capital(const StudentTParams& p, double alpha) {
    const double scale = p.sigma * std::sqrt((p.nu - 2.0) / p.nu);
    return -p.mu - scale * stats::student_t_quantile(alpha, p.nu);
}

double gpd_var_capital(const GpdFit& fit, double alpha) {
    const double ratio = alpha * static_cast<double>(fit.n) / static_cast<double>(fit.k);
    if (ratio > 1.0 + 1e-12) {
        fail(ErrorKind::level_too_high, "GPD tail formula requires alpha below the empirical mass under u (alpha*n/k = " +
                                            std::to_string(ratio) + ")");
    }
    if (std::abs(fit.xi) < 1e-6) return -fit.u + fit.beta * std::log(1.0 / ratio);
    return -fit.u + (fit.beta / fit.xi) * (std::pow(ratio, -fit.xi) - 1.0);
}

double gpd_es_capital(double empirical_var, const GpdFit& fit) {
    if (!(fit.xi < 1.0)) fail(ErrorKind::infinite_mean_tail, "GPD shape >= 1: tail mean is infinite");
    return empirical_var / (1.0 - fit.xi) + (fit.beta - fit.xi * fit.u) / (1.0 - fit.xi);
}

CornishFisherAdjustment cornish_fisher_z(RiskLevel alpha, double skew, double kurt) {
    const double z = stats::gaussian_quantile(alpha.value());
    const double z2 = z * z;
    const double z3 = z2 * z;
    CornishFisherAdjustment out;
    out.base_z = z;
    out.skew = skew;
    out.excess_kurtosis = kurt;
    out.z_cf = z + (z2 - 1.0) * skew / 6.0 + (z3 - 3.0 * z) * kurt / 24.0 - (2.0 * z3 - 5.0 * z) * skew * skew / 36.0;
    return out;
}

double cornish_fisher_tail_mean(double alpha, double skew, double kurt, std::size_t nodes) {
    if (nodes == 0) fail(ErrorKind::domain, "cornish_fisher_tail_mean: need at least one node");
    // Midpoint rule in u with p = alpha u^3; the substitution absorbs the
    // quantile singularity at p = 0.
    double sum = 0.0;
    const double m = static_cast<double>(nodes);
    for (std::size_t j = 1; j <= nodes; ++j) {
        const double u = (static_cast<double>(j) - 0.5) / m;
        sum += 3.0 * u * u * cornish_fisher_z(RiskLevel(alpha * u * u * u), skew, kurt).z_cf;
    }
    return sum / m;
}

// ---------------------------------------------------------------------------
// VaR

RiskEstimate var_empirical(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 2, "var_empirical");
    return make(Measure::var, Method::empirical, alpha, x.size(), -stats::type7_quantile(x, alpha.value()));
}

RiskEstimate var_empirical_simple(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 1, "var_empirical_simple");
    const auto index = static_cast<std::size_t>(std::floor(static_cast<double>(x.size()) * alpha.value()));
    if (index >= x.size()) fail(ErrorKind::domain, "var_empirical_simple: order statistic index out of range");
    std::vector<double> v(x.begin(), x.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(index), v.end());
    return make(Measure::var, Method::empirical_simple, alpha, x.size(), -v[index]);
}

RiskEstimate var_gaussian(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 2, "var_gaussian");
    const auto m = stats::sample_moments(x);
    return make(Measure::var, Method::gaussian, alpha, x.size(), gaussian_var_capital(m.mean, m.sd, alpha.value()));
}

RiskEstimate var_gaussian_unbiased(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 2, "var_gaussian_unbiased");
    const auto m = stats::sample_moments(x);
    return make(Measure::var, Method::gaussian_unbiased, alpha, x.size(),
                gaussian_unbiased_var_capital(m.mean, m.sd, x.size(), alpha.value()));
}

RiskEstimate var_cornish_fisher(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 4, "var_cornish_fisher");
    const auto m = stats::sample_moments(x);
    const auto cf = cornish_fisher_z(alpha, m.skewness, m.excess_kurtosis);
    return make(Measure::var, Method::cornish_fisher, alpha, x.size(), -(m.mean + m.sd * cf.z_cf));
}

// ---------------------------------------------------------------------------
// Student-t

namespace {

// Standardized squared residuals u_i^2 = ((x_i - mu) / sigma)^2.
std::vector<double> squared_residuals(std::span<const double> x, double mu, double sigma) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        const double r = (v - mu) / sigma;
        out.push_back(r * r);
    }
    return out;
}

// Profile log-likelihood in nu for unit sd, dropping the -n log(sigma) constant.
double t_loglik_std(std::span<const double> u2, double nu) {
    const double n = static_cast<double>(u2.size());
    double sum = 0.0;
    for (double q : u2) sum += std::log1p(q / (nu - 2.0));
    return n * (std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(std::numbers::pi * (nu - 2.0))) -
           0.5 * (nu + 1.0) * sum;
}

double t_score_std(std::span<const double> u2, double nu) {
    namespace bm = boost::math;
    const double n = static_cast<double>(u2.size());
    double log_sum = 0.0, ratio_sum = 0.0;
    for (double q : u2) {
        log_sum += std::log1p(q / (nu - 2.0));
        ratio_sum += q / ((nu - 2.0) * (nu - 2.0 + q));
    }
    return n * (0.5 * bm::digamma(0.5 * (nu + 1.0)) - 0.5 * bm::digamma(0.5 * nu) - 0.5 / (nu - 2.0)) -
           0.5 * log_sum + 0.5 * (nu + 1.0) * ratio_sum;
}

}  // namespace

double student_t_profile_loglik(std::span<const double> x, double mu, double sigma, double nu) {
    if (!(sigma > 0.0) || !(nu > 2.0)) fail(ErrorKind::domain, "student_t_profile_loglik: need sigma > 0, nu > 2");
    const auto u2 = squared_residuals(x, mu, sigma);
    return t_loglik_std(u2, nu) - static_cast<double>(x.size()) * std::log(sigma);
}

StudentTParams fit_student_t(std::span<const double> x) {
    require_size(x, 10, "fit_student_t");
    const auto m = stats::sample_moments(x);
    StudentTParams params{m.mean, m.sd, kStudentTNuCap};
    if (m.sd == 0.0) return params;

    const auto u2 = squared_residuals(x, m.mean, m.sd);
    if (t_score_std(u2, kStudentTNuCap) >= 0.0) return params;

    // Scan a log-spaced grid on (2, 200] for sign changes of the score, then bisect each.
    constexpr int kGrid = 80;
    const double lo_log = std::log(2.01 - 2.0), hi_log = std::log(kStudentTNuCap - 2.0);
    auto grid_nu = [&](int i) { return 2.0 + std::exp(lo_log + (hi_log - lo_log) * i / kGrid); };

    double best_nu = kStudentTNuCap;
    double best_ll = t_loglik_std(u2, kStudentTNuCap);
    bool found = false;
    double prev_nu = grid_nu(0);
    double prev_score = t_score_std(u2, prev_nu);
    for (int i = 1; i <= kGrid; ++i) {
        const double nu = grid_nu(i);
        const double score = t_score_std(u2, nu);
        if (prev_score > 0.0 && score <= 0.0) {
            double lo = prev_nu, hi = nu;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (t_score_std(u2, mid) > 0.0 ? lo : hi) = mid;
            }
            const double root = 0.5 * (lo + hi);
            const double ll = t_loglik_std(u2, root);
            if (std::isfinite(ll) && (!found || ll > best_ll)) {
                best_ll = ll;
                best_nu = root;
                found = true;
            }
        }
        prev_nu = nu;
        prev_score = score;
    }
    if (!found || !std::isfinite(best_ll)) {
        params.nu = best_nu;
        throw StudentTFitError(params, "fit_student_t: profile likelihood has no interior maximum on (2, 200]");
    }
    params.nu = best_nu;
    return params;
}

RiskEstimate var_student_t(std::span<const double> x, RiskLevel alpha) {
    const auto params = fit_student_t(x);
    return make(Measure::var, Method::student_t, alpha, x.size(), student_t_var_capital(params, alpha.value()));
}

// ---------------------------------------------------------------------------
// GPD

double default_gpd_threshold(std::span<const double> x, double quantile) {
    return stats::type7_quantile(x, quantile);
}

GpdFit fit_gpd_pwm(std::span<const double> x, double u) {
    std::vector<double> y;
    for (double v : x)
        if (v < u) y.push_back(u - v);
    if (y.size() < 5) {
        fail(ErrorKind::insufficient_tail,
             "fit_gpd_pwm: need at least 5 observations below the threshold, got " + std::to_string(y.size()));
    }
    // Descending exceedances: the weight (i-1)/(k-1) then estimates E[Y (1 - F(Y))].
    std::sort(y.begin(), y.end(), std::greater<>());
    const double k = static_cast<double>(y.size());
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        b0 += y[i];
        b1 += y[i] * static_cast<double>(i) / (k - 1.0);
    }
    b0 /= k;
    b1 /= k;
    const double denom = b0 - 2.0 * b1;
    if (!(denom > 1e-14 * b0)) fail(ErrorKind::degenerate_fit, "fit_gpd_pwm: degenerate tail (b0 - 2 b1 <= 0)");
    GpdFit fit;
    fit.u = u;
    fit.xi = 2.0 - b0 / denom;
    fit.beta = 2.0 * b0 * b1 / denom;
    fit.k = y.size();
    fit.n = x.size();
    if (!(fit.beta > 0.0)) fail(ErrorKind::degenerate_fit, "fit_gpd_pwm: non-positive scale");
    return fit;
}

RiskEstimate var_gpd(std::span<const double> x, RiskLevel alpha, std::optional<double> u, double threshold_quantile) {
    require_size(x, 5, "var_gpd");
    const double threshold = u ? *u : default_gpd_threshold(x, threshold_quantile);
    const auto fit = fit_gpd_pwm(x, threshold);
    return make(Measure::var, Method::gpd, alpha, x.size(), gpd_var_capital(fit, alpha.value()));
}

// ---------------------------------------------------------------------------
// Kernel density

double default_kde_bandwidth(std::span<const double> x) {
    return 1.06 * stats::sample_sd(x) * std::pow(static_cast<double>(x.size()), -0.2);
}

double kde_quantile(std::span<const double> x, double p, Kernel kernel, double bandwidth) {
    if (x.empty()) fail(ErrorKind::size, "kde_quantile: empty sample");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) fail(ErrorKind::domain, "kde_quantile: bandwidth must be positive");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::domain, "kde_quantile: p must lie in (0,1)");

    auto kernel_cdf = [kernel](double t) {
        if (kernel == Kernel::gaussian) return 0.5 * std::erfc(-t / std::numbers::sqrt2);
        if (t <= -1.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return 0.5 + 0.75 * t - 0.25 * t * t * t;
    };
    auto mixture_cdf = [&](double q) {
        double s = 0.0;
        for (double v : x) s += kernel_cdf((q - v) / bandwidth);
        return s / static_cast<double>(x.size());
    };

    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    const double reach = (kernel == Kernel::gaussian ? 40.0 : 1.0) * bandwidth;
    double lo = *mn - reach, hi = *mx + reach;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (mixture_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RiskEstimate var_kde(std::span<const double> x, RiskLevel alpha, Kernel kernel, std::optional<double> bandwidth) {
    require_size(x, 10, "var_kde");
    if (bandwidth && !(*bandwidth > 0.0)) fail(ErrorKind::domain, "var_kde: bandwidth must be positive");
    const double h = bandwidth ? *bandwidth : default_kde_bandwidth(x);
    if (h == 0.0) return make(Measure::var, Method::kde, alpha, x.size(), -x[0]);  // constant sample
    return make(Measure::var, Method::kde, alpha, x.size(), -kde_quantile(x, alpha.value(), kernel, h));
}

// ---------------------------------------------------------------------------
// Expected shortfall

RiskEstimate es_empirical(std::span<const double> x, RiskLevel alpha) {
    const double var = var_empirical(x, alpha).capital;
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : x) {
        if (v + var < 0.0) {
            sum += v;
            ++count;
        }
    }
    if (count == 0) fail(ErrorKind::empty_tail, "es_empirical: no observation lies strictly below the empirical VaR");
    return make(Measure::es, Method::empirical, alpha, x.size(), -sum / static_cast<double>(count));
}

RiskEstimate es_gaussian(std::span<const double> x, RiskLevel alpha) {
    require_size(x, 2, "es_gaussian");
    const auto m = stats::sample_moments(x);
    return make(Measure::es, Method::gaussian, alpha, x.size(), gaussian_es_capital(m.mean, m.sd, alpha.value()));
}

RiskEstimate es_cornish_fisher(std::span<const double> x, RiskLevel alpha, std::size_t nodes) {
    require_size(x, 4, "es_cornish_fisher");
    const auto m = stats::sample_moments(x);
    const double c = cornish_fisher_tail_mean(alpha.value(), m.skewness, m.excess_kurtosis, nodes);
    return make(Measure::es, Method::cornish_fisher, alpha, x.size(), -(m.mean + m.sd * c));
}

RiskEstimate es_gpd(std::span<const double> x, RiskLevel alpha, std::optional<double> u, double threshold_quantile) {
    require_size(x, 5, "es_gpd");
    const double threshold = u ? *u : default_gpd_threshold(x, threshold_quantile);
    const auto fit = fit_gpd_pwm(x, threshold);
    const double var_emp = var_empirical(x, alpha).capital;
    return make(Measure::es, Method::gpd, alpha, x.size(), gpd_es_capital(var_emp, fit));
}

RiskEstimate es_gaussian_unbiased(std::span<const double> x, RiskLevel alpha, double a_n) {
    require_size(x, 2, "es_gaussian_unbiased");
    const auto m = stats::sample_moments(x);
    return make(Measure::es, Method::gaussian_unbiased, alpha, x.size(), gaussian_unbiased_es_capital(m.mean, m.sd, a_n));
}

RiskEstimate es_gaussian_unbiased(std::span<const double> x, RiskLevel alpha, const calibration::CalibrationTable& table) {
    const auto entry = table.find(x.size(), alpha.value());
    if (!entry) {
        fail(ErrorKind::calibration_missing, "no calibration entry for n=" + std::to_string(x.size()) +
                                                 ", alpha=" + std::to_string(alpha.value()) +
                                                 " (run `riskbench calibrate` or enable --auto-calibrate)");
    }
    return es_gaussian_unbiased(x, alpha, entry->a_n);
}

RiskEstimate mean_estimator(std::span<const double> x) {
    require_size(x, 1, "mean_estimator");
    const double capital = -stats::sample_mean(x);
    if (!std::isfinite(capital)) fail(ErrorKind::data, "mean_estimator: non-finite sample");
    return RiskEstimate{Measure::var, Method::mean, 1.0, x.size(), capital};
}

// ---------------------------------------------------------------------------

RiskEstimate estimate(Method method, Measure measure, std::span<const double> x, RiskLevel alpha,
                      const EstimatorOptions& options) {
    if (measure == Measure::var) {
        switch (method) {
            case Method::empirical: return var_empirical(x, alpha);
            case Method::empirical_simple: return var_empirical_simple(x, alpha);
            case Method::gaussian: return var_gaussian(x, alpha);
            case Method::cornish_fisher: return var_cornish_fisher(x, alpha);
            case Method::student_t: return var_student_t(x, alpha);
            case Method::gpd: return var_gpd(x, alpha, options.gpd_threshold, options.gpd_threshold_quantile);
            case Method::kde: return var_kde(x, alpha, options.kde_kernel, options.kde_bandwidth);
            case Method::gaussian_unbiased: return var_gaussian_unbiased(x, alpha);
            case Method::mean: {
                auto est = mean_estimator(x);
                est.alpha = alpha.value();
                return est;
            }
        }
    } else {
        switch (method) {
            case Method::empirical: return es_empirical(x, alpha);
            case Method::gaussian: return es_gaussian(x, alpha);
            case Method::cornish_fisher: return es_cornish_fisher(x, alpha);
            case Method::gpd: return es_gpd(x, alpha, options.gpd_threshold, options.gpd_threshold_quantile);
            case Method::gaussian_unbiased:
                if (!options.table) {
                    fail(ErrorKind::calibration_missing, "unbiased ES requires a calibration table for n=" +
                                                             std::to_string(x.size()));
                }
                return es_gaussian_unbiased(x, alpha, *options.table);
            case Method::mean: {
                auto est = mean_estimator(x);
                est.measure = Measure::es;
                est.alpha = alpha.value();
                return est;
            }
            default: break;
        }
    }
    fail(ErrorKind::configuration,
         "method " + std::string(to_string(method)) + " has no " + std::string(to_string(measure)) + " form");
}

}  // namespace riskbench::estimators
