#include "riskbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "riskbench/error.hpp"

namespace riskbench::stats {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    // Mix the stream id through its own SplitMix pass so neighbouring ids land far apart.
    std::uint64_t s = stream_id;
    std::uint64_t mixed = seed ^ splitmix64(s);
    for (auto& word : state_) word = splitmix64(mixed);
    if (std::all_of(state_.begin(), state_.end(), [](auto w) { return w == 0; })) state_[0] = 1;
}

std::uint64_t SeededRng::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double SeededRng::uniform() noexcept {
    // 53 random bits, shifted by half an ulp so that 0 is never produced.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::standard_normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double SeededRng::gamma(double shape) noexcept {
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double gaussian_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double gaussian_cdf(double z) {
    if (!std::isfinite(z)) fail(ErrorKind::domain, "gaussian_cdf: argument must be finite");
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double gaussian_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::domain, "gaussian_quantile: p must lie in (0,1)");

    // Acklam's rational initializer.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step; the error is evaluated on the smaller tail to keep relative accuracy.
    const double e = (p < 0.5) ? gaussian_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::domain, "student_t_quantile: p must lie in (0,1)");
    if (!(df > 0.0) || !std::isfinite(df)) fail(ErrorKind::domain, "student_t_quantile: df must be positive");
    if (p == 0.5) return 0.0;
    // Antisymmetry is enforced explicitly: evaluate on the lower half only.
    const boost::math::students_t_distribution<double> dist(df);
    if (p > 0.5) return -boost::math::quantile(dist, 1.0 - p);
    return boost::math::quantile(dist, p);
}

namespace {

void require_finite(std::span<const double> x, const char* who) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            fail(ErrorKind::data, std::string(who) + ": non-finite entry at index " + std::to_string(i));
        }
    }
}

}  // namespace

double sample_mean(std::span<const double> x) {
    if (x.empty()) fail(ErrorKind::size, "sample_mean: empty sample");
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) fail(ErrorKind::size, "sample_sd: need at least 2 observations");
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
    const double mean = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

MomentSummary sample_moments(std::span<const double> x) {
    if (x.size() < 2) fail(ErrorKind::size, "sample_moments: need at least 2 observations");
    require_finite(x, "sample_moments");

    const double n = static_cast<double>(x.size());
    const double mean = sample_mean(x);
    MomentSummary out;
    out.n = x.size();
    out.kurtosis_reliable = x.size() >= 4;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
        out.mean = x[0];
        return out;
    }
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    out.mean = mean;
    out.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

double type7_quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) fail(ErrorKind::size, "type7_quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::domain, "type7_quantile: p must lie in [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1) + 1.0;
    const double fl = std::floor(h);
    const auto lo = static_cast<std::size_t>(fl);  // 1-based
    if (lo >= n) return sorted[n - 1];
    const double frac = h - fl;
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double type7_quantile(std::span<const double> x, double p) {
    if (x.empty()) fail(ErrorKind::size, "type7_quantile: empty sample");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return type7_quantile_sorted(sorted, p);
}

std::vector<double> draw_gaussian(SeededRng& rng, std::size_t count, double mu, double sigma) {
    if (!(sigma >= 0.0)) fail(ErrorKind::domain, "draw_gaussian: sigma must be non-negative");
    std::vector<double> out(count);
    for (auto& v : out) v = mu + sigma * rng.standard_normal();
    return out;
}

double draw_chi(SeededRng& rng, double df) {
    if (!(df > 0.0)) fail(ErrorKind::domain, "draw_chi: df must be positive");
    return std::sqrt(2.0 * rng.gamma(0.5 * df));
}

PivotalPair draw_pivotal_pair(SeededRng& rng, std::size_t n) {
    if (n < 2) fail(ErrorKind::size, "draw_pivotal_pair: window size must be at least 2");
    PivotalPair pair;
    pair.z = rng.standard_normal();
    pair.v = draw_chi(rng, static_cast<double>(n - 1));
    return pair;
}

}  // namespace riskbench::stats
