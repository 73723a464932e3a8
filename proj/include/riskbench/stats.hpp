#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace riskbench::stats {

/// Splittable pseudo-random source. The state is derived from (seed, stream_id)
/// with SplitMix64 and advanced by xoshiro256**; distinct stream ids give
/// independent streams, identical pairs give identical sequences on every platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double standard_normal() noexcept;
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::array<std::uint64_t, 4> state_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // divisor n - 1
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool kurtosis_reliable = false;  // false when n < 4
};

double gaussian_pdf(double z);
/// Standard normal CDF, absolute error below 1e-12.
double gaussian_cdf(double z);
double gaussian_quantile(double p);
double student_t_quantile(double p, double df);

MomentSummary sample_moments(std::span<const double> x);
double sample_mean(std::span<const double> x);
/// Standard deviation with divisor n - 1.
double sample_sd(std::span<const double> x);

/// Interpolated order statistic with h = p(n-1)+1 (R/S default).
double type7_quantile(std::span<const double> x, double p);
/// Same, on data already sorted ascending.
double type7_quantile_sorted(std::span<const double> sorted, double p);

std::vector<double> draw_gaussian(SeededRng& rng, std::size_t count, double mu, double sigma);

struct PivotalPair {
    double z = 0.0;
    double v = 0.0;
};

/// Square root of a chi-square variate with `df` degrees of freedom.
double draw_chi(SeededRng& rng, double df);

/// Independent Z ~ N(0,1) and V ~ chi_{n-1}.
PivotalPair draw_pivotal_pair(SeededRng& rng, std::size_t n);

}  // namespace riskbench::stats
