#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskbench/estimators.hpp"

namespace riskbench::calibration {

struct PivotalDraw {
    double z = 0.0;
    double v = 0.0;
};

/// One solution (a_n, b_n) of the unbiased-ES condition ES_alpha(Z + b V_n) = 0.
struct CalibrationEntry {
    std::size_t n = 0;
    double alpha = 0.0;
    double b_n = 0.0;
    double a_n = 0.0;  // -b_n * sqrt((n-1)(n+1)/n)
    std::size_t mc_samples = 0;
    std::uint64_t seed = 0;
    double residual = 0.0;

    friend bool operator==(const CalibrationEntry&, const CalibrationEntry&) = default;
};

double a_from_b(double b_n, std::size_t n);

inline constexpr int kCalibrationTableVersion = 1;

class CalibrationTable {
public:
    using Key = std::pair<std::size_t, std::int64_t>;

    static std::int64_t alpha_key(double alpha);

    /// Exact-match lookup; alpha is quantized at 1e-6.
    std::optional<CalibrationEntry> find(std::size_t n, double alpha) const;
    /// Inserts or replaces the entry for (n, alpha).
    void insert(const CalibrationEntry& entry);
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::vector<CalibrationEntry> entries() const;

    std::string to_json() const;
    static CalibrationTable from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static CalibrationTable load(const std::filesystem::path& path);

private:
    std::map<Key, CalibrationEntry> entries_;
};

/// Negative mean of the ceil(alpha * m) smallest values.
double empirical_es(std::span<const double> values, double alpha);

/// Number of order statistics used by empirical_es for a sample of size m.
std::size_t tail_count(std::size_t m, double alpha);

inline constexpr std::size_t kDefaultCalibrationSamples = 10'000'000;
inline constexpr double kDefaultCalibrationTolerance = 1e-4;

std::vector<PivotalDraw> draw_pivotal_sample(std::size_t n, std::size_t count, std::uint64_t seed);

/// g(b) = empirical ES of {z_i + b v_i}; non-increasing in b.
double pivotal_es(std::span<const PivotalDraw> draws, double b, double alpha);

CalibrationEntry solve_unbiased_es_constant(std::size_t n, estimators::RiskLevel alpha,
                                            std::size_t mc_samples = kDefaultCalibrationSamples,
                                            std::uint64_t seed = 42,
                                            double tolerance = kDefaultCalibrationTolerance);

struct PivotalityResult {
    double frequency = 0.0;        // share of trials with x_out + capital < 0
    double standard_error = 0.0;   // sqrt(p(1-p)/trials) at the observed frequency
    double conditional_probability = 0.0;  // mean of P[x_out + capital < 0 | window]
    std::size_t trials = 0;
};

/// Simulates i.i.d. Gaussian windows plus one out-of-sample draw and measures how
/// often the secured position is negative.
PivotalityResult pivotality_check(estimators::Method method, std::size_t n, estimators::RiskLevel alpha,
                                  std::size_t trials, std::uint64_t seed, const estimators::GaussianParams& params,
                                  estimators::Measure measure = estimators::Measure::var,
                                  const estimators::EstimatorOptions& options = {});

/// Empirical ES of the simulated secured positions x_out + capital.
double secured_position_es(estimators::Method method, std::size_t n, estimators::RiskLevel alpha,
                           std::size_t trials, std::uint64_t seed, const estimators::GaussianParams& params,
                           estimators::Measure measure = estimators::Measure::es,
                           const estimators::EstimatorOptions& options = {});

}  // namespace riskbench::calibration
