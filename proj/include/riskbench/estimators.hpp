#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskbench/error.hpp"

namespace riskbench::calibration {
class CalibrationTable;
}

namespace riskbench::estimators {

/// Tail probability of a risk measure; always strictly inside (0, 1).
class RiskLevel {
public:
    explicit RiskLevel(double alpha);
    double value() const noexcept { return alpha_; }

private:
    double alpha_;
};

enum class Measure { var, es };

enum class Method {
    empirical,
    empirical_simple,
    gaussian,
    cornish_fisher,
    student_t,
    gpd,
    kde,
    gaussian_unbiased,
    mean,
};

enum class Kernel { gaussian, epanechnikov };

std::string_view to_string(Measure measure);
std::string_view to_string(Method method);
std::string_view short_tag(Method method);
/// Accepts full names ("gaussian_unbiased") and short tags ("u", "emp", "norm", "cf", ...).
Method parse_method(std::string_view tag);
Measure parse_measure(std::string_view tag);
std::vector<Method> parse_method_list(std::string_view csv);
/// Human-readable list of accepted tags, for usage errors.
std::string method_tag_help();
bool supports_es(Method method);

struct RiskEstimate {
    Measure measure = Measure::var;
    Method method = Method::empirical;
    double alpha = 0.0;  // 1.0 for the mean estimator
    std::size_t n = 0;
    double capital = 0.0;
};

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;  // standard deviation, not variance
};

struct StudentTParams {
    double mu = 0.0;
    double sigma = 1.0;  // standard deviation of the fitted law
    double nu = 200.0;
};

struct GpdFit {
    double u = 0.0;     // threshold in return units; exceedances lie strictly below
    double xi = 0.0;
    double beta = 1.0;
    std::size_t k = 0;  // observations below u
    std::size_t n = 0;
};

struct CornishFisherAdjustment {
    double z_cf = 0.0;
    double base_z = 0.0;
    double skew = 0.0;
    double excess_kurtosis = 0.0;
};

inline constexpr double kDefaultGpdThresholdQuantile = 0.3;
inline constexpr double kStudentTNuCap = 200.0;
inline constexpr std::size_t kCornishFisherEsNodes = 512;

// Closed-form capital formulas, shared by the sample-based estimators below and
// by the Monte-Carlo routines that simulate sufficient statistics directly.
double gaussian_var_capital(double mean, double sd, double alpha);
double gaussian_unbiased_var_capital(double mean, double sd, std::size_t n, double alpha);
double gaussian_es_capital(double mean, double sd, double alpha);
/// capital = -mean - sd * a_n with a_n < 0 from the calibration.
double gaussian_unbiased_es_capital(double mean, double sd, double a_n);
double student_t_var_capital(const StudentTParams& params, double alpha);
double gpd_var_capital(const GpdFit& fit, double alpha);
double gpd_es_capital(double empirical_var, const GpdFit& fit);
/// Tail average of Cornish-Fisher quantiles over (0, alpha); midpoint rule after p = alpha u^3.
double cornish_fisher_tail_mean(double alpha, double skew, double excess_kurtosis,
                                std::size_t nodes = kCornishFisherEsNodes);

CornishFisherAdjustment cornish_fisher_z(RiskLevel alpha, double skew, double excess_kurtosis);

RiskEstimate var_empirical(std::span<const double> x, RiskLevel alpha);
RiskEstimate var_empirical_simple(std::span<const double> x, RiskLevel alpha);
RiskEstimate var_gaussian(std::span<const double> x, RiskLevel alpha);
RiskEstimate var_gaussian_unbiased(std::span<const double> x, RiskLevel alpha);
RiskEstimate var_cornish_fisher(std::span<const double> x, RiskLevel alpha);

/// Raised when the likelihood search over nu fails; carries the best candidate seen.
class StudentTFitError : public Error {
public:
    StudentTFitError(const StudentTParams& best, const std::string& what)
        : Error(ErrorKind::estimation, what), best_(best) {}
    const StudentTParams& best() const noexcept { return best_; }

private:
    StudentTParams best_;
};

StudentTParams fit_student_t(std::span<const double> x);
/// Profile log-likelihood of the location-scale t with the given mean and sd.
double student_t_profile_loglik(std::span<const double> x, double mu, double sigma, double nu);
RiskEstimate var_student_t(std::span<const double> x, RiskLevel alpha);

GpdFit fit_gpd_pwm(std::span<const double> x, double u);
double default_gpd_threshold(std::span<const double> x, double quantile = kDefaultGpdThresholdQuantile);
RiskEstimate var_gpd(std::span<const double> x, RiskLevel alpha, std::optional<double> u = std::nullopt,
                     double threshold_quantile = kDefaultGpdThresholdQuantile);

double default_kde_bandwidth(std::span<const double> x);
/// Lower p-quantile of the kernel density estimate; works for any n >= 1.
double kde_quantile(std::span<const double> x, double p, Kernel kernel, double bandwidth);
RiskEstimate var_kde(std::span<const double> x, RiskLevel alpha, Kernel kernel = Kernel::gaussian,
                     std::optional<double> bandwidth = std::nullopt);

RiskEstimate es_empirical(std::span<const double> x, RiskLevel alpha);
RiskEstimate es_gaussian(std::span<const double> x, RiskLevel alpha);
RiskEstimate es_cornish_fisher(std::span<const double> x, RiskLevel alpha,
                               std::size_t nodes = kCornishFisherEsNodes);
RiskEstimate es_gpd(std::span<const double> x, RiskLevel alpha, std::optional<double> u = std::nullopt,
                    double threshold_quantile = kDefaultGpdThresholdQuantile);
RiskEstimate es_gaussian_unbiased(std::span<const double> x, RiskLevel alpha,
                                  const calibration::CalibrationTable& table);
RiskEstimate es_gaussian_unbiased(std::span<const double> x, RiskLevel alpha, double a_n);

RiskEstimate mean_estimator(std::span<const double> x);

struct EstimatorOptions {
    double gpd_threshold_quantile = kDefaultGpdThresholdQuantile;
    std::optional<double> gpd_threshold;
    Kernel kde_kernel = Kernel::gaussian;
    std::optional<double> kde_bandwidth;
    const calibration::CalibrationTable* table = nullptr;
};

/// Dispatch by (method, measure). Throws configuration errors for pairs with no ES form.
RiskEstimate estimate(Method method, Measure measure, std::span<const double> x, RiskLevel alpha,
                      const EstimatorOptions& options = {});

}  // namespace riskbench::estimators
