#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "riskbench/calibration.hpp"
#include "riskbench/error.hpp"
#include "riskbench/estimators.hpp"

using namespace riskbench;
using namespace riskbench::calibration;
using estimators::GaussianParams;
using estimators::Measure;
using estimators::Method;
using estimators::RiskLevel;

TEST(EmpiricalEs, HandValues) {
    EXPECT_DOUBLE_EQ(empirical_es(std::vector<double>{-4, -2, 0, 2}, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(empirical_es(std::vector<double>(13, 0.7), 0.1), -0.7);
    std::vector<double> x(100);
    std::iota(x.begin(), x.end(), 1.0);
    EXPECT_DOUBLE_EQ(empirical_es(x, 0.05), -3.0);
    EXPECT_THROW(empirical_es(std::vector<double>{}, 0.1), Error);
}

TEST(EmpiricalEs, TailCountIsCeiling) {
    EXPECT_EQ(tail_count(100, 0.05), 5u);
    EXPECT_EQ(tail_count(10'000'000, 0.1), 1'000'000u);
    EXPECT_EQ(tail_count(101, 0.05), 6u);
    EXPECT_EQ(tail_count(3, 0.01), 1u);
}

TEST(Solver, GIsMonotoneOnFixedSample) {
    const auto draws = draw_pivotal_sample(50, 200000, 42);
    double prev = INFINITY;
    for (double b = 0.0; b <= 1.0; b += 0.01) {
        const double g = pivotal_es(draws, b, 0.1);
        EXPECT_LE(g, prev);
        prev = g;
    }
}

TEST(Solver, MatchesQuadratureOracle) {
    const double b_oracle = oracle::unbiased_es_b(50, 0.10);
    EXPECT_NEAR(oracle::a_from_b(b_oracle, 50), -1.81033, 0.002);
    const auto e = solve_unbiased_es_constant(50, RiskLevel(0.10), 2'000'000, 7);
    EXPECT_GT(e.b_n, 0.0);
    EXPECT_LT(e.a_n, 0.0);
    EXPECT_NEAR(e.a_n * std::sqrt(50.0 / (49.0 * 51.0)) + e.b_n, 0.0, 1e-12);
    EXPECT_LE(e.residual, kDefaultCalibrationTolerance);
    EXPECT_NEAR(e.a_n, oracle::a_from_b(b_oracle, 50), 0.006);
}

TEST(Solver, LevelNearOneCollapses) {
    const auto e = solve_unbiased_es_constant(50, RiskLevel(0.999999), 100000, 3);
    EXPECT_LT(std::abs(e.b_n), 0.01);
}

TEST(Solver, LargeWindowApproachesGaussianConstant) {
    const auto e = solve_unbiased_es_constant(10000, RiskLevel(0.10), 10'000'000, 42);
    EXPECT_NEAR(e.a_n, -1.755, 0.01);
}

TEST(Solver, IncreasesTowardGaussianConstant) {
    double prev = -INFINITY;
    for (std::size_t n : {10u, 50u, 200u, 10000u}) {
        const auto e = solve_unbiased_es_constant(n, RiskLevel(0.10), 4'000'000, 11);
        EXPECT_GT(e.a_n, prev) << n;
        EXPECT_LT(e.a_n, -1.754983) << n;
        prev = e.a_n;
    }
}

TEST(Solver, Determinism) {
    const auto a = solve_unbiased_es_constant(20, RiskLevel(0.05), 100000, 99);
    const auto b = solve_unbiased_es_constant(20, RiskLevel(0.05), 100000, 99);
    EXPECT_EQ(a, b);
}

TEST(Solver, RejectsSmallSamples) {
    EXPECT_THROW(solve_unbiased_es_constant(50, RiskLevel(0.1), 99999, 1), Error);
    EXPECT_THROW(solve_unbiased_es_constant(1, RiskLevel(0.1), 100000, 1), Error);
}

TEST(Table, LookupQuantization) {
    CalibrationTable t;
    t.insert({50, 0.1, 0.25, a_from_b(0.25, 50), 10, 1, 0.0});
    EXPECT_TRUE(t.find(50, 0.1000000001));
    EXPECT_FALSE(t.find(50, 0.1001));
    EXPECT_FALSE(t.find(51, 0.1));
    t.insert({50, 0.1, 0.26, a_from_b(0.26, 50), 10, 1, 0.0});
    EXPECT_EQ(t.size(), 1u);
    EXPECT_DOUBLE_EQ(t.find(50, 0.1)->b_n, 0.26);
}

TEST(Table, RoundTrip) {
    CalibrationTable t;
    t.insert(solve_unbiased_es_constant(50, RiskLevel(0.10), 100000, 5));
    t.insert(solve_unbiased_es_constant(25, RiskLevel(0.025), 100000, 6));
    t.insert({7, 1.0 / 3.0, 0.1 + 0.2, a_from_b(0.3, 7), 123, 9, 1e-17});
    const auto path = std::filesystem::temp_directory_path() / "riskbench_table_roundtrip.json";
    t.save(path);
    const auto back = CalibrationTable::load(path);
    EXPECT_EQ(back.entries(), t.entries());
    EXPECT_EQ(back.to_json(), t.to_json());
    std::filesystem::remove(path);
}

TEST(Table, RejectsBadDocuments) {
    EXPECT_THROW(CalibrationTable::from_json("not json"), Error);
    EXPECT_THROW(CalibrationTable::from_json(R"({"version": 99, "entries": []})"), Error);
    EXPECT_THROW(CalibrationTable::load("/nonexistent/table.json"), Error);
}

TEST(Pivotality, UnbiasedVarOnParameterGrid) {
    for (double mu : {-1.0, 0.0, 2.5}) {
        for (double sigma : {0.01, 1.0, 30.0}) {
            const auto r = pivotality_check(Method::gaussian_unbiased, 50, RiskLevel(0.05), 1'000'000, 1, {mu, sigma});
            EXPECT_NEAR(r.frequency, 0.05, 3 * r.standard_error) << mu << " " << sigma;
            const auto g = pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 1'000'000, 1, {mu, sigma});
            EXPECT_GT(g.frequency, 0.05 + 3 * g.standard_error) << mu << " " << sigma;
        }
    }
}

TEST(Pivotality, ScaleInvariantFrequency) {
    const auto a = pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 200000, 4, {0.0, 1.0});
    const auto b = pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 200000, 4, {0.0, 10.0});
    EXPECT_NEAR(a.frequency, b.frequency, 3 * a.standard_error);
}

TEST(Pivotality, ConditionalProbabilityMatchesTOracle) {
    // P[X_{n+1} + gaussian VaR < 0] = F_{t,n-1}(z_alpha sqrt(n/(n+1))).
    const double expected = oracle::t_cdf(-1.6448536269514722 * std::sqrt(50.0 / 51.0), 49);
    const auto r = pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 400000, 8, {0.0, 1.0});
    EXPECT_NEAR(r.conditional_probability, expected, 2e-4);
}

TEST(Pivotality, SampleBasedMethodsAndErrors) {
    const auto r = pivotality_check(Method::empirical_simple, 50, RiskLevel(0.05), 20000, 2, {0.0, 1.0});
    // Exact exceedance law of the (floor(n alpha)+1)-th order statistic: 3/51.
    EXPECT_NEAR(r.frequency, 3.0 / 51.0, 4 * r.standard_error);
    EXPECT_THROW(pivotality_check(Method::gaussian, 50, RiskLevel(0.05), 9999, 1, {0.0, 1.0}), Error);
}

TEST(SecuredPosition, UnbiasedEsIsAcceptable) {
    CalibrationTable table;
    table.insert(solve_unbiased_es_constant(50, RiskLevel(0.10), 10'000'000, 42));
    estimators::EstimatorOptions opts;
    opts.table = &table;
    const double u = secured_position_es(Method::gaussian_unbiased, 50, RiskLevel(0.10), 1'000'000, 3, {0.0, 1.0},
                                         Measure::es, opts);
    EXPECT_NEAR(u, 0.0, 0.01);
    const double g = secured_position_es(Method::gaussian, 50, RiskLevel(0.10), 1'000'000, 3, {0.0, 1.0});
    EXPECT_GT(g, 0.01);
}

TEST(SecuredPosition, MeanEstimatorNearLevelOne) {
    const double r =
        secured_position_es(Method::mean, 50, RiskLevel(0.999999), 200000, 5, {0.3, 2.0}, Measure::var);
    EXPECT_NEAR(r, 0.0, 0.015);
}
