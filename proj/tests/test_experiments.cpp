#include <gtest/gtest.h>

#include <cmath>

#include "oscs/check_suite.hpp"
#include "oscs/experiments.hpp"
#include "oscs/report_io.hpp"

using namespace oscs;

TEST(SlopeFit, ExactPowerLaw) {
    const rvec eps{0.2, 0.1, 0.05, 0.025};
    rvec err;
    for (double e : eps) err.push_back(3.0 * e * e);
    const auto f = fit_loglog(eps, err);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_LT(f.ci95, 1e-10);
}

TEST(SlopeFit, ConfidenceBandStudentT) {
    // residuals +d, -d, +d, -d on log err with log eps spaced by log 2
    const rvec eps{0.2, 0.1, 0.05, 0.025};
    const double d = 0.05;
    rvec err;
    for (std::size_t i = 0; i < eps.size(); ++i) err.push_back(eps[i] * std::exp(i % 2 ? -d : d));
    const auto f = fit_loglog(eps, err);
    double sxx = 0.0, xm = 0.0;
    for (double e : eps) xm += std::log(e) / 4;
    for (double e : eps) sxx += std::pow(std::log(e) - xm, 2);
    double sse = 0.0;
    for (double r : f.residuals) sse += r * r;
    const double se = std::sqrt(sse / 2 / sxx);
    EXPECT_NEAR(f.slope_stderr, se, 1e-12);
    EXPECT_NEAR(f.ci95, 4.302652729749464 * se, 1e-9);  // t_{0.975, 2}
    EXPECT_THROW(fit_loglog({0.1, 0.05}, {1.0, 0.5}), std::invalid_argument);
}

TEST(Monotone, FloorIgnoresNoise) {
    EXPECT_TRUE(shrinks_with_eps({0.2, 0.1, 0.05}, {1e-2, 1e-3, 1e-4}));
    EXPECT_FALSE(shrinks_with_eps({0.2, 0.1, 0.05}, {1e-2, 1e-3, 2e-3}));
    EXPECT_TRUE(shrinks_with_eps({0.2, 0.1, 0.05, 0.025}, {1e-3, 1e-16, 2e-16, 0.0}));
    EXPECT_TRUE(shrinks_with_eps({0.05, 0.2, 0.1}, {1e-4, 1e-2, 1e-3}));  // order of the list does not matter
}

TEST(Study, GridBudgetEnforced) {
    StudyConfig sc;
    sc.params = default_params(StudyCase::stationary, 0.01);
    sc.max_grid_points = 1 << 12;
    EXPECT_THROW(study_grid(sc, sc.params), ConfigError);
    EXPECT_THROW(convergence_study(StudyCase::stationary, 1, {0.1, 0.05, 0.01}, sc), ConfigError);
}

TEST(Study, CaseNames) {
    EXPECT_EQ(study_case_from(to_string(StudyCase::nonstationary)), StudyCase::nonstationary);
    EXPECT_THROW(study_case_from("sideways"), ConfigError);
}

TEST(Study, ApplicationRatios) {
    StudyConfig sc;
    const auto r = application_run({0.1}, sc);
    ASSERT_EQ(r.application.size(), 1u);
    const auto& a = r.application[0];
    EXPECT_NEAR(a.alpha, std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(a.ratio0, 0.5, 0.01);
    EXPECT_NEAR(a.ratio1, 1.0, 1e-6);
    EXPECT_NEAR(a.p1 / a.p1_predicted, 1.0, 0.05);
    EXPECT_LT(a.norm_drift, 1e-10);
}

TEST(Lemma, ZetaUnitNorm) {
    LemmaOptions o;
    const cvec z = lemma_zeta({0.7, 2.1}, {0.4, -1.2, 2.5}, o);
    const double dy = 2 * o.grid_half_width / (o.grid_points - 1);  // both end points are on the grid
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v) * dy;
    EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(Lemma, FiniteDifferencesMatchExact) {
    LemmaOptions o;
    const rvec t{0.7, 2.1}, xi{0.4, -1.2, 2.5};
    for (const std::vector<int>& a : {std::vector<int>{1, 0, 0}, {0, 1, 0}, {0, 0, 2}, {1, 1, 0}}) {
        const double fd = lemma_derivative_norm_fd(t, xi, a, o), ex = lemma_derivative_norm_exact(t, xi, a, o);
        EXPECT_LT(std::abs(fd - ex), 1e-5 * ex);
    }
}

TEST(Lemma, LastFactorDerivativeIsPositionMoment) {
    // d/dxi_3 only brings down -i y, so the norm is ||y zeta||, independent of xi_3
    LemmaOptions o;
    const double a = lemma_derivative_norm_exact({0.7, 2.1}, {0.4, -1.2, 2.5}, {0, 0, 1}, o);
    const double b = lemma_derivative_norm_exact({0.7, 2.1}, {0.4, -1.2, -0.3}, {0, 0, 1}, o);
    EXPECT_NEAR(a, b, 1e-12);
}

TEST(Checks, Relations) {
    EXPECT_TRUE(make_check("a", 1.0, "<", 2.0).pass);
    EXPECT_FALSE(make_check("a", 2.0, "<", 2.0).pass);
    EXPECT_TRUE(make_check("a", 2.0, "<=", 2.0).pass);
    EXPECT_TRUE(make_check("a", 3.0, ">", 2.0).pass);
    EXPECT_FALSE(make_check("a", std::nan(""), "<", 2.0).pass);
    EXPECT_THROW(make_check("a", 1.0, "~", 2.0), std::invalid_argument);
}

TEST(ReportIo, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ReportIo, CsvFormatting) {
    CsvTable t({"a", "b", "c"});
    t.add_row({0.1, 3L, std::string("x")});
    EXPECT_EQ(t.str(), "a,b,c\n0.10000000000000001,3,x\n");
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}
