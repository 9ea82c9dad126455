#include <gtest/gtest.h>

#include <cmath>

#include "oscs/experiments.hpp"
#include "oscs/model.hpp"

using namespace oscs;

TEST(GaussianShape, FourierClosedForm) {
    GaussianShape g{1.3, 0.4, 0.8};
    for (double xi : {-2.0, 0.0, 1.1}) {
        const cplx expect = 1.3 * 0.8 * std::exp(-0.64 * xi * xi / 2) * std::exp(-I * xi * 0.4);
        EXPECT_NEAR(std::abs(g.fourier(xi) - expect), 0.0, 1e-14);
    }
}

TEST(GaussianShape, DerivativesMatchDifferences) {
    GaussianShape g{1.0, 0.2, 1.1};
    const double h = 1e-4, x = 0.7;
    for (int j = 0; j < 4; ++j)
        EXPECT_NEAR(g.deriv(j + 1, x), (g.deriv(j, x + h) - g.deriv(j, x - h)) / (2 * h), 1e-7) << j;
    for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(std::abs(g.fourier_deriv(j + 1, x) - (g.fourier_deriv(j, x + h) - g.fourier_deriv(j, x - h)) / (2 * h)),
                    0.0, 1e-7);
}

TEST(Coupling, DirectMatchesFourier) {
    ModelParams p;
    const auto V = PotentialSpec::gaussian(0.7, 0.1, 0.9);
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 4; ++m)
            for (double R : {0.8, 1.0, 1.13})
                EXPECT_NEAR(coupling_matrix(n, m, R, p, V), coupling_matrix_fourier(n, m, R, p, V), 1e-12);
}

TEST(Coupling, TableSymmetricAndConsistent) {
    const auto V = PotentialSpec::gaussian();
    const rvec X{-1.0, 0.0, 2.5};
    const int nm = 5, M = nm + 1;
    const rvec T = coupling_table(nm, X, V);
    for (std::size_t q = 0; q < X.size(); ++q)
        for (int n = 0; n < M; ++n)
            for (int m = 0; m < M; ++m) {
                EXPECT_NEAR(T[q * M * M + n * M + m], T[q * M * M + m * M + n], 1e-15);
                EXPECT_NEAR(T[q * M * M + n * M + m], coupling_value(n, m, X[q], V), 1e-13);
            }
}

TEST(Coupling, ZeroPotential) { EXPECT_EQ(coupling_value(1, 2, 0.3, PotentialSpec::zero()), 0.0); }

TEST(Alpha, ClosedFormOverlap) {
    // <psi_-, psi_+> = exp(-(R0/eps)^2/w^2 - v0^2 w^2/eps^2) for Gaussian eta
    EnvelopeSpec eta{1.0};
    ModelParams p;
    p.eps = 0.5;
    p.R0 = 0.5;
    const double c = std::exp(-1.0 - 4.0);
    EXPECT_NEAR(alpha_epsilon(p, eta), 1.0 / std::sqrt(2 + 2 * c), 1e-12);
    p.eps = 0.1;
    EXPECT_NEAR(alpha_epsilon(p, eta), std::sqrt(0.5), 1e-15);
}

TEST(Scenario, ImpactTimeAndStationarity) {
    ModelParams p = default_params(StudyCase::stationary);
    EXPECT_DOUBLE_EQ(impact_time(p), 0.5);
    EXPECT_TRUE(is_stationary(p));
    p = default_params(StudyCase::nonstationary);
    EXPECT_FALSE(is_stationary(p));
    p.sigma = -1;
    EXPECT_TRUE(is_stationary(p));
}

TEST(Scenario, ValidateRejects) {
    ModelParams p;
    p.eps = -0.1;
    EXPECT_THROW(p.validate(), ConfigError);
    p = ModelParams{};
    p.sigma = 0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(WeightedNorm, GaussianL2) {
    // k = 0, p = 2: plain L2 norm, sqrt(sqrt(pi) w) A for A exp(-x^2/(2w^2))
    GaussianShape g{2.0, 0.0, 0.7};
    DerivFn f = [g](int j, double x) { return cplx(g.deriv(j, x)); };
    EXPECT_NEAR(weighted_norm(f, 0, 2), 2.0 * std::sqrt(std::sqrt(pi) * 0.7), 1e-10);
    // p = inf with k = 0 is the peak
    EXPECT_NEAR(weighted_norm(f, 0, 0), 2.0, 1e-10);
    // p = 1, k = 0: A w sqrt(2 pi)
    EXPECT_NEAR(weighted_norm(f, 0, 1), 2.0 * 0.7 * std::sqrt(2 * pi), 1e-8);
}

TEST(WeightedNorm, HypothesesFinite) {
    const auto h = hypothesis_norms(PotentialSpec::gaussian(), EnvelopeSpec{}, 2);
    EXPECT_TRUE(std::isfinite(h.V_k1_1) && h.V_k1_1 > 0);
    EXPECT_TRUE(std::isfinite(h.Vbr2_k2_1) && h.Vbr2_k2_1 > h.V_k1_1);
    EXPECT_TRUE(std::isfinite(h.Vhatbr2_k2_1));
    EXPECT_TRUE(std::isfinite(h.eta_k2_2));
}

TEST(WavePacket, UnitNorm) {
    ModelParams p;
    const SpatialGrid g = scenario_grid(p);
    const cvec f = wave_packet(g, p.eps, p.v0, 1, p.R0, EnvelopeSpec{});
    double s = 0.0;
    for (const auto& v : f) s += std::norm(v) * g.dx();
    EXPECT_NEAR(s, 1.0, 1e-12);
}
