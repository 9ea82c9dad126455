#include <gtest/gtest.h>

#include <cmath>

#include <gsl/gsl_sf_dawson.h>

#include "oscs/spectral.hpp"

using namespace oscs;

TEST(Grid, CoveringIsPowerOfTwo) {
    const auto g = SpatialGrid::covering(-3.0, 5.0, 0.013);
    EXPECT_EQ(g.n & (g.n - 1), 0);
    EXPECT_LE(g.dx(), 0.013);
    EXPECT_DOUBLE_EQ(g.lo, -3.0);
    EXPECT_GE(g.lo + g.length, 5.0);
}

TEST(Fft, RoundTrip) {
    const int n = 256;
    cvec v(n);
    for (int j = 0; j < n; ++j) v[j] = cplx(std::sin(0.3 * j), std::cos(0.11 * j * j));
    cvec w = v;
    fft_for(n).forward(w);
    fft_for(n).inverse(w);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(std::abs(w[j] - v[j]), 0.0, 1e-13);
}

TEST(FreePropagation, MatchesClosedForm) {
    const double eps = 0.1, k0 = 1.0 / (eps * eps), s = 0.1;
    const auto g = SpatialGrid::covering(-1.0, 3.0, 2 * pi * eps * eps / 10);
    const cvec f0 = free_gaussian_packet(g, 0.0, eps, k0, 0.5, s);
    const cvec f1 = free_propagate(g, f0, 1.0, eps);
    const cvec ex = free_gaussian_packet(g, 1.0, eps, k0, 0.5, s);
    double d = 0.0;
    for (int j = 0; j < g.n; ++j) d += std::norm(f1[j] - ex[j]) * g.dx();
    EXPECT_LT(std::sqrt(d), 1e-10);
    EXPECT_NEAR(l2_norm(f0, g.dx()), 1.0, 1e-12);
}

TEST(PrincipalValue, GaussianAgainstDawson) {
    // PV int exp(-x^2)/(x - x0) dx = -2 sqrt(pi) F(x0)
    for (double x0 : {-1.3, 0.0, 0.4, 2.2}) {
        const cplx v = pv_integral([](double x) { return cplx(std::exp(-x * x)); }, x0, 0.5);
        EXPECT_NEAR(v.real(), -2 * std::sqrt(pi) * gsl_sf_dawson(x0), 1e-9) << x0;
        EXPECT_NEAR(v.imag(), 0.0, 1e-14);
    }
}

TEST(PrincipalValue, ComplexShifted) {
    // scaling and a complex factor pass straight through
    const double x0 = 0.7;
    const cplx c(0.3, -1.2);
    const cplx v = pv_integral([c](double x) { return c * std::exp(-(x - 1) * (x - 1)); }, x0, 0.25);
    EXPECT_NEAR(std::abs(v - c * (-2 * std::sqrt(pi) * gsl_sf_dawson(x0 - 1))), 0.0, 1e-9);
}

TEST(Quadrature, GaussLegendreExactness) {
    const auto& r = gauss_legendre(16);
    for (int p = 0; p <= 31; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
        EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
    }
}

TEST(Quadrature, DecayingOscillatory) {
    for (double k : {0.0, 3.0, 20.0}) {
        OscQuadSpec s;
        s.decay_width = std::sqrt(0.5);
        s.max_frequency = k;
        const cplx v = decaying_oscillatory_quad([k](double x) { return std::exp(-x * x + I * k * x); }, s);
        EXPECT_NEAR(std::abs(v - std::sqrt(pi) * std::exp(-k * k / 4)), 0.0, 1e-13) << k;
    }
}
