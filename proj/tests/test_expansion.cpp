#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "oscs/basis.hpp"
#include "oscs/experiments.hpp"
#include "oscs/expansion.hpp"

using namespace oscs;

namespace {

// composite 30-point Gauss on panels shorter than one period, independent of the library's rules
cplx monomial_fourier_gauss(int b, double w, double lo, double hi) {
    using G = boost::math::quadrature::gauss<double, 30>;
    const int panels = 8 + static_cast<int>(std::abs(w) * (hi - lo));
    const double h = (hi - lo) / panels;
    double re = 0.0, im = 0.0;
    for (int q = 0; q < panels; ++q) {
        const double a = lo + q * h;
        re += G::integrate([&](double u) { return std::pow(u, b) * std::cos(w * u); }, a, a + h);
        im -= G::integrate([&](double u) { return std::pow(u, b) * std::sin(w * u); }, a, a + h);
    }
    return {re, im};
}

rvec x_grid() {
    rvec x;
    for (double v = -8; v <= 10; v += 0.1) x.push_back(v);
    return x;
}

}  // namespace

TEST(MonomialFourier, MatchesGauss) {
    for (int b = 0; b <= 8; ++b)
        for (double w : {0.0, 1e-3, 0.4, 2.0, 3.0, 8.0, 25.0})
            for (auto [lo, hi] : {std::pair{-2.0, 2.0}, {0.0, 5.0}, {-7.5, 1.0}}) {
                const cplx ref = monomial_fourier_gauss(b, w, lo, hi);
                EXPECT_LT(std::abs(monomial_fourier(b, w, lo, hi) - ref), 1e-13 * std::max(1.0, std::abs(ref)))
                    << b << " " << w << " " << lo;
            }
}

TEST(Beta, ModulusOracle) {
    // |beta_1| = sqrt(2 pi) |D_10(-1)| |Vhat(-1)| / v0 at the critical momentum n/v0 = 1
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    const auto V = PotentialSpec::gaussian();
    const double expect = std::sqrt(2 * pi) * std::abs(displacement_element_quad(1, 0, -1.0)) * std::exp(-0.5);
    EXPECT_NEAR(std::abs(beta_coefficient(1, p, V)), expect, 1e-12);
    EXPECT_NEAR(expect, std::sqrt(pi) * std::exp(-0.75), 1e-12);
}

TEST(Beta, ModulusIndependentOfEps) {
    const auto V = PotentialSpec::gaussian();
    for (int n = 0; n <= 4; ++n) {
        const double a = std::abs(beta_coefficient(n, default_params(StudyCase::stationary, 0.1), V));
        const double b = std::abs(beta_coefficient(n, default_params(StudyCase::stationary, 0.037), V));
        EXPECT_NEAR(a, b, 1e-14 * std::max(1.0, a));
    }
}

TEST(Order1, PeakAtShiftedCenter) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    rvec x;
    for (double v = -3; v <= 5; v += 0.01) x.push_back(v);
    for (int n = 1; n <= 3; ++n) {
        const cvec f = order1_coeff(n, p, PotentialSpec::gaussian(), EnvelopeSpec{}, x);
        std::size_t jm = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (std::abs(f[j]) > std::abs(f[jm])) jm = j;
        EXPECT_NEAR(x[jm], impact_time(p) * n / p.v0, 0.006) << n;
    }
}

TEST(Order1, ZeroPotentialVanishes) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    const auto c = closed_form_coefficient(1, 1, p, PotentialSpec::zero(), EnvelopeSpec{}, x_grid(), 4);
    for (const auto& f : c.fields)
        for (const auto& v : f) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Coefficients, ClosedMatchesQuadrature) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    const auto V = PotentialSpec::gaussian();
    const EnvelopeSpec eta;
    const rvec x = x_grid();
    const int nmax = 8;
    for (auto [l, h] : {std::pair{1, 1}, {1, 2}, {2, 2}}) {
        const auto cf = closed_form_coefficient(l, h, p, V, eta, x, nmax);
        for (int n = 0; n <= 2; ++n) {
            const cvec g = general_coefficient(l, h, n, p, V, eta, x, nmax).field;
            double d = 0.0, s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                d += std::norm(g[j] - cf.fields[n][j]);
                s += std::norm(cf.fields[n][j]);
            }
            EXPECT_LT(std::sqrt(d / s), 1e-10) << l << h << " n=" << n;
        }
    }
}

TEST(Order2Double, LevelSumConverges) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    const auto V = PotentialSpec::gaussian();
    const auto a = order2_double_constant(0, p, V, 8), b = order2_double_constant(0, p, V, 14);
    EXPECT_LT(std::abs(a.constant - b.constant), 1e-5 * std::abs(b.constant));
    // terms fall off geometrically in the intermediate level
    EXPECT_LT(b.term_magnitude.back(), 1e-3 * b.term_magnitude[1]);
}

TEST(Order2Double, TailToleranceEnforced) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    EXPECT_THROW(order2_double_constant(0, p, PotentialSpec::gaussian(), 2), NumericalError);
}

TEST(Expansion, RequiresStationaryGeometry) {
    const ModelParams p = default_params(StudyCase::nonstationary, 0.1);
    EXPECT_THROW(general_coefficient(1, 1, 1, p, PotentialSpec::gaussian(), EnvelopeSpec{}, x_grid(), 4), std::invalid_argument);
}

TEST(Assembly, ResidualDropsWithOrder) {
    const ModelParams p = default_params(StudyCase::stationary, 0.1);
    StudyConfig sc;
    sc.params = p;
    const SpatialGrid g = study_grid(sc, p);
    const auto ex = evolve_exact(build_initial_state(p, g, sc.eta, 8), p.t, sc.V, sc.solver).state;
    double prev = 1e9;
    for (int k = 0; k <= 2; ++k) {
        const double r = state_distance(ex, assemble_asymptotic(k, p, sc.V, sc.eta, g, 8));
        EXPECT_LT(r, 0.5 * prev) << k;
        prev = r;
    }
    EXPECT_LT(prev, 0.01);
}
