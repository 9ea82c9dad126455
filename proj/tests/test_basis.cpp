#include <gtest/gtest.h>

#include <cmath>

#include "oscs/basis.hpp"

using namespace oscs;

TEST(Hermite, Orthonormal) {
    const double h = 0.01;
    for (int n = 0; n <= 30; n += 3)
        for (int m = n; m <= 30; m += 4) {
            double s = 0.0;
            for (double x = -15; x <= 15; x += h) s += hermite_fn(n, x) * hermite_fn(m, x) * h;
            EXPECT_NEAR(s, n == m ? 1.0 : 0.0, 1e-12) << n << " " << m;
        }
}

TEST(Hermite, LowOrdersExplicit) {
    for (double x : {-2.0, -0.3, 0.0, 1.7}) {
        const double g = std::pow(pi, -0.25) * std::exp(-x * x / 2);
        EXPECT_NEAR(hermite_fn(0, x), g, 1e-15);
        EXPECT_NEAR(hermite_fn(1, x), std::sqrt(2.0) * x * g, 1e-15);
        EXPECT_NEAR(hermite_fn(2, x), (2 * x * x - 1) / std::sqrt(2.0) * g, 1e-15);
    }
}

TEST(Hermite, HighOrderFinite) {
    EXPECT_TRUE(std::isfinite(hermite_fn(150, 3.0)));
    EXPECT_LT(std::abs(hermite_fn(150, 30.0)), 1e-30);
}

TEST(Displacement, ClosedFormLowOrders) {
    for (double xi : {-2.0, -1.0, 0.0, 0.5, 3.0}) {
        const double e = std::exp(-xi * xi / 4);
        EXPECT_NEAR(std::abs(displacement_element(0, 0, xi) - e), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(displacement_element(1, 0, xi) - cplx(0, -xi / std::sqrt(2.0)) * e), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(displacement_element(0, 1, xi) - cplx(0, -xi / std::sqrt(2.0)) * e), 0.0, 1e-15);
    }
}

TEST(Displacement, MatchesQuadrature) {
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m)
            for (double xi : {-2.5, -1.0, 0.7, 2.0})
                EXPECT_NEAR(std::abs(displacement_element(n, m, xi) - displacement_element_quad(n, m, xi)), 0.0, 1e-12)
                    << n << " " << m << " " << xi;
}

TEST(Displacement, DerivativeMatchesDifference) {
    const double h = 1e-3, xi = 0.9;
    for (int n = 0; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) {
            auto D = [&](double s) { return displacement_element(n, m, xi + s * h); };
            const cplx fd = (D(-2) - 8.0 * D(-1) + 8.0 * D(1) - D(2)) / (12 * h);
            EXPECT_NEAR(std::abs(displacement_derivative(n, m, xi) - fd), 0.0, 1e-10);
        }
}

TEST(Displacement, Unitarity) {
    // e^{-i xi x} is unitary, so its matrix in a large basis has unit-norm columns
    for (double xi : {0.5, 2.0}) {
        double s = 0.0;
        for (int n = 0; n <= 60; ++n) s += std::norm(displacement_element(n, 2, xi));
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(OscillatorPropagator, EigenfunctionPhase) {
    OscillatorPropagator U(16.0, 640);
    const auto& y = U.grid();
    for (int n : {0, 3}) {
        cvec phi(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) phi[j] = hermite_fn(n, y[j]);
        const double t = 0.8;
        const cvec out = U.apply(t, phi);
        const cplx ph = std::exp(-I * (n + 0.5) * t);
        double err = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) err = std::max(err, std::abs(out[j] - ph * phi[j]));
        EXPECT_LT(err, 1e-10);
    }
}

TEST(OscillatorPropagator, MehlerMatchesEigenSum) {
    OscillatorPropagator U(16.0, 640);
    const auto& y = U.grid();
    cvec psi(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) psi[j] = std::exp(-(y[j] - 1.0) * (y[j] - 1.0) / 2 + I * 0.7 * y[j]);
    for (double t : {0.4, 1.3, 2.9}) {
        const cvec a = U.apply_eigen_sum(t, psi), b = U.apply_mehler(t, psi);
        double err = 0.0, nrm = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            err += std::norm(a[j] - b[j]);
            nrm += std::norm(a[j]);
        }
        EXPECT_LT(std::sqrt(err / nrm), 1e-8) << t;
    }
}

TEST(OscillatorPropagator, FullPeriodIsMinusOne) {
    OscillatorPropagator U(16.0, 640);
    const auto& y = U.grid();
    cvec psi(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) psi[j] = std::exp(-(y[j] + 0.5) * (y[j] + 0.5) / 2);
    const cvec out = U.apply(2 * pi, psi);
    double err = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) err = std::max(err, std::abs(out[j] + psi[j]));
    EXPECT_LT(err, 1e-10);
}
