#pragma once

#include <functional>

#include "oscs/spectral.hpp"
#include "oscs/types.hpp"

namespace oscs {

// Scaled model: hbar = eps^2, oscillator frequency 1/eps, coupling eps^2.
struct ModelParams {
    double eps = 0.1;
    double v0 = 1.0;
    double R0 = 0.5;
    double a = 1.0;
    int sigma = +1;  // +1: packet moving right, -1: moving left
    double t = 1.0;

    void validate() const;
    double carrier_k() const { return sigma * v0 / (eps * eps); }
    double carrier_wavelength() const { return 2 * pi * eps * eps / v0; }
};

double impact_time(const ModelParams& p);
// Packet heads towards the oscillator: sigma=+ with R0<a, or sigma=- with R0>a.
bool is_stationary(const ModelParams& p);

// A*exp(-(x-c)^2/(2 w^2)) with all derivatives and its unitary Fourier transform.
struct GaussianShape {
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;

    double operator()(double x) const { return deriv(0, x); }
    double deriv(int j, double x) const;
    // hat f(xi) = (2 pi)^{-1/2} int f(x) exp(-i xi x) dx and its xi-derivatives
    cplx fourier(double xi) const { return fourier_deriv(0, xi); }
    cplx fourier_deriv(int j, double xi) const;
};

// Probabilists' Hermite polynomial He_j, complex argument allowed.
cplx hermite_he(int j, cplx u);

struct PotentialSpec {
    GaussianShape shape;  // amplitude 0 means V = 0

    static PotentialSpec gaussian(double amplitude = 1.0, double center = 0.0, double width = 1.0);
    static PotentialSpec zero() { return gaussian(0.0); }

    bool is_zero() const { return shape.amplitude == 0.0; }
    double V(double x) const { return shape(x); }
    double V_deriv(int j, double x) const { return shape.deriv(j, x); }
    cplx Vhat(double xi) const { return shape.fourier(xi); }
    cplx Vhat_deriv(int j, double xi) const { return shape.fourier_deriv(j, xi); }
    // |Vhat(xi)| <= C exp(-xi^2 / (2 s^2)) with s = 1/width
    double fourier_decay_width() const { return 1.0 / shape.width; }
    // Half-width of the support of V up to ~1e-20 relative.
    double support_radius() const { return std::abs(shape.center) + 9.6 * shape.width; }
};

struct EnvelopeSpec {
    double width = 1.0;  // eta(x) = pi^{-1/4} w^{-1/2} exp(-x^2/(2 w^2)), unit L2 norm

    double eta(double x) const { return deriv(0, x); }
    double deriv(int j, double x) const;
    double support_radius() const { return 9.6 * width; }
};

// Sample phi_n phi_m V(X - y) quadrature: V_nm at X = (R - a)/eps.
double coupling_value(int n, int m, double X, const PotentialSpec& V);
// V_nm(R) by direct quadrature over the oscillator coordinate.
double coupling_matrix(int n, int m, double R, const ModelParams& p, const PotentialSpec& V);
// Same through int Vhat(xi) (2pi)^{-1/2} D_nm(xi) exp(i xi X) dxi.
double coupling_matrix_fourier(int n, int m, double R, const ModelParams& p, const PotentialSpec& V);

// Coupling matrices on many points: row-major blocks of (n_max+1)^2 per X.
// Uses one shared Hermite table, so it is the path the solver takes.
rvec coupling_table(int n_max, const rvec& X, const PotentialSpec& V);

// Smooth function with derivatives, f(j, x) = f^{(j)}(x).
using DerivFn = std::function<cplx(int, double)>;

struct WeightedNormOptions {
    double window = 20.0;
    double dx = 0.005;
};

// |||f|||_{k,p} = sum_j || f^{(j)} <x>^{k-j} ||_{L^p}, p in {1, 2, inf}.
// p = infinity is passed as 0.
double weighted_norm(const DerivFn& f, int k, int p, const WeightedNormOptions& opt = {});

// f(x) (1 + x^2) with derivatives via Leibniz.
DerivFn times_bracket_sq(DerivFn f);

struct HypothesisNorms {
    double V_k1_1;          // |||V|||_{k+1,1}
    double Vbr2_k2_1;       // |||V <.>^2|||_{k+2,1}
    double Vhatbr2_k2_1;    // |||Vhat <.>^2|||_{k+2,1}
    double eta_k2_2;        // |||eta|||_{k+2,2}
};
HypothesisNorms hypothesis_norms(const PotentialSpec& V, const EnvelopeSpec& eta, int k);

// Grid covering both packet trajectories and the oscillator with a 3-unit
// margin, ppw points per carrier wavelength. mirror adds the packet started at
// -R0 moving the other way.
SpatialGrid scenario_grid(const ModelParams& p, double ppw = 8.0, bool mirror = false);

// Normalization of alpha (psi_+ + psi_-) where psi_- starts at -R0 with the
// opposite carrier; by quadrature of the overlap integral.
double alpha_epsilon(const ModelParams& p, const EnvelopeSpec& eta);

// eps^{-1/2} exp(i s v0 R/eps^2) eta((R - c)/eps) on the grid.
cvec wave_packet(const SpatialGrid& grid, double eps, double v0, int s, double c, const EnvelopeSpec& eta);

}  // namespace oscs
