#pragma once

#include <functional>
#include <memory>

#include "oscs/types.hpp"

namespace oscs {

// Uniform periodic grid x_j = lo + j*L/N, N a power of two.
struct SpatialGrid {
    double lo = 0.0;
    double length = 1.0;
    int n = 0;

    double dx() const { return length / n; }
    double x(int j) const { return lo + j * dx(); }
    // FFT ordering: 0, 1, ..., N/2-1, -N/2, ..., -1 in units of 2*pi/L
    double k(int j) const { return 2 * pi / length * (j < n / 2 ? j : j - n); }
    double dk() const { return 2 * pi / length; }
    double k_nyquist() const { return pi / dx(); }
    rvec xs() const;
    rvec ks() const;

    // Smallest power-of-two grid on [lo, hi) with spacing <= max_dx.
    static SpatialGrid covering(double lo, double hi, double max_dx);
};

// FFTW wrapper; forward is unnormalized, inverse divides by N.
// Plans are created under a global lock and are then safe to share.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const { return n_; }
    void forward(cplx* data) const;
    void inverse(cplx* data) const;
    void forward(cvec& v) const { forward(v.data()); }
    void inverse(cvec& v) const { inverse(v.data()); }

private:
    int n_;
    void* fwd_;
    void* bwd_;
};

// Shared plan for a given size.
const Fft& fft_for(int n);

double l2_norm_sq(const cvec& f, double dx);
inline double l2_norm(const cvec& f, double dx) { return std::sqrt(l2_norm_sq(f, dx)); }

// Free test-particle evolution: multiplier exp(-i t eps^2 k^2 / 2).
cvec free_propagate(const SpatialGrid& grid, const cvec& f, double t, double eps);

// Closed-form free evolution of s^{-1/2} pi^{-1/4} exp(i k0 R) exp(-(R-R0)^2/(2 s^2))
// under i f_t = -(eps^2/2) f''.
cvec free_gaussian_packet(const SpatialGrid& grid, double t, double eps, double k0,
                          double R0, double s);

using ComplexFn = std::function<cplx(double)>;

struct PvOptions {
    double outer_width = 40.0;  // integrate u in [0, outer_width]
    double panel = 0.5;         // composite Gauss-Legendre panel width outside the excision
    double tol = 1e-10;         // resolution / tail tolerance (absolute, scaled by max|g|)
};

// PV int g(x)/(x - x0) dx. The excised interval [x0-h, x0+h] contributes
// only through the odd part of g about x0, int_0^h (g(x0+u) - g(x0-u))/u du,
// whose integrand tends to 2 g'(x0) at u -> 0.
cplx pv_integral(const ComplexFn& g, double x0, double halfwidth, const PvOptions& opt = {});

struct OscQuadSpec {
    double center = 0.0;
    double decay_width = 1.0;     // integrand bounded by C exp(-(x-center)^2 / (2 w^2))
    double max_frequency = 0.0;   // largest phase slope |d(phase)/dx| on the window
    double tol = 1e-13;
};

// Trapezoid rule on a truncated uniform grid; spectrally accurate for
// smooth Gaussian-decaying integrands. Throws when the edge values exceed
// the tail tolerance.
cplx decaying_oscillatory_quad(const ComplexFn& g, const OscQuadSpec& spec);

// Full Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    rvec nodes;
    rvec weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace oscs
