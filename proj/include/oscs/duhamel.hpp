#pragma once

#include <algorithm>

#include "oscs/model.hpp"
#include "oscs/solver.hpp"

namespace oscs {

// Integration variables for the Dyson terms. The s-simplex 0 < s_1 < ... < s_l < t
// is mapped to z_j = v0 (s_j - s_star)/eps, s_star = sigma (a - R0)/v0 being the
// time the packet center crosses the oscillator (negative when it never does).
struct IntegrationDomain {
    double t = 0.0;
    double eps = 0.0;
    double v0 = 1.0;
    double s_star = 0.0;
    double z_cut = 32.0;  // |z| beyond this the packet and coupling do not overlap

    static IntegrationDomain from(const ModelParams& p, double z_cut = 32.0);
    double s_of(double z) const { return s_star + eps * z / v0; }
    // full rescaled domain -v0 s_star/eps < z < v0 (t - s_star)/eps
    double z_min_full() const { return -v0 * s_star / eps; }
    double z_max_full() const { return v0 * (t - s_star) / eps; }
    // clipped to |z| <= z_cut; empty when lo >= hi
    double z_lo() const { return std::max(z_min_full(), -z_cut); }
    double z_hi() const { return std::min(z_max_full(), z_cut); }
};

struct DuhamelOptions {
    double x_half_width = 32.0;
    double dx = 1.0 / 16.0;
    double x_offset = 0.0;  // grid starts at offset - half_width (used to align with an R grid)
    double z_cut = 32.0;
    double panel = 0.5;     // z panel width, Gauss-Legendre 16 per panel
    int n_max = 8;
    double tail_tol = 1e-3; // bound on the top intermediate level's share of I_2, coefficient units
};

// <phi_n, I_l(t)> with the carrier eps^{-1/2} exp(i sigma v0 R/eps^2) stripped,
// on the rescaled grid x = (R - R0)/eps, every mode.
struct DuhamelTerm {
    int l = 0;
    double t = 0.0;
    double eps = 0.0;
    SpatialGrid grid;
    std::vector<cvec> fields;
    // fields * exp(-i n s_star/eps): no fast phase left, smooth in eps
    std::vector<cvec> reduced;
    double tail_estimate = 0.0;
};

struct DysonTerms {
    DuhamelTerm first;
    DuhamelTerm second;  // l = 0 when not requested
};

// Both terms from one pass over the z nodes: the interaction-picture coupling
// W(s) is applied on the x grid by FFT, and the inner integral of the second
// term is the running integral of the first.
DysonTerms dyson_terms(int max_l, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                       const DuhamelOptions& opt = {});

DuhamelTerm duhamel_term(int l, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                         const DuhamelOptions& opt = {});

// l = 1 term at one x for mode n, by nested quadrature in (s, xi) or (z, xi).
enum class Variables { s, z };
cplx duhamel_l1_direct(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                       Variables vars, double z_cut = 32.0);

// |xi-integrated integrand| of the l = 1 term as a function of s.
rvec s_profile(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
               const rvec& s_values);
// s maximizing s_profile, sampled on [s_lo, s_hi] with step h and refined by a parabola.
double s_profile_argmax(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                        double s_lo, double s_hi, double h);

// Critical point of the phase sum_j [(n_j - n_{j-1}) s_j + xi_j (R0 - a + sigma v0 s_j)]
// along the level path 0 -> path[0] -> ... by Newton iteration.
struct CriticalPoint {
    rvec s;
    rvec xi;
    bool inside = false;  // 0 < s_1 <= ... <= s_l < t
    int iterations = 0;
};
CriticalPoint stationary_point(const std::vector<int>& path, const ModelParams& p);

// Psi_0 + sum_{l<=k} I_l on the R grid, then free evolution to t.
ModeState duhamel_sum(int k, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                      const SpatialGrid& grid, int n_max);

// Polynomial fit in eps through the samples (one per eps). Returns the
// coefficient fields c_0..c_{deg}, deg = eps.size() - 1.
std::vector<std::vector<cvec>> extrapolate_in_eps(const rvec& eps, const std::vector<std::vector<cvec>>& samples);

// I_1^1, I_1^2 and I_2^2 from eps-extrapolated Dyson terms, carrying the phase
// exp(i n tau/eps) for p.eps so they compare directly with the closed forms.
struct ExtrapolatedCoefficients {
    SpatialGrid grid;
    rvec x;
    std::vector<cvec> l1h1, l1h2, l2h2;
};
ExtrapolatedCoefficients duhamel_coefficients(const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                                              const rvec& eps_list, const DuhamelOptions& opt = {});

}  // namespace oscs
