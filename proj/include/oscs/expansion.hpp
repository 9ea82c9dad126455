#pragma once

#include "oscs/model.hpp"
#include "oscs/solver.hpp"

namespace oscs {

// A_nm(kappa) = Vhat(-sigma kappa) D_nm(-sigma kappa): amplitude of one kick
// that removes momentum kappa (rescaled units) while moving m -> n.
cplx kick_amplitude(int n, int m, double kappa, const ModelParams& p, const PotentialSpec& V);
cplx kick_amplitude_deriv(int n, int m, double kappa, const ModelParams& p, const PotentialSpec& V);

// Mode-indexed fields <phi_n, I_l^h> on an x grid (x = (R - R0)/eps).
// Fields include the pure phase exp(i n tau/eps); moduli do not depend on eps.
struct ExpansionCoefficient {
    int l = 0;
    int h = 0;
    rvec x;
    std::vector<cvec> fields;
};

ExpansionCoefficient order0(const EnvelopeSpec& eta, const rvec& x, int n_max);

// Single kick at the critical momentum n/v0:
// sqrt(2pi)/(i v0) A_n0(n/v0) exp(-i sigma nu x) exp(i tau nu^2/2) eta(x - sigma tau nu).
cvec order1_coeff(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x);

// Single kick, next order: -(sqrt(2pi)/v0^2) g'(nu), the derivative produced
// by the delta' collapse of the z-integral.
cvec order2_single(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x);

struct Order2DoubleInfo {
    cplx constant = 0.0;      // field = constant * exp(-i s nu x) exp(i tau nu^2/2) eta(x - s tau nu)
    rvec term_magnitude;      // |contribution| per intermediate level m
    double tail_ratio = 0.0;  // |last term| / max |term|
};

// tail_tol bounds the last intermediate level's contribution in absolute
// terms (fields are normalized with ||eta|| = 1); high n have tiny totals, so
// a relative test there would only measure noise.

// Two kicks, leading order. The relative-time half-line integral gives
// pi delta + i PV; the delta is collapsed analytically, the PV by pv_integral.
Order2DoubleInfo order2_double_constant(int n, const ModelParams& p, const PotentialSpec& V, int m_max,
                                        double tail_tol = 1e-4);
cvec order2_double(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x,
                   int m_max);

struct GeneralCoefficientOptions {
    double Z = 40.0;       // |z_1| <= Z, 0 <= z_2 - z_1 <= Z
    double dkappa = 0.02;
    double tail_tol = 1e-7;  // relative change between Z/2 and Z
    // norms below this count as this when forming the relative change. High
    // levels have norms down to 1e-17 while the monomial sums cancel from O(1),
    // so their Z/2-to-Z change (~1e-15) is roundoff, not truncation.
    double norm_floor = 1e-6;
};

struct GeneralCoefficientResult {
    cvec field;
    double tail_estimate = 0.0;
};

// Direct quadrature of the order-h, l-kick coefficient over the truncated
// z-domain. l in {1, 2}, h >= l. The z-integrals are done exactly against the
// Taylor monomials; the momentum integrals by trapezoid.
GeneralCoefficientResult general_coefficient(int l, int h, int n, const ModelParams& p, const PotentialSpec& V,
                                             const EnvelopeSpec& eta, const rvec& x, int m_max,
                                             const GeneralCoefficientOptions& opt = {});

// Closed-form coefficient for (l, h) with h <= 2 on all modes 0..n_max.
ExpansionCoefficient closed_form_coefficient(int l, int h, const ModelParams& p, const PotentialSpec& V,
                                             const EnvelopeSpec& eta, const rvec& x, int n_max);

// Free evolution of eps^{-1/2} exp(i sigma v0 R/eps^2) sum_{h<=k} eps^h I_h on the grid.
ModeState assemble_asymptotic(int k, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                              const SpatialGrid& grid, int n_max);

// beta_{n,eps}: eps * <phi_n, I_1> = eps * beta_n * (unit-norm shifted packet).
cplx beta_coefficient(int n, const ModelParams& p, const PotentialSpec& V);
// |beta_n| with the kick evaluated at (n + 1/2)/v0 instead of n/v0. Reported
// for comparison only.
double beta_shifted_modulus(int n, const ModelParams& p, const PotentialSpec& V);

// int_{lo}^{hi} u^b exp(-i w u) du, b <= 8
cplx monomial_fourier(int b, double w, double lo, double hi);

}  // namespace oscs
