#include "oscs/expansion.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "oscs/basis.hpp"
#include "oscs/parallel.hpp"

namespace oscs {

namespace {

void require_stationary(const ModelParams& p, const char* what) {
    p.validate();
    if (!is_stationary(p)) throw std::invalid_argument(std::string(what) + ": needs the stationary geometry");
}

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }
double factorial(int n) { return boost::math::factorial<double>(n); }

// exp(-i sigma K x) exp(i tau K^2/2) eta^{(j)}(x - sigma tau K)
cplx packet_factor(double K, double x, int j, const ModelParams& p, const EnvelopeSpec& eta) {
    const double tau = impact_time(p);
    return std::polar(1.0, -p.sigma * K * x + tau * K * K / 2) * eta.deriv(j, x - p.sigma * tau * K);
}

cplx mode_phase(int n, const ModelParams& p) { return std::polar(1.0, n * impact_time(p) / p.eps); }

// Half-width beyond which every kick amplitude with indices <= m_max is negligible.
double kick_support(const ModelParams& p, const PotentialSpec& V, int m_max) {
    double peak = 0.0;
    for (double k = -40; k <= 40; k += 0.25)
        for (int n = 0; n <= m_max; ++n)
            peak = std::max(peak, std::abs(kick_amplitude(n, 0, k, p, V)));
    double L = 1.0;
    for (; L < 200; L += 0.5) {
        double mx = 0.0;
        for (int n = 0; n <= m_max; ++n)
            for (int m = 0; m <= m_max; ++m)
                mx = std::max({mx, std::abs(kick_amplitude(n, m, L, p, V)), std::abs(kick_amplitude(n, m, -L, p, V))});
        if (mx < 1e-17 * peak) break;
    }
    return L;
}

}  // namespace

cplx kick_amplitude(int n, int m, double kappa, const ModelParams& p, const PotentialSpec& V) {
    const double xi = -p.sigma * kappa;
    return V.Vhat(xi) * displacement_element(n, m, xi);
}

cplx kick_amplitude_deriv(int n, int m, double kappa, const ModelParams& p, const PotentialSpec& V) {
    const double xi = -p.sigma * kappa;
    return -double(p.sigma) *
           (V.Vhat_deriv(1, xi) * displacement_element(n, m, xi) + V.Vhat(xi) * displacement_derivative(n, m, xi));
}

ExpansionCoefficient order0(const EnvelopeSpec& eta, const rvec& x, int n_max) {
    ExpansionCoefficient c{0, 0, x, std::vector<cvec>(n_max + 1, cvec(x.size(), 0.0))};
    for (std::size_t j = 0; j < x.size(); ++j) c.fields[0][j] = eta.eta(x[j]);
    return c;
}

cvec order1_coeff(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x) {
    require_stationary(p, "order1_coeff");
    const double nu = n / p.v0;
    const cplx pref = std::sqrt(2 * pi) / (I * p.v0) * kick_amplitude(n, 0, nu, p, V) * mode_phase(n, p);
    cvec out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = pref * packet_factor(nu, x[j], 0, p, eta);
    return out;
}

cvec order2_single(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x) {
    require_stationary(p, "order2_single");
    const double s = p.sigma, tau = impact_time(p), k = n / p.v0;
    const cplx A = kick_amplitude(n, 0, k, p, V);
    const cplx Ap = kick_amplitude_deriv(n, 0, k, p, V);
    const cplx pref = -std::sqrt(2 * pi) / (p.v0 * p.v0) * mode_phase(n, p);
    cvec out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double y = x[j] - s * tau * k;
        const double e0 = eta.deriv(0, y), e1 = eta.deriv(1, y), e2 = eta.deriv(2, y);
        // B(k) = (i/2) k^2 eta(y) - s k eta'(y), y = x - s tau k
        const cplx B = 0.5 * I * k * k * e0 - s * k * e1;
        const cplx Bp = I * k * e0 - s * e1 - 0.5 * I * s * tau * k * k * e1 + tau * k * e2;
        const cplx ex = std::polar(1.0, -s * k * x[j] + tau * k * k / 2);
        const cplx gp = (Ap + A * (-I * s * x[j] + I * tau * k)) * ex * B + A * ex * Bp;
        out[j] = pref * gp;
    }
    return out;
}

Order2DoubleInfo order2_double_constant(int n, const ModelParams& p, const PotentialSpec& V, int m_max,
                                        double tail_tol) {
    require_stationary(p, "order2_double");
    const double nu = n / p.v0;
    const double L = kick_support(p, V, std::max(n, m_max));
    Order2DoubleInfo info;
    info.term_magnitude.assign(m_max + 1, 0.0);
    cplx total = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        const double nu2 = (n - m) / p.v0;
        auto g = [&](double k) { return kick_amplitude(n, m, k, p, V) * kick_amplitude(m, 0, nu - k, p, V); };
        PvOptions opt;
        opt.outer_width = L + std::abs(nu) + std::abs(nu2) + 2.0;
        opt.panel = 0.25;
        opt.tol = 1e-9;
        const cplx term = pi * g(nu2) - I * pv_integral(g, nu2, 0.5, opt);
        info.term_magnitude[m] = std::abs(term);
        total += term;
    }
    const double mx = *std::max_element(info.term_magnitude.begin(), info.term_magnitude.end());
    info.tail_ratio = mx > 0 ? info.term_magnitude.back() / mx : 0.0;
    if (m_max > 0 && info.term_magnitude.back() > tail_tol)
        throw NumericalError("order2_double: intermediate level " + std::to_string(m_max) + " contributes " +
                             std::to_string(info.term_magnitude.back()) + "; raise n_max");
    info.constant = -total / (p.v0 * p.v0) * mode_phase(n, p);
    return info;
}

cvec order2_double(int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x,
                   int m_max) {
    const Order2DoubleInfo info = order2_double_constant(n, p, V, m_max);
    const double nu = n / p.v0;
    cvec out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = info.constant * packet_factor(nu, x[j], 0, p, eta);
    return out;
}

cplx monomial_fourier(int b, double w, double lo, double hi) {
    if (b < 0 || b > 8) throw std::invalid_argument("monomial_fourier: degree out of range");
    const double L = std::max(std::abs(lo), std::abs(hi));
    if (std::abs(w) * L <= 3.0) {
        // power series in w; it cancels like exp(|w| L), the upward recurrence
        // below amplifies by up to b!/(|w| L)^b, and 3 balances the two at b = 8
        cplx sum = 0.0, c = 1.0;
        for (int k = 0; k < 200; ++k) {
            const int e = b + k + 1;
            const cplx term = c * (std::pow(hi, e) - std::pow(lo, e)) / double(e);
            sum += term;
            // odd-power terms vanish on symmetric intervals, so bound rather than test the term
            if (k > 4 && std::abs(c) * std::pow(L, e) / e < 1e-18 * std::max(std::abs(sum), 1e-300)) break;
            c *= -I * w / double(k + 1);
        }
        return sum;
    }
    const cplx iw = I * w;
    const cplx eh = std::exp(-iw * hi), el = std::exp(-iw * lo);
    cplx K = (eh - el) / (-iw);
    for (int j = 1; j <= b; ++j)
        K = (std::pow(hi, j) * eh - std::pow(lo, j) * el) / (-iw) + (double(j) / iw) * K;
    return K;
}

namespace {

struct KickGrid {
    double dk;
    int half;  // points k_i = i*dk, i in [-half, half]
    double k(int i) const { return i * dk; }
};

cvec general_l1(int h, int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x,
                double Z, const KickGrid& g) {
    const int j = h - 1;
    const double nu = n / p.v0, s = p.sigma, tau = impact_time(p);
    const int nk = 2 * g.half + 1;
    cvec A(nk), Kz(nk);
    for (int i = 0; i < nk; ++i) {
        const double k = g.k(i - g.half);
        A[i] = kick_amplitude(n, 0, k, p, V);
        Kz[i] = monomial_fourier(j, k - nu, -Z, Z);
    }
    const cplx pref = 1.0 / (I * std::sqrt(2 * pi)) * std::pow(p.v0, -h) / factorial(j) * g.dk;
    cvec out(x.size());
    parallel_for(static_cast<int>(x.size()), [&](int ix) {
        const double xx = x[ix];
        cplx acc = 0.0;
        for (int i = 0; i < nk; ++i) {
            if (A[i] == 0.0) continue;
            const double k = g.k(i - g.half);
            const double y = xx - s * tau * k;
            cplx poly = 0.0;
            for (int mp = 0; mp <= j; ++mp)
                poly += binom(j, mp) * eta.deriv(mp, y) * std::pow(-s * k, mp) * std::pow(0.5 * I * k * k, j - mp);
            acc += A[i] * std::polar(1.0, -s * k * xx + tau * k * k / 2) * poly * Kz[i];
        }
        out[ix] = pref * acc;
    });
    return out;
}

// One monomial z1^a u^b of the Taylor factor for two kicks.
struct TwoKickTerm {
    double coef;
    cplx phase_coef;
    int eta_order;  // m'
    int a, b;       // powers of z1 and u
    int pK;         // extra K power
    int q1, q2;     // kappa2^{q1} (2 K kappa2 - kappa2^2)^{q2}
};

std::vector<TwoKickTerm> two_kick_terms(int j, int s) {
    std::vector<TwoKickTerm> terms;
    for (int mp = 0; mp <= j; ++mp) {
        const int r = j - mp;
        for (int a1 = 0; a1 <= mp; ++a1)
            for (int a2 = 0; a2 <= r; ++a2) {
                TwoKickTerm t;
                t.coef = binom(j, mp) * binom(mp, a1) * binom(r, a2) * std::pow(-double(s), mp);
                t.phase_coef = std::pow(0.5 * I, r);
                t.eta_order = mp;
                t.a = a1 + a2;
                t.b = (mp - a1) + (r - a2);
                t.pK = a1 + 2 * a2;
                t.q1 = mp - a1;
                t.q2 = r - a2;
                terms.push_back(t);
            }
    }
    return terms;
}

cvec general_l2(int h, int n, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta, const rvec& x,
                int m_max, double Z, const KickGrid& g) {
    const int j = h - 2;
    const double nu = n / p.v0, tau = impact_time(p);
    const int s = p.sigma;
    const auto terms = two_kick_terms(j, s);
    // outer momentum K on a grid twice as wide as the single-kick grid
    const int nK = 4 * g.half + 1;
    const int nk = 2 * g.half + 1;
    // H[t][iK] summed over intermediate levels
    std::vector<cvec> H(terms.size(), cvec(nK, 0.0));
    for (int m = 0; m <= m_max; ++m) {
        const double nu2 = (n - m) / p.v0;
        cvec A2(nk), A1(2 * nK);  // A_nm(kappa2), A_m0(K - kappa2) over the difference range
        for (int i = 0; i < nk; ++i) A2[i] = kick_amplitude(n, m, g.k(i - g.half), p, V);
        // K - kappa2 spans [-3 half, 3 half]
        const int dhalf = 3 * g.half;
        cvec Ad(2 * dhalf + 1);
        for (int i = 0; i <= 2 * dhalf; ++i) Ad[i] = kick_amplitude(m, 0, g.k(i - dhalf), p, V);
        for (std::size_t ti = 0; ti < terms.size(); ++ti) {
            const auto& t = terms[ti];
            cvec Ku(nk);
            for (int i = 0; i < nk; ++i) Ku[i] = monomial_fourier(t.b, g.k(i - g.half) - nu2, 0.0, Z);
            parallel_for(nK, [&](int iK) {
                const int Ki = iK - 2 * g.half;
                const double K = g.k(Ki);
                cplx acc = 0.0;
                for (int i = 0; i < nk; ++i) {
                    if (A2[i] == 0.0) continue;
                    const int ki = i - g.half;
                    const int di = Ki - ki + dhalf;
                    const cplx a1 = Ad[di];
                    if (a1 == 0.0) continue;
                    const double k2 = g.k(ki);
                    const double poly = std::pow(k2, t.q1) * std::pow(2 * K * k2 - k2 * k2, t.q2);
                    acc += A2[i] * a1 * poly * Ku[i];
                }
                H[ti][iK] += acc * g.dk;
            });
        }
    }
    const cplx pref = 1.0 / std::pow(I * std::sqrt(2 * pi), 2) * std::pow(p.v0, -h) / factorial(j) * g.dk;
    std::vector<cvec> Kz(terms.size(), cvec(nK));
    for (std::size_t ti = 0; ti < terms.size(); ++ti)
        for (int iK = 0; iK < nK; ++iK) Kz[ti][iK] = monomial_fourier(terms[ti].a, g.k(iK - 2 * g.half) - nu, -Z, Z);
    cvec out(x.size());
    parallel_for(static_cast<int>(x.size()), [&](int ix) {
        const double xx = x[ix];
        cplx acc = 0.0;
        for (int iK = 0; iK < nK; ++iK) {
            const double K = g.k(iK - 2 * g.half);
            const cplx ph = std::polar(1.0, -s * K * xx + tau * K * K / 2);
            const double y = xx - s * tau * K;
            for (std::size_t ti = 0; ti < terms.size(); ++ti) {
                const auto& t = terms[ti];
                if (H[ti][iK] == 0.0) continue;
                acc += t.coef * t.phase_coef * std::pow(K, t.pK) * eta.deriv(t.eta_order, y) * ph * H[ti][iK] *
                       Kz[ti][iK];
            }
        }
        out[ix] = pref * acc;
    });
    return out;
}

}  // namespace

GeneralCoefficientResult general_coefficient(int l, int h, int n, const ModelParams& p, const PotentialSpec& V,
                                             const EnvelopeSpec& eta, const rvec& x, int m_max,
                                             const GeneralCoefficientOptions& opt) {
    require_stationary(p, "general_coefficient");
    if (l < 1 || l > 2) throw std::invalid_argument("general_coefficient: l must be 1 or 2");
    if (h < l || h - l > 4) throw std::invalid_argument("general_coefficient: need l <= h <= l + 4");
    KickGrid g;
    g.dk = opt.dkappa;
    g.half = static_cast<int>(std::ceil(kick_support(p, V, std::max(n, m_max)) / g.dk));
    auto run = [&](double Z) {
        return l == 1 ? general_l1(h, n, p, V, eta, x, Z, g) : general_l2(h, n, p, V, eta, x, m_max, Z, g);
    };
    GeneralCoefficientResult r;
    r.field = run(opt.Z);
    const cvec half = run(0.5 * opt.Z);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff += std::norm(r.field[i] - half[i]);
        norm += std::norm(r.field[i]);
    }
    r.tail_estimate = std::sqrt(diff / std::max(norm, opt.norm_floor * opt.norm_floor));
    if (r.tail_estimate > opt.tail_tol)
    {
        char msg[160];
        std::snprintf(msg, sizeof msg, "general_coefficient: truncation at Z = %g not converged (relative change %.3g)",
                      opt.Z, r.tail_estimate);
        throw NumericalError(msg);
    }
    const cplx ph = mode_phase(n, p);
    for (auto& v : r.field) v *= ph;
    return r;
}

ExpansionCoefficient closed_form_coefficient(int l, int h, const ModelParams& p, const PotentialSpec& V,
                                             const EnvelopeSpec& eta, const rvec& x, int n_max) {
    if (l == 0 && h == 0) return order0(eta, x, n_max);
    ExpansionCoefficient c{l, h, x, std::vector<cvec>(n_max + 1)};
    for (int n = 0; n <= n_max; ++n) {
        if (l == 1 && h == 1) c.fields[n] = order1_coeff(n, p, V, eta, x);
        else if (l == 1 && h == 2) c.fields[n] = order2_single(n, p, V, eta, x);
        else if (l == 2 && h == 2) c.fields[n] = order2_double(n, p, V, eta, x, n_max);
        else throw std::invalid_argument("closed_form_coefficient: only h <= 2 has a closed form");
    }
    return c;
}

ModeState assemble_asymptotic(int k, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                              const SpatialGrid& grid, int n_max) {
    if (k < 0 || k > 2) throw std::invalid_argument("assemble_asymptotic: k must be 0, 1 or 2");
    if (k > 0) require_stationary(p, "assemble_asymptotic");
    ModeState s{grid, p, 0.0, std::vector<cvec>(n_max + 1, cvec(grid.n, 0.0))};
    rvec x(grid.n);
    for (int j = 0; j < grid.n; ++j) x[j] = (grid.x(j) - p.R0) / p.eps;
    const double e = p.eps;
    for (int n = 0; n <= n_max; ++n) {
        cvec c(grid.n, 0.0);
        if (n == 0)
            for (int j = 0; j < grid.n; ++j) c[j] = eta.eta(x[j]);
        if (k >= 1) {
            const cvec f1 = order1_coeff(n, p, V, eta, x);
            for (int j = 0; j < grid.n; ++j) c[j] += e * f1[j];
        }
        if (k >= 2) {
            const cvec f2 = order2_single(n, p, V, eta, x);
            const cvec f3 = order2_double(n, p, V, eta, x, n_max);
            for (int j = 0; j < grid.n; ++j) c[j] += e * e * (f2[j] + f3[j]);
        }
        const double k0 = p.carrier_k();
        for (int j = 0; j < grid.n; ++j) s.f[n][j] = c[j] * std::polar(1.0 / std::sqrt(e), k0 * grid.x(j));
    }
    return free_evolve(s, p.t);
}

cplx beta_coefficient(int n, const ModelParams& p, const PotentialSpec& V) {
    require_stationary(p, "beta_coefficient");
    const double nu = n / p.v0;
    return std::sqrt(2 * pi) / (I * p.v0) * kick_amplitude(n, 0, nu, p, V) * mode_phase(n, p);
}

double beta_shifted_modulus(int n, const ModelParams& p, const PotentialSpec& V) {
    const double k = (n + 0.5) / p.v0;
    return std::sqrt(2 * pi) / p.v0 * std::abs(displacement_element(n, 0, k)) * std::abs(V.Vhat(k));
}

}  // namespace oscs
