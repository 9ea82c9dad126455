#include "oscs/duhamel.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

#include "oscs/basis.hpp"
#include "oscs/parallel.hpp"

namespace oscs {

IntegrationDomain IntegrationDomain::from(const ModelParams& p, double z_cut) {
    p.validate();
    IntegrationDomain d;
    d.t = p.t;
    d.eps = p.eps;
    d.v0 = p.v0;
    d.s_star = p.sigma * (p.a - p.R0) / p.v0;
    d.z_cut = z_cut;
    return d;
}

namespace {

// S(i, j) = int_{-1}^{x_i} l_j(u) du for the Lagrange basis on the Gauss nodes.
Eigen::MatrixXd cumulative_gl_matrix(const GaussRule& r) {
    using boost::math::legendre_p;
    const int n = static_cast<int>(r.nodes.size());
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double xi = r.nodes[i], xj = r.nodes[j];
            double acc = 0.5 * (xi + 1.0);
            for (int k = 1; k < n; ++k)
                acc += 0.5 * legendre_p(k, xj) * (legendre_p(k + 1, xi) - legendre_p(k - 1, xi));
            S(i, j) = r.weights[j] * acc;
        }
    return S;
}

int pair_index(int n, int m, int M) {
    if (n > m) std::swap(n, m);
    return n * M - n * (n - 1) / 2 + (m - n);
}

SpatialGrid engine_grid(const DuhamelOptions& opt) {
    int N = 16;
    while (N * opt.dx < 2 * opt.x_half_width) N *= 2;
    return SpatialGrid{opt.x_offset - (N / 2) * opt.dx, N * opt.dx, N};
}

}  // namespace

DysonTerms dyson_terms(int max_l, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                       const DuhamelOptions& opt) {
    if (max_l < 1 || max_l > 2) throw std::invalid_argument("dyson_terms: max_l must be 1 or 2");
    if (opt.n_max < 0 || !(opt.dx > 0) || !(opt.panel > 0)) throw std::invalid_argument("dyson_terms: options");
    const IntegrationDomain dom = IntegrationDomain::from(p, opt.z_cut);
    const SpatialGrid grid = engine_grid(opt);
    const int N = grid.n, M = opt.n_max + 1, P = M * (M + 1) / 2;
    const Fft& fft = fft_for(N);

    DysonTerms out;
    auto init = [&](DuhamelTerm& d, int l) {
        d.l = l;
        d.t = p.t;
        d.eps = p.eps;
        d.grid = grid;
        d.fields.assign(M, cvec(N, 0.0));
        d.reduced.assign(M, cvec(N, 0.0));
    };
    init(out.first, 1);
    if (max_l == 2) init(out.second, 2);
    const double zlo = dom.z_lo(), zhi = dom.z_hi();
    if (V.is_zero() || !(zlo < zhi)) return out;

    rvec K(N);
    for (int q = 0; q < N; ++q) K[q] = grid.k(q);
    cvec eta_hat(N);
    for (int j = 0; j < N; ++j) eta_hat[j] = eta.eta(grid.x(j));
    fft.forward(eta_hat);

    // v_nm(X0 + x_j) = IFFT(base_nm * exp(i K X0)); periodic images of the
    // coupling never reach the field support for |X0| <= z_cut.
    std::vector<cvec> base(P, cvec(N));
    parallel_for(P, [&](int idx) {
        int n = 0;
        while (pair_index(n, M - 1, M) < idx) ++n;
        const int m = n + idx - pair_index(n, n, M);
        for (int q = 0; q < N; ++q)
            base[idx][q] = double(N) * std::sqrt(2 * pi) / grid.length * V.Vhat(K[q]) *
                           displacement_element(n, m, K[q]) * std::polar(1.0, K[q] * grid.lo);
    });

    const GaussRule& gl = gauss_legendre(16);
    const int G = static_cast<int>(gl.nodes.size());
    const Eigen::MatrixXd S = cumulative_gl_matrix(gl);
    const int npan = static_cast<int>(std::ceil((zhi - zlo) / opt.panel));
    const double hp = (zhi - zlo) / npan;
    const double jac = p.eps / p.v0;  // ds = (eps/v0) dz
    const double sg = p.sigma;

    std::vector<cvec> I1(M, cvec(N, 0.0)), I2(M, cvec(N, 0.0)), C(M, cvec(N, 0.0));
    // part of I_2 passing through the top level, for the truncation estimate
    std::vector<cvec> I2top(M, cvec(N, 0.0));

    std::vector<std::vector<rvec>> vx(G, std::vector<rvec>(P, rvec(N)));
    std::vector<cvec> E(G, cvec(N));
    std::vector<std::vector<cvec>> g1(G, std::vector<cvec>(M, cvec(N)));
    rvec zs(G);

    for (int pan = 0; pan < npan; ++pan) {
        const double a = zlo + pan * hp;
        for (int i = 0; i < G; ++i) {
            const double z = a + 0.5 * hp * (gl.nodes[i] + 1.0);
            zs[i] = z;
            const double s = dom.s_of(z);
            for (int q = 0; q < N; ++q) E[i][q] = std::polar(1.0, 0.5 * s * K[q] * K[q]);
            const double X0 = sg * z;
            parallel_for(P, [&](int idx) {
                cvec w(N);
                for (int q = 0; q < N; ++q) w[q] = base[idx][q] * std::polar(1.0, K[q] * X0);
                fft.inverse(w);
                for (int j = 0; j < N; ++j) vx[i][idx][j] = w[j].real();
            });
            cvec es(N);
            for (int q = 0; q < N; ++q) es[q] = eta_hat[q] * std::conj(E[i][q]);
            fft.inverse(es);
            parallel_for(M, [&](int n) {
                cvec w(N);
                const rvec& v = vx[i][pair_index(n, 0, M)];
                for (int j = 0; j < N; ++j) w[j] = v[j] * es[j];
                fft.forward(w);
                const cplx ph = -I * std::polar(1.0, n * z / p.v0);
                for (int q = 0; q < N; ++q) g1[i][n][q] = ph * E[i][q] * w[q];
            });
        }
        const double scale = 0.5 * hp * jac;
        if (max_l == 2) {
            for (int i = 0; i < G; ++i) {
                // running inner integral at node i, back in x space at time s_i
                std::vector<cvec> Cx(M, cvec(N));
                parallel_for(M, [&](int m) {
                    for (int q = 0; q < N; ++q) {
                        cplx acc = C[m][q];
                        for (int j = 0; j < G; ++j) acc += scale * S(i, j) * g1[j][m][q];
                        Cx[m][q] = acc * std::conj(E[i][q]);
                    }
                    fft.inverse(Cx[m]);
                });
                parallel_for(M, [&](int n) {
                    cvec y(N, 0.0), yt(N);
                    for (int m = 0; m < M; ++m) {
                        const cplx ph = std::polar(1.0, (n - m) * zs[i] / p.v0);
                        const rvec& v = vx[i][pair_index(n, m, M)];
                        for (int j = 0; j < N; ++j) y[j] += ph * v[j] * Cx[m][j];
                        if (m == M - 1)
                            for (int j = 0; j < N; ++j) yt[j] = ph * v[j] * Cx[m][j];
                    }
                    fft.forward(y);
                    fft.forward(yt);
                    const cplx w = scale * gl.weights[i] * (-I);
                    for (int q = 0; q < N; ++q) {
                        I2[n][q] += w * E[i][q] * y[q];
                        I2top[n][q] += w * E[i][q] * yt[q];
                    }
                });
            }
        }
        for (int n = 0; n < M; ++n)
            for (int q = 0; q < N; ++q) {
                cplx acc = 0.0;
                for (int i = 0; i < G; ++i) acc += gl.weights[i] * g1[i][n][q];
                I1[n][q] += scale * acc;
                C[n][q] += scale * acc;
            }
    }

    auto finish = [&](DuhamelTerm& d, std::vector<cvec>& acc) {
        for (int n = 0; n < M; ++n) {
            fft.inverse(acc[n]);
            d.reduced[n] = acc[n];
            const cplx ph = std::polar(1.0, n * dom.s_star / p.eps);
            for (int j = 0; j < N; ++j) d.fields[n][j] = ph * acc[n][j];
        }
    };
    finish(out.first, I1);
    if (max_l == 2) {
        finish(out.second, I2);
        double tail = 0.0;
        for (int n = 0; n < M; ++n) tail += l2_norm_sq(I2top[n], grid.dx()) / N;
        out.second.tail_estimate = std::sqrt(tail) / (p.eps * p.eps);
        if (out.second.tail_estimate > opt.tail_tol)
            throw NumericalError("dyson_terms: intermediate level " + std::to_string(opt.n_max) + " contributes " +
                                 std::to_string(out.second.tail_estimate) + "; raise n_max");
    }
    return out;
}

DuhamelTerm duhamel_term(int l, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                         const DuhamelOptions& opt) {
    if (l == 1) return dyson_terms(1, p, V, eta, opt).first;
    if (l == 2) return dyson_terms(2, p, V, eta, opt).second;
    throw std::invalid_argument("duhamel_term: only l = 1, 2 are evaluated directly");
}

namespace {

// xi-integral of the l = 1 integrand at fixed s, with X0 the oscillator offset.
struct XiIntegrand {
    double h = 0.0;
    rvec xi;
    cvec A;  // Vhat(xi) D_n0(xi)

    XiIntegrand(int n, const PotentialSpec& V, double max_shift) {
        double peak = 0.0;
        for (double k = -30; k <= 30; k += 0.25) peak = std::max(peak, std::abs(V.Vhat(k) * displacement_element(n, 0, k)));
        double L = 1.0;
        while (L < 200 && std::max(std::abs(V.Vhat(L) * displacement_element(n, 0, L)),
                                   std::abs(V.Vhat(-L) * displacement_element(n, 0, -L))) > 1e-17 * peak)
            L += 0.5;
        h = pi / (max_shift + L + 10.0);
        const int m = static_cast<int>(std::ceil(L / h));
        for (int j = -m; j <= m; ++j) {
            xi.push_back(j * h);
            A.push_back(V.Vhat(j * h) * displacement_element(n, 0, j * h));
        }
    }

    cplx operator()(double s, double X0, double x, const EnvelopeSpec& eta) const {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const double k = xi[j];
            acc += A[j] * std::polar(1.0, k * (X0 + x) + 0.5 * s * k * k) * eta.eta(x + s * k);
        }
        return acc * h / std::sqrt(2 * pi);
    }
};

template <class F>
cplx gl_composite(const F& f, double lo, double hi, double panel) {
    if (!(lo < hi)) return 0.0;
    const GaussRule& gl = gauss_legendre(16);
    const int np = static_cast<int>(std::ceil((hi - lo) / panel));
    const double h = (hi - lo) / np;
    cplx acc = 0.0;
    for (int k = 0; k < np; ++k) {
        const double c = lo + (k + 0.5) * h;
        cplx pa = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) pa += gl.weights[i] * f(c + 0.5 * h * gl.nodes[i]);
        acc += 0.5 * h * pa;
    }
    return acc;
}

double X0_of(double s, const ModelParams& p) { return (p.R0 - p.a + p.sigma * p.v0 * s) / p.eps; }

}  // namespace

cplx duhamel_l1_direct(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                       Variables vars, double z_cut) {
    p.validate();
    if (V.is_zero()) return 0.0;
    const IntegrationDomain dom = IntegrationDomain::from(p, z_cut);
    if (vars == Variables::s) {
        const double maxX = std::max(std::abs(X0_of(0.0, p)), std::abs(X0_of(p.t, p)));
        const XiIntegrand inner(n, V, maxX + std::abs(x) + p.t * 30.0);
        auto f = [&](double s) { return -I * std::polar(1.0, s * n / p.eps) * inner(s, X0_of(s, p), x, eta); };
        return gl_composite(f, 0.0, p.t, 0.25 * p.eps / p.v0);
    }
    const XiIntegrand inner(n, V, z_cut + std::abs(x) + p.t * 30.0);
    auto f = [&](double z) {
        return -I * std::polar(1.0, n * z / p.v0) * inner(dom.s_of(z), p.sigma * z, x, eta);
    };
    return dom.eps / dom.v0 * std::polar(1.0, n * dom.s_star / p.eps) * gl_composite(f, dom.z_lo(), dom.z_hi(), 0.5);
}

rvec s_profile(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
               const rvec& s_values) {
    double maxX = 0.0;
    for (double s : s_values) maxX = std::max(maxX, std::abs(X0_of(s, p)));
    const XiIntegrand inner(n, V, maxX + std::abs(x) + p.t * 30.0);
    rvec out(s_values.size());
    for (std::size_t i = 0; i < s_values.size(); ++i) out[i] = std::abs(inner(s_values[i], X0_of(s_values[i], p), x, eta));
    return out;
}

double s_profile_argmax(int n, double x, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                        double s_lo, double s_hi, double h) {
    rvec s;
    for (double v = s_lo; v <= s_hi + 1e-12; v += h) s.push_back(v);
    const rvec f = s_profile(n, x, p, V, eta, s);
    const std::size_t k = std::max_element(f.begin(), f.end()) - f.begin();
    if (k == 0 || k + 1 == f.size()) return s[k];
    const double den = f[k - 1] - 2 * f[k] + f[k + 1];
    return den != 0.0 ? s[k] + 0.5 * h * (f[k - 1] - f[k + 1]) / den : s[k];
}

CriticalPoint stationary_point(const std::vector<int>& path, const ModelParams& p) {
    p.validate();
    const int l = static_cast<int>(path.size());
    if (l == 0) throw std::invalid_argument("stationary_point: empty path");
    const double sv = p.sigma * p.v0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * l);  // (s_1..s_l, xi_1..xi_l)
    for (int j = 0; j < l; ++j) u(j) = 0.5 * p.t;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * l, 2 * l);
    for (int j = 0; j < l; ++j) H(j, l + j) = H(l + j, j) = sv;
    CriticalPoint cp;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd g(2 * l);
        for (int j = 0; j < l; ++j) {
            const int dn = path[j] - (j == 0 ? 0 : path[j - 1]);
            g(j) = dn + sv * u(l + j);
            g(l + j) = p.R0 - p.a + sv * u(j);
        }
        const Eigen::VectorXd step = H.fullPivLu().solve(g);
        u -= step;
        cp.iterations = it + 1;
        if (step.norm() < 1e-14 * (1.0 + u.norm())) break;
    }
    cp.s.resize(l);
    cp.xi.resize(l);
    for (int j = 0; j < l; ++j) {
        cp.s[j] = u(j);
        cp.xi[j] = u(l + j);
    }
    cp.inside = cp.s.front() > 0 && cp.s.back() < p.t && std::is_sorted(cp.s.begin(), cp.s.end());
    return cp;
}

ModeState duhamel_sum(int k, const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                      const SpatialGrid& grid, int n_max) {
    if (k < 0 || k > 2) throw std::invalid_argument("duhamel_sum: k must be 0, 1 or 2");
    ModeState s = build_initial_state(p, grid, eta, n_max);
    if (k > 0) {
        const int j0 = static_cast<int>(std::lround((p.R0 - grid.lo) / grid.dx()));
        DuhamelOptions opt;
        opt.dx = grid.dx() / p.eps;
        opt.x_offset = (grid.x(j0) - p.R0) / p.eps;
        opt.n_max = n_max;
        const DysonTerms d = dyson_terms(k, p, V, eta, opt);
        const int N = d.first.grid.n;
        const double k0 = p.carrier_k();
        for (int q = 0; q < N; ++q) {
            const int j = j0 - N / 2 + q;
            if (j < 0 || j >= grid.n) continue;
            const cplx car = std::polar(1.0 / std::sqrt(p.eps), k0 * grid.x(j));
            for (int n = 0; n <= n_max; ++n) {
                cplx add = d.first.fields[n][q];
                if (k == 2) add += d.second.fields[n][q];
                s.f[n][j] += car * add;
            }
        }
    }
    return free_evolve(s, p.t);
}

std::vector<std::vector<cvec>> extrapolate_in_eps(const rvec& eps, const std::vector<std::vector<cvec>>& samples) {
    const int K = static_cast<int>(eps.size());
    if (K < 2 || samples.size() != eps.size()) throw std::invalid_argument("extrapolate_in_eps: need >= 2 samples");
    const double emax = *std::max_element(eps.begin(), eps.end());
    Eigen::MatrixXd Vm(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) Vm(i, j) = std::pow(eps[i] / emax, j);
    const auto lu = Vm.fullPivLu();
    const int M = static_cast<int>(samples[0].size());
    const int N = static_cast<int>(samples[0][0].size());
    std::vector<std::vector<cvec>> coef(K, std::vector<cvec>(M, cvec(N)));
    Eigen::VectorXcd rhs(K);
    for (int n = 0; n < M; ++n)
        for (int q = 0; q < N; ++q) {
            for (int i = 0; i < K; ++i) rhs(i) = samples[i][n][q];
            const Eigen::VectorXcd c = lu.solve(rhs);
            for (int j = 0; j < K; ++j) coef[j][n][q] = c(j) / std::pow(emax, j);
        }
    return coef;
}

ExtrapolatedCoefficients duhamel_coefficients(const ModelParams& p, const PotentialSpec& V, const EnvelopeSpec& eta,
                                              const rvec& eps_list, const DuhamelOptions& opt) {
    if (!is_stationary(p)) throw std::invalid_argument("duhamel_coefficients: needs the stationary geometry");
    std::vector<std::vector<cvec>> s1, s2;
    ExtrapolatedCoefficients out;
    for (double e : eps_list) {
        ModelParams q = p;
        q.eps = e;
        DysonTerms d = dyson_terms(2, q, V, eta, opt);
        for (auto& f : d.first.reduced)
            for (auto& v : f) v /= e;
        for (auto& f : d.second.reduced)
            for (auto& v : f) v /= e * e;
        s1.push_back(std::move(d.first.reduced));
        s2.push_back(std::move(d.second.reduced));
        out.grid = d.first.grid;
    }
    const auto c1 = extrapolate_in_eps(eps_list, s1);
    const auto c2 = extrapolate_in_eps(eps_list, s2);
    out.x = out.grid.xs();
    const double tau = impact_time(p);
    const int M = static_cast<int>(c1[0].size());
    out.l1h1 = c1[0];
    out.l1h2 = c1[1];
    out.l2h2 = c2[0];
    for (int n = 0; n < M; ++n) {
        const cplx ph = std::polar(1.0, n * tau / p.eps);
        for (auto* f : {&out.l1h1, &out.l1h2, &out.l2h2})
            for (auto& v : (*f)[n]) v *= ph;
    }
    return out;
}

}  // namespace oscs
