#include "oscs/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "oscs/basis.hpp"
#include "oscs/expansion.hpp"
#include "oscs/parallel.hpp"

namespace oscs {

SlopeFit fit_loglog(const rvec& eps, const rvec& err) {
    const int n = static_cast<int>(eps.size());
    if (n < 3 || err.size() != eps.size()) throw std::invalid_argument("fit_loglog: need at least 3 points");
    rvec x(n), y(n);
    for (int i = 0; i < n; ++i) {
        if (!(eps[i] > 0) || !(err[i] > 0)) throw std::invalid_argument("fit_loglog: values must be positive");
        x[i] = std::log(eps[i]);
        y[i] = std::log(err[i]);
    }
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    f.residuals.resize(n);
    for (int i = 0; i < n; ++i) {
        f.residuals[i] = y[i] - (f.intercept + f.slope * x[i]);
        ssr += f.residuals[i] * f.residuals[i];
    }
    f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
    f.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
    boost::math::students_t dist(n - 2);
    f.ci95 = boost::math::quantile(dist, 0.975) * f.slope_stderr;
    return f;
}

std::string to_string(StudyCase c) { return c == StudyCase::stationary ? "stationary" : "nonstationary"; }

StudyCase study_case_from(const std::string& s) {
    if (s == "stationary") return StudyCase::stationary;
    if (s == "nonstationary" || s == "non-stationary") return StudyCase::nonstationary;
    throw ConfigError("unknown case '" + s + "' (expected stationary or nonstationary)");
}

ModelParams default_params(StudyCase c, double eps) {
    ModelParams p;
    p.eps = eps;
    p.R0 = c == StudyCase::stationary ? 0.5 : 1.5;
    return p;
}

SpatialGrid study_grid(const StudyConfig& sc, const ModelParams& p, bool mirror) {
    const SpatialGrid g = scenario_grid(p, sc.points_per_wavelength, mirror);
    if (g.n > sc.max_grid_points)
        throw ConfigError("eps = " + std::to_string(p.eps) + " needs " + std::to_string(g.n) +
                          " grid points, above the budget of " + std::to_string(sc.max_grid_points));
    return g;
}

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

RunReport convergence_study(StudyCase c, int k, const rvec& eps_list, const StudyConfig& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    if (k < 0 || k > 2) throw ConfigError("order k must be 0, 1 or 2");
    if (c == StudyCase::stationary) {
        if (!is_stationary(sc.params)) throw ConfigError("stationary study needs a packet heading for the oscillator");
        if (!(sc.params.t > impact_time(sc.params))) throw ConfigError("stationary study needs t > impact time");
    }
    // validate every grid before computing anything
    for (double e : eps_list) {
        ModelParams p = sc.params;
        p.eps = e;
        study_grid(sc, p);
    }
    RunReport r;
    r.scenario = to_string(c) + "_k" + std::to_string(k);
    r.eps = eps_list;
    r.convergence.resize(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
        ModelParams p = sc.params;
        p.eps = eps_list[i];
        const SpatialGrid g = study_grid(sc, p);
        const ModeState s0 = build_initial_state(p, g, sc.eta, sc.solver.n_max);
        const EvolveResult ex = evolve_exact(s0, p.t, sc.V, sc.solver);
        const ModeState approx = c == StudyCase::stationary
                                     ? assemble_asymptotic(k, p, sc.V, sc.eta, g, sc.solver.n_max)
                                     : free_evolve(s0, p.t);
        ConvergenceRow& row = r.convergence[i];
        row.eps = p.eps;
        row.order = k;
        row.study = c;
        row.error = state_distance(ex.state, approx);
        row.grid_points = g.n;
        row.steps = ex.steps;
        row.step_error = ex.step_error_estimate;
        row.norm_drift = std::abs(ex.state.total_norm_sq() - s0.total_norm_sq());
        row.top_mode_population = ex.top_mode_population;
    });
    if (eps_list.size() >= 3) {
        rvec err;
        for (const auto& row : r.convergence) err.push_back(row.error);
        r.fit = fit_loglog(eps_list, err);
    }
    r.wall_seconds = seconds_since(t0);
    return r;
}

RunReport application_run(const rvec& eps_list, const StudyConfig& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams& base = sc.params;
    if (!(base.R0 > 0) || !is_stationary(base) || base.sigma != 1)
        throw ConfigError("application needs 0 < R0 < a with the packet moving right");
    for (double e : eps_list) {
        ModelParams p = base;
        p.eps = e;
        study_grid(sc, p, true);
    }
    RunReport r;
    r.scenario = "application";
    r.eps = eps_list;
    r.application.resize(eps_list.size());
    const double beta1 = std::abs(beta_coefficient(1, base, sc.V));
    parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
        ModelParams p = base;
        p.eps = eps_list[i];
        const SpatialGrid g = study_grid(sc, p, true);
        const ModeState s0 = build_superposition_state(p, g, sc.eta, sc.solver.n_max);
        const EvolveResult ex = evolve_exact(s0, p.t, sc.V, sc.solver);
        ApplicationRow& row = r.application[i];
        row.eps = p.eps;
        row.alpha = alpha_epsilon(p, sc.eta);
        row.p0 = mode_population(ex.state, 0);
        row.p1 = mode_population(ex.state, 1);
        row.p_plus_0 = momentum_halfline_probability(ex.state, 0, +1);
        row.p_plus_1 = momentum_halfline_probability(ex.state, 1, +1);
        row.ratio0 = row.p_plus_0 / row.p0;
        row.ratio1 = row.p_plus_1 / row.p1;
        row.p1_predicted = 0.5 * beta1 * beta1 * p.eps * p.eps;
        row.norm_drift = std::abs(ex.state.total_norm_sq() - s0.total_norm_sq());
    });
    r.wall_seconds = seconds_since(t0);
    return r;
}

double zero_potential_error(const ModelParams& p, const EnvelopeSpec& eta, const SolverConfig& cfg, double ppw) {
    const SpatialGrid g = scenario_grid(p, ppw);
    const ModeState s0 = build_initial_state(p, g, eta, cfg.n_max);
    const EvolveResult ex = evolve_exact(s0, p.t, PotentialSpec::zero(), cfg);
    ModeState ref = zero_state_like(s0);
    ref.f[0] = free_gaussian_packet(g, p.t, p.eps, p.carrier_k(), p.R0, p.eps * eta.width);
    const cplx ph = std::polar(1.0, -0.5 * p.t / p.eps);
    for (auto& v : ref.f[0]) v *= ph;
    return state_distance(ex.state, ref);
}

// ---- Lemma bound spot-check ----

namespace {

const OscillatorPropagator& lemma_propagator(const LemmaOptions& opt) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<OscillatorPropagator>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{opt.grid_half_width, opt.grid_points}];
    if (!slot) slot = std::make_unique<OscillatorPropagator>(opt.grid_half_width, opt.grid_points);
    return *slot;
}

struct HermiteFrame {
    Eigen::MatrixXd X;  // position operator in the Hermite basis
    Eigen::VectorXd w;  // its eigenvalues
    Eigen::MatrixXd Q;  // and eigenvectors
};

const HermiteFrame& hermite_frame(int B) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<HermiteFrame>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[B];
    if (!slot) {
        slot = std::make_unique<HermiteFrame>();
        slot->X = Eigen::MatrixXd::Zero(B, B);
        for (int k = 1; k < B; ++k) slot->X(k - 1, k) = slot->X(k, k - 1) = std::sqrt(k / 2.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slot->X);
        slot->w = es.eigenvalues();
        slot->Q = es.eigenvectors();
    }
    return *slot;
}

struct Stencil {
    std::vector<int> offsets;
    rvec weights;  // to be divided by h^order
};

Stencil central(int order) {
    switch (order) {
        case 1: return {{-1, 1}, {-0.5, 0.5}};
        case 2: return {{-1, 0, 1}, {1.0, -2.0, 1.0}};
        case 3: return {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
        default: throw std::invalid_argument("lemma: derivative order per slot must be <= 3");
    }
}

cvec fd_derivative(const rvec& t, const rvec& xi, const std::vector<int>& alpha, double h,
                   const LemmaOptions& opt) {
    const int n = static_cast<int>(xi.size());
    std::vector<int> slots;
    std::vector<Stencil> st;
    for (int j = 0; j < n; ++j)
        if (alpha[j] > 0) {
            slots.push_back(j);
            st.push_back(central(alpha[j]));
        }
    const int ord = std::accumulate(alpha.begin(), alpha.end(), 0);
    cvec acc;
    // odometer over the tensor-product stencil
    std::vector<std::size_t> idx(slots.size(), 0);
    while (true) {
        rvec x = xi;
        double w = 1.0;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            x[slots[k]] += st[k].offsets[idx[k]] * h;
            w *= st[k].weights[idx[k]];
        }
        const cvec z = lemma_zeta(t, x, opt);
        if (acc.empty()) acc.assign(z.size(), 0.0);
        for (std::size_t j = 0; j < z.size(); ++j) acc[j] += w * z[j];
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == st[k].offsets.size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    const double scale = std::pow(h, -ord);
    for (auto& v : acc) v *= scale;
    return acc;
}

double bracket_sum(const rvec& xi) {
    double s = 0.0;
    for (double v : xi) s += std::sqrt(1.0 + v * v);
    return s;
}

// uniform in [0, 1) from the raw 64-bit stream, independent of the library's distributions
double unit(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

}  // namespace

cvec lemma_zeta(const rvec& t, const rvec& xi, const LemmaOptions& opt) {
    if (xi.empty() || t.size() + 1 != xi.size()) throw std::invalid_argument("lemma_zeta: need n xi and n-1 t");
    const OscillatorPropagator& U = lemma_propagator(opt);
    const rvec& y = U.grid();
    cvec v(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) v[j] = hermite_fn(0, y[j]) * std::polar(1.0, -xi[0] * y[j]);
    for (std::size_t k = 1; k < xi.size(); ++k) {
        v = U.apply_eigen_sum(t[k - 1], v);
        for (std::size_t j = 0; j < y.size(); ++j) v[j] *= std::polar(1.0, -xi[k] * y[j]);
    }
    return v;
}

double lemma_derivative_norm_fd(const rvec& t, const rvec& xi, const std::vector<int>& alpha,
                                const LemmaOptions& opt) {
    if (alpha.size() != xi.size()) throw std::invalid_argument("lemma: multi-index length");
    const double dy = lemma_propagator(opt).dy();
    if (std::accumulate(alpha.begin(), alpha.end(), 0) == 0) return l2_norm(lemma_zeta(t, xi, opt), dy);
    const double h = opt.fd_step;
    const cvec d1 = fd_derivative(t, xi, alpha, h, opt);
    const cvec d2 = fd_derivative(t, xi, alpha, h / 2, opt);
    const cvec d4 = fd_derivative(t, xi, alpha, h / 4, opt);
    cvec r1(d1.size()), r2(d1.size()), diff(d1.size());
    for (std::size_t j = 0; j < d1.size(); ++j) {
        r1[j] = (4.0 * d2[j] - d1[j]) / 3.0;
        r2[j] = (4.0 * d4[j] - d2[j]) / 3.0;
        diff[j] = r1[j] - r2[j];
    }
    const double nr = l2_norm(r2, dy);
    if (l2_norm(diff, dy) > opt.fd_tol * nr)
        throw NumericalError("lemma: Richardson estimate did not converge (relative change " +
                             std::to_string(l2_norm(diff, dy) / nr) + ")");
    return nr;
}

double lemma_derivative_norm_exact(const rvec& t, const rvec& xi, const std::vector<int>& alpha,
                                   const LemmaOptions& opt) {
    const HermiteFrame& F = hermite_frame(opt.basis_size);
    const int B = opt.basis_size;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(B);
    v(0) = 1.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
        if (j > 0)
            for (int k = 0; k < B; ++k) v(k) *= std::polar(1.0, -(k + 0.5) * t[j - 1]);
        for (int a = 0; a < alpha[j]; ++a) v = (F.X * v).eval();
        Eigen::VectorXcd c = F.Q.transpose() * v;
        for (int k = 0; k < B; ++k) c(k) *= std::polar(1.0, -xi[j] * F.w(k));
        v = F.Q * c;
    }
    return v.norm();
}

RunReport lemma_bound_check(const std::vector<std::vector<int>>& alphas, const LemmaOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int nf = opt.factors;
    if (nf < 1 || nf > 3) throw ConfigError("lemma check supports 1 to 3 factors");
    RunReport r;
    r.scenario = "lemma";
    for (const auto& alpha : alphas) {
        if (static_cast<int>(alpha.size()) != nf) throw ConfigError("multi-index length must equal the factor count");
        const int ord = std::accumulate(alpha.begin(), alpha.end(), 0);
        if (ord > 3) throw ConfigError("|alpha| must be at most 3");
        LemmaAlphaResult res;
        res.alpha = alpha;
        if (ord == 1) res.proof_bound = 1.0 + std::sqrt(2.0);
        auto ratio_exact = [&](const rvec& v) {
            rvec t(v.begin(), v.begin() + (nf - 1)), xi(v.begin() + (nf - 1), v.end());
            return lemma_derivative_norm_exact(t, xi, alpha, opt) / std::pow(bracket_sum(xi), ord);
        };
        for (std::uint64_t seed : opt.seeds) {
            std::mt19937_64 gen(seed);
            std::vector<rvec> pts(opt.samples);
            for (auto& v : pts) {
                v.resize(2 * nf - 1);
                for (int j = 0; j < nf - 1; ++j) v[j] = 2 * pi * unit(gen);
                for (int j = nf - 1; j < 2 * nf - 1; ++j) v[j] = opt.xi_box * (2 * unit(gen) - 1);
            }
            rvec fd_ratio(opt.samples), gap(opt.samples), znorm(opt.samples);
            parallel_for(opt.samples, [&](int s) {
                rvec v = pts[s];
                if (opt.refine && ord > 0) {
                    // Hooke-Jeeves coordinate ascent of the ratio inside the box
                    double f = ratio_exact(v), step = 0.5;
                    while (step > opt.ascent_tol) {
                        bool moved = false;
                        for (std::size_t i = 0; i < v.size() && !moved; ++i)
                            for (int sgn : {+1, -1}) {
                                rvec w = v;
                                w[i] += sgn * step;
                                if (static_cast<int>(i) >= nf - 1) w[i] = std::clamp(w[i], -opt.xi_box, opt.xi_box);
                                const double g = ratio_exact(w);
                                if (g > f) {
                                    v = w;
                                    f = g;
                                    moved = true;
                                    break;
                                }
                            }
                        if (!moved) step /= 2;
                    }
                }
                rvec t(v.begin(), v.begin() + (nf - 1)), xi(v.begin() + (nf - 1), v.end());
                const double fd = lemma_derivative_norm_fd(t, xi, alpha, opt);
                const double ex = lemma_derivative_norm_exact(t, xi, alpha, opt);
                fd_ratio[s] = fd / std::pow(bracket_sum(xi), ord);
                gap[s] = std::abs(fd - ex) / ex;
                znorm[s] = ord == 0 ? std::abs(fd - 1.0) : 0.0;
            });
            res.c_per_seed.push_back(*std::max_element(fd_ratio.begin(), fd_ratio.end()));
            res.fd_vs_exact = std::max(res.fd_vs_exact, *std::max_element(gap.begin(), gap.end()));
            res.zeta_norm_error = std::max(res.zeta_norm_error, *std::max_element(znorm.begin(), znorm.end()));
        }
        const auto [mn, mx] = std::minmax_element(res.c_per_seed.begin(), res.c_per_seed.end());
        res.c_alpha = *mx;
        res.spread = *mx > 0 ? (*mx - *mn) / *mx : 0.0;
        r.lemma.push_back(res);
    }
    r.wall_seconds = seconds_since(t0);
    return r;
}

bool shrinks_with_eps(const rvec& eps, const rvec& dev, double floor) {
    std::vector<std::size_t> order(eps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (std::abs(dev[order[i]]) > std::max(std::abs(dev[order[i - 1]]), floor)) return false;
    return true;
}

}  // namespace oscs
