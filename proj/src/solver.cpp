#include "oscs/solver.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "oscs/parallel.hpp"

namespace oscs {

double ModeState::total_norm_sq() const {
    double acc = 0.0;
    for (const auto& fn : f) acc += l2_norm_sq(fn, grid.dx());
    return acc;
}

namespace {
void check_resolution(const ModelParams& p, const SpatialGrid& grid, double min_ppw) {
    const double ppw = p.carrier_wavelength() / grid.dx();
    if (ppw < min_ppw) {
        const double need = grid.length / (p.carrier_wavelength() / min_ppw);
        int n = 1;
        while (n < need) n <<= 1;
        throw ConfigError("grid under-resolves the carrier: " + std::to_string(ppw) +
                          " points per wavelength, need >= " + std::to_string(min_ppw) +
                          " (N >= " + std::to_string(n) + " on this domain)");
    }
}
}  // namespace

ModeState build_initial_state(const ModelParams& p, const SpatialGrid& grid, const EnvelopeSpec& eta,
                              int n_max, double min_ppw) {
    p.validate();
    check_resolution(p, grid, min_ppw);
    ModeState s{grid, p, 0.0, std::vector<cvec>(n_max + 1, cvec(grid.n, 0.0))};
    s.f[0] = wave_packet(grid, p.eps, p.v0, p.sigma, p.R0, eta);
    return s;
}

ModeState build_superposition_state(const ModelParams& p, const SpatialGrid& grid,
                                    const EnvelopeSpec& eta, int n_max, double min_ppw) {
    p.validate();
    check_resolution(p, grid, min_ppw);
    ModeState s{grid, p, 0.0, std::vector<cvec>(n_max + 1, cvec(grid.n, 0.0))};
    const double alpha = alpha_epsilon(p, eta);
    cvec plus = wave_packet(grid, p.eps, p.v0, p.sigma, p.R0, eta);
    cvec minus = wave_packet(grid, p.eps, p.v0, -p.sigma, -p.R0, eta);
    for (int j = 0; j < grid.n; ++j) s.f[0][j] = alpha * (plus[j] + minus[j]);
    return s;
}

ModeState zero_state_like(const ModeState& s) {
    ModeState z = s;
    for (auto& fn : z.f) std::fill(fn.begin(), fn.end(), cplx(0.0));
    return z;
}

double state_distance(const ModeState& a, const ModeState& b) {
    if (a.f.size() != b.f.size() || a.grid.n != b.grid.n)
        throw std::invalid_argument("state_distance: shape mismatch");
    double acc = 0.0;
    for (std::size_t n = 0; n < a.f.size(); ++n) {
        double s = 0.0;
        for (int j = 0; j < a.grid.n; ++j) s += std::norm(a.f[n][j] - b.f[n][j]);
        acc += s;
    }
    return std::sqrt(acc * a.grid.dx());
}

ModeState free_evolve(const ModeState& s, double t) {
    ModeState out = s;
    const double eps = s.params.eps;
    parallel_for(static_cast<int>(s.f.size()), [&](int n) {
        out.f[n] = free_propagate(s.grid, s.f[n], t, eps);
        const cplx ph = std::polar(1.0, -(n + 0.5) * t / eps);
        for (auto& v : out.f[n]) v *= ph;
    });
    out.time = s.time + t;
    return out;
}

void SolverConfig::validate() const {
    if (dt < 0 || !(dt_factor > 0)) throw ConfigError("time step must be positive");
    if (n_max < 4) throw ConfigError("n_max must be at least 4");
    if (order != 2 && order != 4) throw ConfigError("splitting order must be 2 or 4");
    if (!(spill_threshold > 0)) throw ConfigError("spill threshold must be positive");
}

Solver::Solver(const SpatialGrid& grid, const ModelParams& p, const PotentialSpec& V, const SolverConfig& cfg)
    : grid_(grid), p_(p), cfg_(cfg), M_(cfg.n_max + 1) {
    cfg.validate();
    if (V.is_zero()) return;
    // points where some V_nm can exceed ~1e-20
    const double reach = std::sqrt(2.0 * cfg.n_max + 1.0) + 10.0 + V.support_radius();
    rvec X;
    for (int j = 0; j < grid.n; ++j) {
        const double x = (grid.x(j) - p.a) / p.eps;
        if (std::abs(x) <= reach) {
            active_.push_back(j);
            X.push_back(x);
        }
    }
    const rvec table = coupling_table(cfg.n_max, X, V);
    const std::size_t na = active_.size();
    eigval_.assign(na * M_, 0.0);
    eigvec_.assign(na * M_ * M_, 0.0);
    parallel_for(static_cast<int>(na), [&](int i) {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Vm(
            &table[i * M_ * M_], M_, M_);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Vm);
        for (int k = 0; k < M_; ++k) eigval_[i * M_ + k] = es.eigenvalues()[k];
        for (int r = 0; r < M_; ++r)
            for (int k = 0; k < M_; ++k) eigvec_[(i * M_ + r) * M_ + k] = es.eigenvectors()(r, k);
    });
}

cvec Solver::unitaries(double h) const {
    const std::size_t na = active_.size();
    cvec U(na * M_ * M_);
    parallel_for(static_cast<int>(na), [&](int i) {
        const double* Q = &eigvec_[i * M_ * M_];
        const double* lam = &eigval_[i * M_];
        cvec ph(M_);
        for (int k = 0; k < M_; ++k) ph[k] = std::polar(1.0, -h * lam[k]);
        cplx* blk = &U[i * M_ * M_];
        for (int r = 0; r < M_; ++r)
            for (int c = 0; c < M_; ++c) {
                cplx acc = 0.0;
                for (int k = 0; k < M_; ++k) acc += Q[r * M_ + k] * ph[k] * Q[c * M_ + k];
                blk[r * M_ + c] = acc;
            }
    });
    return U;
}

ModeState Solver::evolve(const ModeState& s0, double t, int steps) const {
    if (s0.n_max() != cfg_.n_max) throw std::invalid_argument("Solver::evolve: n_max mismatch");
    if (steps < 1) throw std::invalid_argument("Solver::evolve: steps < 1");
    const double dt = t / steps;
    const double eps = p_.eps;

    // coupling weights per step; the free flow fills the gaps between them
    std::vector<double> w;
    if (cfg_.order == 2) {
        w = {1.0};
    } else {
        const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        w = {w1, 1.0 - 2.0 * w1, w1};
    }
    const int S = static_cast<int>(w.size());
    std::vector<double> gap(S + 1);
    gap[0] = w[0] / 2;
    for (int i = 1; i < S; ++i) gap[i] = (w[i - 1] + w[i]) / 2;
    gap[S] = w[S - 1] / 2;
    const double wrap = gap[S] + gap[0];

    std::vector<cvec> U(S);
    for (int i = 0; i < S; ++i) {
        bool found = false;
        for (int k = 0; k < i && !found; ++k)
            if (w[k] == w[i]) { U[i] = U[k]; found = true; }
        if (!found) U[i] = unitaries(w[i] * dt);
    }

    // free multipliers per distinct gap fraction, per mode
    const int N = grid_.n;
    auto free_mult = [&](double frac) {
        std::vector<cvec> m(M_, cvec(N));
        parallel_for(M_, [&](int n) {
            for (int j = 0; j < N; ++j) {
                const double k = grid_.k(j);
                m[n][j] = std::polar(1.0, -frac * dt * (eps * eps * k * k / 2 + (n + 0.5) / eps));
            }
        });
        return m;
    };
    std::vector<std::vector<cvec>> G(S + 1);
    for (int i = 0; i <= S; ++i) G[i] = free_mult(gap[i]);
    const std::vector<cvec> Gwrap = free_mult(wrap);

    const Fft& fft = fft_for(N);
    ModeState s = s0;
    parallel_for(M_, [&](int n) { fft.forward(s.f[n]); });

    auto coupling = [&](const cvec& Ui) {
        const std::size_t na = active_.size();
        parallel_for(static_cast<int>(na), [&](int i) {
            const int j = active_[i];
            const cplx* blk = &Ui[i * M_ * M_];
            cplx in[64], out[64];
            for (int m = 0; m < M_; ++m) in[m] = s.f[m][j];
            for (int r = 0; r < M_; ++r) {
                cplx acc = 0.0;
                for (int c = 0; c < M_; ++c) acc += blk[r * M_ + c] * in[c];
                out[r] = acc;
            }
            for (int m = 0; m < M_; ++m) s.f[m][j] = out[m];
        });
    };

    for (int step = 0; step < steps; ++step) {
        for (int i = 0; i < S; ++i) {
            const auto& mult = (i == 0 && step > 0) ? Gwrap : G[i];
            parallel_for(M_, [&](int n) {
                for (int j = 0; j < N; ++j) s.f[n][j] *= mult[n][j];
                fft.inverse(s.f[n]);
            });
            if (!active_.empty()) coupling(U[i]);
            parallel_for(M_, [&](int n) { fft.forward(s.f[n]); });
        }
    }
    parallel_for(M_, [&](int n) {
        for (int j = 0; j < N; ++j) s.f[n][j] *= G[S][n][j];
        fft.inverse(s.f[n]);
    });
    s.time = s0.time + t;
    return s;
}

EvolveResult evolve_exact(const ModeState& s, double t, const PotentialSpec& V, const SolverConfig& cfg) {
    if (cfg.n_max + 1 > 64) throw ConfigError("n_max above 63 is not supported");
    Solver solver(s.grid, s.params, V, cfg);
    EvolveResult r;
    const double h = cfg.step_for(s.params.eps);
    r.steps = std::max(1, static_cast<int>(std::ceil(t / h - 1e-9)));
    r.dt = t / r.steps;
    r.state = solver.evolve(s, t, r.steps);
    if (cfg.step_check) {
        ModeState fine = solver.evolve(s, t, 2 * r.steps);
        const double factor = (cfg.order == 4 ? 15.0 : 3.0);
        r.step_error_estimate = state_distance(r.state, fine) / factor;
        r.state = std::move(fine);
        r.steps *= 2;
        r.dt /= 2;
        if (r.step_error_estimate > cfg.step_tolerance)
            throw NumericalError("step-size rejected: step-halving error estimate " +
                                 std::to_string(r.step_error_estimate) + " exceeds tolerance " +
                                 std::to_string(cfg.step_tolerance));
    }
    r.top_mode_population = mode_population(r.state, r.state.n_max());
    if (r.top_mode_population > cfg.spill_threshold)
        throw NumericalError("mode spill: population of level " + std::to_string(r.state.n_max()) + " is " +
                             std::to_string(r.top_mode_population) + "; raise n_max");
    return r;
}

double mode_population(const ModeState& s, int n) {
    if (n < 0 || n > s.n_max()) throw std::out_of_range("mode_population: n");
    return l2_norm_sq(s.f[n], s.grid.dx());
}

double momentum_halfline_probability(const ModeState& s, int n, int sign) {
    if (n < 0 || n > s.n_max()) throw std::out_of_range("momentum_halfline_probability: n");
    if (sign != 1 && sign != -1) throw std::invalid_argument("momentum_halfline_probability: sign");
    cvec g = s.f[n];
    fft_for(s.grid.n).forward(g);
    double acc = 0.0;
    for (int j = 0; j < s.grid.n; ++j) {
        const double k = s.grid.k(j);
        if (k * sign > 0) acc += std::norm(g[j]);
        else if (k == 0) acc += 0.5 * std::norm(g[j]);
    }
    // Parseval for the unnormalized forward transform
    return acc * s.grid.dx() / s.grid.n;
}

namespace {
constexpr char kMagic[8] = {'O', 'S', 'C', 'S', 'C', 'K', 'P', '1'};

template <class T>
void put(std::ofstream& o, T v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& i) {
    T v;
    i.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!i) throw std::runtime_error("checkpoint: truncated file");
    return v;
}
}  // namespace

void write_checkpoint(const ModeState& s, const std::string& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("checkpoint: cannot open " + path);
    o.write(kMagic, 8);
    put<double>(o, s.params.eps);
    put<double>(o, s.params.v0);
    put<double>(o, s.params.R0);
    put<double>(o, s.params.a);
    put<std::int32_t>(o, s.params.sigma);
    put<double>(o, s.params.t);
    put<double>(o, s.time);
    put<double>(o, s.grid.lo);
    put<double>(o, s.grid.length);
    put<std::int32_t>(o, s.grid.n);
    put<std::int32_t>(o, static_cast<std::int32_t>(s.f.size()));
    for (const auto& fn : s.f) o.write(reinterpret_cast<const char*>(fn.data()), fn.size() * sizeof(cplx));
    if (!o) throw std::runtime_error("checkpoint: write failed for " + path);
}

ModeState read_checkpoint(const std::string& path) {
    std::ifstream i(path, std::ios::binary);
    if (!i) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    i.read(magic, 8);
    if (!i || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("checkpoint: bad magic in " + path);
    ModeState s;
    s.params.eps = get<double>(i);
    s.params.v0 = get<double>(i);
    s.params.R0 = get<double>(i);
    s.params.a = get<double>(i);
    s.params.sigma = get<std::int32_t>(i);
    s.params.t = get<double>(i);
    s.time = get<double>(i);
    s.grid.lo = get<double>(i);
    s.grid.length = get<double>(i);
    s.grid.n = get<std::int32_t>(i);
    const int modes = get<std::int32_t>(i);
    if (s.grid.n <= 0 || modes <= 0 || modes > 64) throw std::runtime_error("checkpoint: bad header");
    s.f.assign(modes, cvec(s.grid.n));
    for (auto& fn : s.f) {
        i.read(reinterpret_cast<char*>(fn.data()), fn.size() * sizeof(cplx));
        if (!i) throw std::runtime_error("checkpoint: truncated data");
    }
    return s;
}

}  // namespace oscs
