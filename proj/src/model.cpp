#include "oscs/model.hpp"

#include <algorithm>
#include <cmath>

#include "oscs/basis.hpp"

namespace oscs {

void ModelParams::validate() const {
    if (!(eps > 0)) throw ConfigError("eps must be positive");
    if (!(v0 > 0)) throw ConfigError("v0 must be positive");
    if (sigma != 1 && sigma != -1) throw ConfigError("branch must be + or -");
    if (!(t >= 0)) throw ConfigError("t must be non-negative");
    if (!std::isfinite(R0) || !std::isfinite(a)) throw ConfigError("R0 and a must be finite");
}

double impact_time(const ModelParams& p) {
    if (!(p.v0 > 0)) throw std::invalid_argument("impact_time: v0 must be positive");
    return std::abs(p.R0 - p.a) / p.v0;
}

bool is_stationary(const ModelParams& p) {
    return (p.sigma > 0 && p.R0 < p.a) || (p.sigma < 0 && p.R0 > p.a);
}

cplx hermite_he(int j, cplx u) {
    if (j == 0) return 1.0;
    cplx h0 = 1.0, h1 = u;
    for (int i = 1; i < j; ++i) {
        cplx h2 = u * h1 - double(i) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double GaussianShape::deriv(int j, double x) const {
    if (amplitude == 0.0) return 0.0;
    const double u = (x - center) / width;
    const double g = amplitude * std::exp(-0.5 * u * u);
    if (j == 0) return g;
    const double sgn = (j % 2) ? -1.0 : 1.0;
    return sgn * std::pow(width, -j) * hermite_he(j, u).real() * g;
}

cplx GaussianShape::fourier_deriv(int j, double xi) const {
    if (amplitude == 0.0) return 0.0;
    const double w = width;
    const cplx f = amplitude * w * std::exp(-0.5 * w * w * xi * xi - I * (center * xi));
    if (j == 0) return f;
    // f = C exp(-(u^2)/2) with u = w xi + i c/w
    const double sgn = (j % 2) ? -1.0 : 1.0;
    return sgn * std::pow(w, j) * hermite_he(j, cplx(w * xi, center / w)) * f;
}

PotentialSpec PotentialSpec::gaussian(double amplitude, double center, double width) {
    if (!(width > 0)) throw ConfigError("potential width must be positive");
    return PotentialSpec{GaussianShape{amplitude, center, width}};
}

double EnvelopeSpec::deriv(int j, double x) const {
    GaussianShape g{std::pow(pi, -0.25) / std::sqrt(width), 0.0, width};
    return g.deriv(j, x);
}

namespace {
struct OscQuadGrid {
    double Y, dy;
    int npts;
};
OscQuadGrid osc_grid(int nmax, const PotentialSpec& V) {
    OscQuadGrid g;
    g.Y = std::sqrt(2.0 * nmax + 1.0) + 12.0;
    g.dy = std::min(0.02, V.shape.width / 12.0);
    g.npts = static_cast<int>(std::ceil(2 * g.Y / g.dy)) + 1;
    return g;
}
}  // namespace

double coupling_value(int n, int m, double X, const PotentialSpec& V) {
    if (V.is_zero()) return 0.0;
    const int nmax = std::max(n, m);
    const auto g = osc_grid(nmax, V);
    rvec phi(nmax + 1);
    double acc = 0.0;
    for (int j = 0; j < g.npts; ++j) {
        const double y = -g.Y + j * g.dy;
        hermite_fns(nmax, y, phi.data());
        acc += phi[n] * phi[m] * V.V(X - y);
    }
    return acc * g.dy;
}

double coupling_matrix(int n, int m, double R, const ModelParams& p, const PotentialSpec& V) {
    return coupling_value(n, m, (R - p.a) / p.eps, V);
}

double coupling_matrix_fourier(int n, int m, double R, const ModelParams& p, const PotentialSpec& V) {
    if (V.is_zero()) return 0.0;
    const double X = (R - p.a) / p.eps;
    OscQuadSpec spec;
    // D_nm decays like exp(-xi^2/4) times a polynomial; Vhat like exp(-w^2 xi^2/2)
    spec.decay_width = std::min(std::sqrt(2.0) * (1.0 + 0.3 * std::sqrt(n + m + 1.0)),
                                V.fourier_decay_width() * 1.5);
    spec.max_frequency = std::abs(X) + std::abs(V.shape.center) + std::sqrt(2.0 * (n + m) + 2.0);
    spec.tol = 1e-13;
    const cplx v = decaying_oscillatory_quad(
        [&](double xi) { return V.Vhat(xi) * displacement_element(n, m, xi) * std::exp(I * (xi * X)); },
        spec);
    return v.real() / std::sqrt(2 * pi);
}

rvec coupling_table(int n_max, const rvec& X, const PotentialSpec& V) {
    const int M = n_max + 1;
    rvec out(X.size() * M * M, 0.0);
    if (V.is_zero()) return out;
    const auto g = osc_grid(n_max, V);
    HermiteBasis basis(n_max);
    const Eigen::MatrixXd& phi = basis.table(-g.Y, g.dy, g.npts);
    // pair products once; symmetric fill
    Eigen::MatrixXd prod(M * (M + 1) / 2, g.npts);
    int r = 0;
    for (int n = 0; n < M; ++n)
        for (int m = n; m < M; ++m, ++r) prod.row(r) = phi.row(n).cwiseProduct(phi.row(m));
    Eigen::VectorXd vy(g.npts);
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (int j = 0; j < g.npts; ++j) vy[j] = V.V(X[i] - (-g.Y + j * g.dy));
        Eigen::VectorXd s = prod * vy * g.dy;
        double* blk = &out[i * M * M];
        r = 0;
        for (int n = 0; n < M; ++n)
            for (int m = n; m < M; ++m, ++r) blk[n * M + m] = blk[m * M + n] = s[r];
    }
    return out;
}

double weighted_norm(const DerivFn& f, int k, int p, const WeightedNormOptions& opt) {
    if (k < 0) throw std::invalid_argument("weighted_norm: k < 0");
    if (p != 0 && p != 1 && p != 2) throw std::invalid_argument("weighted_norm: p must be 1, 2 or inf(0)");
    auto eval = [&](double W) {
        const int m = static_cast<int>(std::ceil(W / opt.dx));
        double total = 0.0;
        for (int j = 0; j <= k; ++j) {
            double acc = 0.0;
            for (int i = -m; i <= m; ++i) {
                const double x = i * opt.dx;
                const double br = std::pow(1.0 + x * x, 0.5 * (k - j));
                const double v = std::abs(f(j, x)) * br;
                if (p == 1) acc += v;
                else if (p == 2) acc += v * v;
                else acc = std::max(acc, v);
            }
            if (p == 1) acc *= opt.dx;
            if (p == 2) acc = std::sqrt(acc * opt.dx);
            total += acc;
        }
        return total;
    };
    const double inner = eval(opt.window);
    const double outer = eval(2 * opt.window);
    if (std::abs(outer - inner) > 0.01 * outer)
        throw NumericalError("weighted_norm: tail beyond the window exceeds 1% of the value");
    return outer;
}

DerivFn times_bracket_sq(DerivFn f) {
    return [f = std::move(f)](int j, double x) -> cplx {
        // (1+x^2)^{(0)} = 1+x^2, ^{(1)} = 2x, ^{(2)} = 2
        cplx r = (1 + x * x) * f(j, x);
        if (j >= 1) r += double(j) * 2 * x * f(j - 1, x);
        if (j >= 2) r += double(j) * (j - 1) / 2.0 * 2.0 * f(j - 2, x);
        return r;
    };
}

HypothesisNorms hypothesis_norms(const PotentialSpec& V, const EnvelopeSpec& eta, int k) {
    DerivFn v = [&V](int j, double x) -> cplx { return V.V_deriv(j, x); };
    DerivFn vh = [&V](int j, double x) -> cplx { return V.Vhat_deriv(j, x); };
    DerivFn e = [&eta](int j, double x) -> cplx { return eta.deriv(j, x); };
    WeightedNormOptions opt;
    opt.window = std::max({20.0, 2 * V.support_radius(), 2 * eta.support_radius()});
    HypothesisNorms h;
    h.V_k1_1 = weighted_norm(v, k + 1, 1, opt);
    h.Vbr2_k2_1 = weighted_norm(times_bracket_sq(v), k + 2, 1, opt);
    h.Vhatbr2_k2_1 = weighted_norm(times_bracket_sq(vh), k + 2, 1, opt);
    h.eta_k2_2 = weighted_norm(e, k + 2, 2, opt);
    return h;
}

SpatialGrid scenario_grid(const ModelParams& p, double ppw, bool mirror) {
    p.validate();
    const double end = p.R0 + p.sigma * p.v0 * p.t;
    double lo = std::min(p.R0, end), hi = std::max(p.R0, end);
    // the oscillator region, extended by the travel distance on the outgoing side
    if (p.sigma > 0) hi = std::max(hi, p.a + p.v0 * p.t);
    else lo = std::min(lo, p.a - p.v0 * p.t);
    if (mirror) {
        lo = std::min({lo, -p.R0, -p.R0 - p.sigma * p.v0 * p.t});
        hi = std::max({hi, -p.R0, -p.R0 - p.sigma * p.v0 * p.t});
    }
    return SpatialGrid::covering(lo - 3.0, hi + 3.0, p.carrier_wavelength() / ppw);
}

double alpha_epsilon(const ModelParams& p, const EnvelopeSpec& eta) {
    // overlap integrand eta(x) eta(x + 2R0/eps) cos(2 v0 (x/eps + R0/eps^2)), centred at -R0/eps
    const double shift = 2 * p.R0 / p.eps;
    const double freq = 2 * p.v0 / p.eps;
    const double c = -0.5 * shift;
    const double W = 2 * eta.support_radius();
    const double h = std::min(0.02 * eta.width, pi / (8 * freq));
    const int m = static_cast<int>(std::ceil(W / h));
    double acc = 0.0;
    for (int i = -m; i <= m; ++i) {
        const double x = c + i * h;
        acc += eta.eta(x) * eta.eta(x + shift) * std::cos(freq * (x + p.R0 / p.eps));
    }
    acc *= h;
    return 1.0 / std::sqrt(2.0 * (1.0 + acc));
}

cvec wave_packet(const SpatialGrid& grid, double eps, double v0, int s, double c, const EnvelopeSpec& eta) {
    cvec f(grid.n);
    const double k0 = s * v0 / (eps * eps);
    const double amp = 1.0 / std::sqrt(eps);
    for (int j = 0; j < grid.n; ++j) {
        const double R = grid.x(j);
        f[j] = amp * std::polar(1.0, k0 * R) * eta.eta((R - c) / eps);
    }
    return f;
}

}  // namespace oscs
