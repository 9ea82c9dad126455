#include "oscs/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <fftw3.h>

namespace oscs {

namespace {
std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

template <int N>
GaussRule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    // boost stores the non-negative half; zero first when N is odd
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.nodes.push_back(-a[i]);
        r.weights.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.nodes.push_back(a[i]);
        r.weights.push_back(w[i]);
    }
    return r;
}
}  // namespace

rvec SpatialGrid::xs() const {
    rvec v(n);
    for (int j = 0; j < n; ++j) v[j] = x(j);
    return v;
}

rvec SpatialGrid::ks() const {
    rvec v(n);
    for (int j = 0; j < n; ++j) v[j] = k(j);
    return v;
}

SpatialGrid SpatialGrid::covering(double lo, double hi, double max_dx) {
    if (!(hi > lo) || !(max_dx > 0)) throw std::invalid_argument("SpatialGrid::covering: bad range");
    const double need = (hi - lo) / max_dx;
    int n = 16;
    while (n < need) {
        if (n > (1 << 26)) throw std::invalid_argument("SpatialGrid::covering: grid too large");
        n <<= 1;
    }
    return SpatialGrid{lo, hi - lo, n};
}

Fft::Fft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    // FFTW_ESTIMATE keeps plan selection (and thus rounding) reproducible run to run
    auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    fwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!fwd_ || !bwd_) throw std::runtime_error("FFTW plan creation failed");
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft::forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft::inverse(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
    const double s = 1.0 / n_;
    for (int j = 0; j < n_; ++j) data[j] *= s;
}

const Fft& fft_for(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Fft>> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto& p = plans[n];
    if (!p) p = std::make_unique<Fft>(n);
    return *p;
}

double l2_norm_sq(const cvec& f, double dx) {
    double acc = 0.0;
    for (const auto& v : f) acc += std::norm(v);
    return acc * dx;
}

cvec free_propagate(const SpatialGrid& grid, const cvec& f, double t, double eps) {
    if (static_cast<int>(f.size()) != grid.n) throw std::invalid_argument("free_propagate: size");
    cvec g = f;
    const Fft& fft = fft_for(grid.n);
    fft.forward(g);
    const double c = t * eps * eps / 2;
    for (int j = 0; j < grid.n; ++j) {
        const double k = grid.k(j);
        g[j] *= std::polar(1.0, -c * k * k);
    }
    fft.inverse(g);
    return g;
}

cvec free_gaussian_packet(const SpatialGrid& grid, double t, double eps, double k0, double R0,
                          double s) {
    const double beta = eps * eps;
    const cplx w2 = cplx(s * s, beta * t);
    const cplx amp = std::pow(s, -0.5) * std::pow(pi, -0.25) / std::sqrt(1.0 + I * (beta * t / (s * s)));
    cvec out(grid.n);
    for (int j = 0; j < grid.n; ++j) {
        const double R = grid.x(j);
        const double d = R - R0 - beta * k0 * t;
        out[j] = amp * std::exp(I * (k0 * R - beta * k0 * k0 * t / 2) - d * d / (2.0 * w2));
    }
    return out;
}

const GaussRule& gauss_legendre(int n) {
    static const GaussRule g8 = make_rule<8>();
    static const GaussRule g10 = make_rule<10>();
    static const GaussRule g16 = make_rule<16>();
    static const GaussRule g20 = make_rule<20>();
    static const GaussRule g30 = make_rule<30>();
    switch (n) {
        case 8: return g8;
        case 10: return g10;
        case 16: return g16;
        case 20: return g20;
        case 30: return g30;
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

namespace {
template <class F>
cplx gl_panel(const F& f, double a, double b, const GaussRule& r) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(c + h * r.nodes[i]);
    return acc * h;
}
}  // namespace

cplx pv_integral(const ComplexFn& g, double x0, double halfwidth, const PvOptions& opt) {
    if (!(halfwidth > 0)) throw std::invalid_argument("pv_integral: halfwidth must be positive");
    auto odd = [&](double u) { return (g(x0 + u) - g(x0 - u)) / u; };

    const cplx inner_lo = gl_panel(odd, 0.0, halfwidth, gauss_legendre(20));
    const cplx inner = gl_panel(odd, 0.0, halfwidth, gauss_legendre(30));
    double scale = std::max({std::abs(g(x0)), std::abs(g(x0 + halfwidth)), std::abs(g(x0 - halfwidth)), 1e-300});
    if (std::abs(inner - inner_lo) > opt.tol * std::max(scale, std::abs(inner)))
        throw NumericalError("pv_integral: integrand not resolved inside the excision (shrink halfwidth)");

    cplx outer = 0.0;
    const GaussRule& r = gauss_legendre(20);
    for (double a = halfwidth; a < opt.outer_width; a += opt.panel) {
        const double b = std::min(a + opt.panel, opt.outer_width);
        outer += gl_panel(odd, a, b, r);
    }
    const double tail = std::abs(g(x0 + opt.outer_width)) + std::abs(g(x0 - opt.outer_width));
    if (tail > opt.tol * std::max(scale, 1.0))
        throw NumericalError("pv_integral: integrand has not decayed at the outer width");
    return inner + outer;
}

cplx decaying_oscillatory_quad(const ComplexFn& g, const OscQuadSpec& spec) {
    if (!(spec.decay_width > 0)) throw std::invalid_argument("decaying_oscillatory_quad: width");
    const double w = spec.decay_width;
    const double W = w * (std::sqrt(2.0 * std::log(1.0 / spec.tol)) + 2.0);
    const double band = spec.max_frequency + 10.0 / w;
    const double h = std::min(pi / band, 0.25 * w);
    const int m = static_cast<int>(std::ceil(W / h));
    cplx acc = 0.0;
    // fixed-order sum, left to right, so the result does not depend on scheduling
    for (int j = -m; j <= m; ++j) acc += g(spec.center + j * h);
    acc *= h;
    const double edge = std::max(std::abs(g(spec.center - m * h)), std::abs(g(spec.center + m * h)));
    if (edge * w > spec.tol * std::max(1.0, std::abs(acc))) {
        const double need = w * std::sqrt(2.0 * std::log(std::max(edge * w / spec.tol, 2.0)));
        throw NumericalError("decaying_oscillatory_quad: tail bound violated; enlarge window by " +
                             std::to_string(need) + " (decay metadata too optimistic)");
    }
    return acc;
}

}  // namespace oscs
