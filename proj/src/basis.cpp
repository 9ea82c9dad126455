#include "oscs/basis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/laguerre.hpp>

namespace oscs {

void hermite_fns(int nmax, double x, double* out) {
    out[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (nmax == 0) return;
    out[1] = std::sqrt(2.0) * x * out[0];
    for (int k = 2; k <= nmax; ++k)
        out[k] = std::sqrt(2.0 / k) * x * out[k - 1] -
                 std::sqrt((k - 1.0) / k) * out[k - 2];
}

double hermite_fn(int n, double x) {
    if (n < 0) throw std::invalid_argument("hermite_fn: n < 0");
    double p0 = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (n == 0) return p0;
    double p1 = std::sqrt(2.0) * x * p0;
    for (int k = 2; k <= n; ++k) {
        double p2 = std::sqrt(2.0 / k) * x * p1 - std::sqrt((k - 1.0) / k) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

Eigen::MatrixXd hermite_table(int nmax, const rvec& x) {
    Eigen::MatrixXd t(nmax + 1, static_cast<Eigen::Index>(x.size()));
    rvec col(nmax + 1);
    for (std::size_t j = 0; j < x.size(); ++j) {
        hermite_fns(nmax, x[j], col.data());
        for (int n = 0; n <= nmax; ++n) t(n, static_cast<Eigen::Index>(j)) = col[n];
    }
    return t;
}

HermiteBasis::HermiteBasis(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw std::invalid_argument("HermiteBasis: n_max < 0");
}

const Eigen::MatrixXd& HermiteBasis::table(double lo, double dx, int npts) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(lo, dx, npts);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    rvec x(npts);
    for (int j = 0; j < npts; ++j) x[j] = lo + j * dx;
    return cache_.emplace(key, hermite_table(n_max_, x)).first->second;
}

cplx displacement_element(int n, int m, double xi) {
    if (n < 0 || m < 0) throw std::invalid_argument("displacement_element: negative index");
    if (n < m) std::swap(n, m);
    const int d = n - m;
    const double z = 0.5 * xi * xi;
    double mag = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)) - 0.25 * xi * xi);
    mag *= boost::math::laguerre(static_cast<unsigned>(m), static_cast<unsigned>(d), z);
    // (-i xi/sqrt2)^d
    const double a = std::pow(xi / std::sqrt(2.0), d);
    static const cplx ipow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return mag * a * ipow[d % 4];
}

cplx displacement_element_quad(int n, int m, double xi) {
    const double X = std::sqrt(2.0 * std::max(n, m) + 1.0) + 14.0;
    const double dx = 0.005;
    const int npts = static_cast<int>(2 * X / dx) + 1;
    rvec phi(std::max(n, m) + 1);
    cplx acc = 0.0;
    for (int j = 0; j < npts; ++j) {
        double x = -X + j * dx;
        hermite_fns(std::max(n, m), x, phi.data());
        acc += phi[n] * phi[m] * std::exp(-I * (xi * x));
    }
    return acc * dx;
}

cplx displacement_derivative(int n, int m, double xi) {
    cplx r = std::sqrt((m + 1) / 2.0) * displacement_element(n, m + 1, xi);
    if (m > 0) r += std::sqrt(m / 2.0) * displacement_element(n, m - 1, xi);
    return -I * r;
}

OscillatorPropagator::OscillatorPropagator(double half_width, int npts, int n_max,
                                           double tail_tol)
    : y_(npts), dy_(2.0 * half_width / (npts - 1)), n_max_(n_max), tail_tol_(tail_tol) {
    if (npts < 8) throw std::invalid_argument("OscillatorPropagator: too few points");
    for (int j = 0; j < npts; ++j) y_[j] = -half_width + j * dy_;
    y_[npts - 1] = half_width;
    phi_ = hermite_table(n_max, y_);
}

cvec OscillatorPropagator::project(const cvec& psi) const {
    if (psi.size() != y_.size()) throw std::invalid_argument("project: size mismatch");
    cvec c(n_max_ + 1, 0.0);
    for (int k = 0; k <= n_max_; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < y_.size(); ++j)
            acc += phi_(k, static_cast<Eigen::Index>(j)) * psi[j];
        c[k] = acc * dy_;
    }
    return c;
}

cvec OscillatorPropagator::apply_eigen_sum(double t, const cvec& psi) const {
    cvec c = project(psi);
    double total = 0.0, kept = 0.0;
    for (auto v : psi) total += std::norm(v);
    total *= dy_;
    for (auto v : c) kept += std::norm(v);
    if (total > 0.0 && (total - kept) > tail_tol_ * total)
        throw NumericalError("oscillator propagator: relative weight " +
                             std::to_string((total - kept) / total) +
                             " above n_max = " + std::to_string(n_max_));
    for (int k = 0; k <= n_max_; ++k) c[k] *= std::exp(-I * ((k + 0.5) * t));
    cvec out(y_.size(), 0.0);
    for (std::size_t j = 0; j < y_.size(); ++j) {
        cplx acc = 0.0;
        for (int k = 0; k <= n_max_; ++k) acc += c[k] * phi_(k, static_cast<Eigen::Index>(j));
        out[j] = acc;
    }
    return out;
}

cvec OscillatorPropagator::apply_mehler(double t, const cvec& psi) const {
    // t = k*pi + r with r in [0, pi); U(k*pi) = (-i)^k P^k.
    const double k = std::floor(t / pi);
    const double r = t - k * pi;
    if (r < mehler_exclusion || r > pi - mehler_exclusion)
        throw NumericalError("Mehler kernel requested too close to t = k*pi");
    const long kk = static_cast<long>(k);
    const std::size_t N = y_.size();
    cvec src = psi;
    if (kk % 2 != 0) std::reverse(src.begin(), src.end());
    static const cplx mi[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    const cplx jump = mi[((kk % 4) + 4) % 4];

    const double s = std::sin(r), c = std::cos(r);
    const cplx pref = std::exp(-I * (pi / 4)) / std::sqrt(2 * pi * s);
    cvec out(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = y_[i];
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double y = y_[j];
            const double ph = ((x * x + y * y) * c - 2 * x * y) / (2 * s);
            acc += std::polar(1.0, ph) * src[j];
        }
        out[i] = jump * pref * acc * dy_;
    }
    return out;
}

cvec OscillatorPropagator::apply(double t, const cvec& psi, Path path) const {
    if (path == Path::mehler) {
        // the closed-form kernel degenerates near t = k*pi
        const double r = t - std::floor(t / pi) * pi;
        if (r >= mehler_exclusion && r <= pi - mehler_exclusion) return apply_mehler(t, psi);
    }
    return apply_eigen_sum(t, psi);
}

}  // namespace oscs
