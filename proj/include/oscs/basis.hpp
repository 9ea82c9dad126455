#pragma once

#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/Dense>

#include "oscs/types.hpp"

namespace oscs {

// Normalized Hermite function phi_n(x), three-term recurrence on the
// normalized functions so n ~ 100 does not overflow.
double hermite_fn(int n, double x);

// phi_0..phi_nmax at x, written to out[0..nmax].
void hermite_fns(int nmax, double x, double* out);

// Row n holds phi_n on the sample points.
Eigen::MatrixXd hermite_table(int nmax, const rvec& x);

// Caches hermite_table per uniform grid. Thread-safe; entries are never
// mutated once inserted.
class HermiteBasis {
public:
    explicit HermiteBasis(int n_max);
    int n_max() const { return n_max_; }
    const Eigen::MatrixXd& table(double lo, double dx, int npts) const;

private:
    int n_max_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<double, double, int>, Eigen::MatrixXd> cache_;
};

// D_nm(xi) = int phi_n(x) phi_m(x) exp(-i xi x) dx, Laguerre closed form.
cplx displacement_element(int n, int m, double xi);

// Same quantity by trapezoid quadrature; used as an oracle.
cplx displacement_element_quad(int n, int m, double xi);

// d/dxi D_nm(xi), via x phi_m = sqrt((m+1)/2) phi_{m+1} + sqrt(m/2) phi_{m-1}.
cplx displacement_derivative(int n, int m, double xi);

// Harmonic oscillator propagator U(t) = exp(-i t (p^2 + x^2)/2) on a
// symmetric uniform grid y_j = -Y + j*dy.
class OscillatorPropagator {
public:
    enum class Path { automatic, eigen_sum, mehler };

    // tail_tol: relative weight above n_max tolerated by the eigen path.
    OscillatorPropagator(double half_width, int npts, int n_max = 80,
                         double tail_tol = 1e-10);

    const rvec& grid() const { return y_; }
    double dy() const { return dy_; }
    int n_max() const { return n_max_; }

    cvec apply(double t, const cvec& psi, Path path = Path::automatic) const;
    cvec apply_eigen_sum(double t, const cvec& psi) const;
    cvec apply_mehler(double t, const cvec& psi) const;

    // Hermite coefficients c_k = <phi_k, psi> for k <= n_max.
    cvec project(const cvec& psi) const;

    // Width around t = k*pi where the Mehler path hands over to the eigen sum.
    static constexpr double mehler_exclusion = 0.05;

private:
    rvec y_;
    double dy_;
    int n_max_;
    double tail_tol_;
    Eigen::MatrixXd phi_;
};

}  // namespace oscs
