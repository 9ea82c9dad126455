#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "oscs/model.hpp"
#include "oscs/solver.hpp"

namespace oscs {

// Least-squares fit of log(err) = log(C) + slope * log(eps).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    double ci95 = 0.0;  // half-width of the 95% band on the slope (Student t)
    rvec residuals;
};
SlopeFit fit_loglog(const rvec& eps, const rvec& err);

// Everything a study needs besides the eps list.
struct StudyConfig {
    ModelParams params;
    PotentialSpec V = PotentialSpec::gaussian();
    EnvelopeSpec eta;
    SolverConfig solver;
    double points_per_wavelength = 8.0;
    int max_grid_points = 1 << 15;
};

enum class StudyCase { stationary, nonstationary };
std::string to_string(StudyCase c);
StudyCase study_case_from(const std::string& s);

// Defaults: R0 = 0.5 (stationary) or 1.5 (non-stationary), a = 1, v0 = 1, sigma = +1, t = 1.
ModelParams default_params(StudyCase c, double eps = 0.1);

struct ConvergenceRow {
    double eps = 0.0;
    double error = 0.0;  // ||exact - approximation||
    int order = 0;
    StudyCase study = StudyCase::stationary;
    int grid_points = 0;
    int steps = 0;
    double step_error = -1.0;
    double norm_drift = 0.0;  // | ||exact(t)||^2 - ||exact(0)||^2 |
    double top_mode_population = 0.0;
};

struct ApplicationRow {
    double eps = 0.0;
    double alpha = 0.0;
    double p0 = 0.0, p1 = 0.0;
    double p_plus_0 = 0.0, p_plus_1 = 0.0;
    double ratio0 = 0.0, ratio1 = 0.0;
    double p1_predicted = 0.0;  // |beta_1|^2 eps^2 / 2
    double norm_drift = 0.0;
};

struct LemmaAlphaResult {
    std::vector<int> alpha;
    rvec c_per_seed;         // max ratio over each seed's refined sample
    double c_alpha = 0.0;    // max over seeds
    double spread = 0.0;     // (max - min) / max over seeds
    double fd_vs_exact = 0.0;  // largest relative gap between finite differences and the Q-insertion formula
    double proof_bound = -1.0;  // 1 + ||Q phi0|| + ||D phi0|| for |alpha| = 1, else < 0
    double zeta_norm_error = 0.0;  // alpha = 0 only: max | ||zeta|| - 1 |
};

struct RunReport {
    std::string scenario;
    rvec eps;
    std::vector<ConvergenceRow> convergence;
    std::optional<SlopeFit> fit;
    std::vector<ApplicationRow> application;
    std::vector<LemmaAlphaResult> lemma;
    double wall_seconds = 0.0;
    std::string config_hash;
};

// Throws ConfigError when the grid for some eps exceeds max_grid_points.
SpatialGrid study_grid(const StudyConfig& sc, const ModelParams& p, bool mirror = false);

// Stationary: ||evolve_exact - assemble_asymptotic(k)||; non-stationary:
// ||evolve_exact - free evolution||. eps points run in parallel, rows are kept in
// the order given.
RunReport convergence_study(StudyCase c, int k, const rvec& eps_list, const StudyConfig& sc);

// Superposition of the incoming packet and its mirror image; Born-rule probabilities.
RunReport application_run(const rvec& eps_list, const StudyConfig& sc);

// ||evolve_exact(V = 0) - analytic free packet|| at t.
double zero_potential_error(const ModelParams& p, const EnvelopeSpec& eta, const SolverConfig& cfg,
                            double ppw = 8.0);

// zeta(xi) = exp(-i xi_n y) U(t_{n-1}) ... U(t_1) exp(-i xi_1 y) phi_0
struct LemmaOptions {
    int factors = 3;
    double xi_box = 3.0;       // xi_j in [-box, box]; t_j in [0, 2 pi]
    int samples = 100;
    std::vector<std::uint64_t> seeds{11, 23, 37};
    bool refine = true;        // local ascent from every sample point
    double ascent_tol = 1e-3;
    double fd_step = 0.05;
    double fd_tol = 1e-4;      // Richardson convergence tolerance (relative)
    double grid_half_width = 16.0;
    int grid_points = 640;
    int basis_size = 96;       // Hermite basis for the Q-insertion formula
};

// On the y grid of an OscillatorPropagator.
cvec lemma_zeta(const rvec& t, const rvec& xi, const LemmaOptions& opt = {});
// ||d^alpha zeta|| by central differences with one Richardson step; throws
// NumericalError when two step sizes disagree beyond fd_tol.
double lemma_derivative_norm_fd(const rvec& t, const rvec& xi, const std::vector<int>& alpha,
                                const LemmaOptions& opt = {});
// ||(-i)^|alpha| exp(-i xi_n y) Q^{alpha_n} U ... Q^{alpha_1} phi_0|| in the Hermite basis.
double lemma_derivative_norm_exact(const rvec& t, const rvec& xi, const std::vector<int>& alpha,
                                   const LemmaOptions& opt = {});

RunReport lemma_bound_check(const std::vector<std::vector<int>>& alphas, const LemmaOptions& opt = {});

// Monotone decrease of |dev| with eps, ignoring changes below floor.
bool shrinks_with_eps(const rvec& eps, const rvec& dev, double floor = 1e-12);

}  // namespace oscs
