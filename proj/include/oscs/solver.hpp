#pragma once

#include <string>

#include "oscs/model.hpp"
#include "oscs/spectral.hpp"

namespace oscs {

// Oscillator-mode coefficient fields f_n(R), n = 0..n_max.
struct ModeState {
    SpatialGrid grid;
    ModelParams params;
    double time = 0.0;
    std::vector<cvec> f;

    int n_max() const { return static_cast<int>(f.size()) - 1; }
    double total_norm_sq() const;
};

// f_0 = eps^{-1/2} exp(i sigma v0 R/eps^2) eta((R-R0)/eps), other modes zero.
// Rejects grids with fewer than min_ppw points per carrier wavelength.
ModeState build_initial_state(const ModelParams& p, const SpatialGrid& grid, const EnvelopeSpec& eta,
                              int n_max, double min_ppw = 4.0);

// alpha_eps (psi_+ at R0 + psi_- at -R0) in mode 0; the superposition of
// two packets with opposite carriers.
ModeState build_superposition_state(const ModelParams& p, const SpatialGrid& grid,
                                    const EnvelopeSpec& eta, int n_max, double min_ppw = 4.0);

ModeState zero_state_like(const ModeState& s);

// sqrt(sum_n ||a_n - b_n||^2)
double state_distance(const ModeState& a, const ModeState& b);

// Uncoupled evolution: kinetic multiplier per mode and phases exp(-i(n+1/2)t/eps).
ModeState free_evolve(const ModeState& s, double t);

struct SolverConfig {
    double dt = 0.0;          // 0: dt = dt_factor * eps
    double dt_factor = 0.1;
    int n_max = 8;
    double spill_threshold = 1e-8;
    int order = 4;            // 2: Strang, 4: triple-jump composition of Strang
    bool step_check = false;  // run again at dt/2 and compare
    double step_tolerance = 1e-7;

    void validate() const;
    double step_for(double eps) const { return dt > 0 ? dt : dt_factor * eps; }
};

struct EvolveResult {
    ModeState state;
    int steps = 0;
    double dt = 0.0;
    double step_error_estimate = -1.0;  // < 0 when no step check ran
    double top_mode_population = 0.0;
};

// Split-step propagator with the coupling matrices V_nm(R) diagonalised once
// per grid point.
class Solver {
public:
    Solver(const SpatialGrid& grid, const ModelParams& p, const PotentialSpec& V, const SolverConfig& cfg);

    ModeState evolve(const ModeState& s, double t, int steps) const;
    int active_points() const { return static_cast<int>(active_.size()); }

private:
    // exp(-i h V(R_j)) for every active point, M*M row-major blocks
    cvec unitaries(double h) const;

    SpatialGrid grid_;
    ModelParams p_;
    SolverConfig cfg_;
    int M_;
    std::vector<int> active_;
    rvec eigval_;  // M per active point
    rvec eigvec_;  // M*M per active point, column k = eigenvector k
};

EvolveResult evolve_exact(const ModeState& s, double t, const PotentialSpec& V, const SolverConfig& cfg);

double mode_population(const ModeState& s, int n);
// int_{sign*K > 0} |hat f_n(K)|^2 dK; the K = 0 bin is split evenly.
double momentum_halfline_probability(const ModeState& s, int n, int sign);

void write_checkpoint(const ModeState& s, const std::string& path);
ModeState read_checkpoint(const std::string& path);

}  // namespace oscs
