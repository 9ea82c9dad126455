#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oscs/experiments.hpp"
#include "oscs/solver.hpp"

using namespace oscs;

namespace {

struct Scene {
    ModelParams p = default_params(StudyCase::stationary, 0.2);
    EnvelopeSpec eta;
    PotentialSpec V = PotentialSpec::gaussian();
    SpatialGrid g = scenario_grid(p);
};

EvolveResult run(const Scene& s, int order, double dt_factor, int n_max = 10) {
    SolverConfig c;
    c.order = order;
    c.dt_factor = dt_factor;
    c.n_max = n_max;
    return evolve_exact(build_initial_state(s.p, s.g, s.eta, n_max), s.p.t, s.V, c);
}

}  // namespace

TEST(Solver, NormConserved) {
    Scene s;
    const auto r = run(s, 4, 0.1);
    EXPECT_NEAR(r.state.total_norm_sq(), 1.0, 1e-12);
    double pop = 0.0;
    for (int n = 0; n <= r.state.n_max(); ++n) pop += mode_population(r.state, n);
    EXPECT_NEAR(pop, r.state.total_norm_sq(), 1e-14);
    EXPECT_GT(mode_population(r.state, 1), 1e-4);  // the collision did excite the oscillator
}

TEST(Solver, ZeroPotentialIsFreeEvolution) {
    Scene s;
    SolverConfig c;
    EXPECT_LT(zero_potential_error(s.p, s.eta, c), 1e-10);
}

TEST(Solver, SplittingOrders) {
    Scene s;
    const ModeState ref = run(s, 4, 0.0125).state;
    const double e2a = state_distance(run(s, 2, 0.1).state, ref), e2b = state_distance(run(s, 2, 0.05).state, ref);
    const double e4a = state_distance(run(s, 4, 0.2).state, ref), e4b = state_distance(run(s, 4, 0.1).state, ref);
    EXPECT_NEAR(std::log2(e2a / e2b), 2.0, 0.2);
    EXPECT_NEAR(std::log2(e4a / e4b), 4.0, 0.4);
}

TEST(Solver, StepCheckReportsError) {
    Scene s;
    SolverConfig c;
    c.n_max = 10;
    c.step_check = true;
    c.step_tolerance = 1.0;
    const auto r = evolve_exact(build_initial_state(s.p, s.g, s.eta, 10), s.p.t, s.V, c);
    EXPECT_GE(r.step_error_estimate, 0.0);
    EXPECT_LT(r.step_error_estimate, 1e-6);
}

TEST(Solver, HalflineProbabilitiesSplitPopulation) {
    Scene s;
    const auto r = run(s, 4, 0.1);
    for (int n = 0; n <= 2; ++n) {
        const double pp = momentum_halfline_probability(r.state, n, 1), pm = momentum_halfline_probability(r.state, n, -1);
        EXPECT_NEAR(pp + pm, mode_population(r.state, n), 1e-14);
        EXPECT_GT(pp, 100 * pm);  // everything still moves right
    }
}

TEST(Solver, CheckpointRoundTrip) {
    Scene s;
    const auto r = run(s, 4, 0.2, 10);
    const auto path = (std::filesystem::temp_directory_path() / "oscs_ckpt_test.bin").string();
    write_checkpoint(r.state, path);
    const ModeState back = read_checkpoint(path);
    std::remove(path.c_str());
    EXPECT_EQ(back.grid.n, r.state.grid.n);
    EXPECT_EQ(back.n_max(), 10);
    EXPECT_DOUBLE_EQ(back.time, r.state.time);
    EXPECT_DOUBLE_EQ(back.params.eps, s.p.eps);
    EXPECT_EQ(state_distance(back, r.state), 0.0);
}

TEST(Solver, RejectsCoarseGrid) {
    Scene s;
    const auto coarse = SpatialGrid::covering(s.g.lo, s.g.lo + s.g.length, s.p.carrier_wavelength());
    EXPECT_THROW(build_initial_state(s.p, coarse, s.eta, 4), ConfigError);
}

TEST(Solver, ConfigValidation) {
    SolverConfig c;
    c.order = 3;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SolverConfig{};
    c.n_max = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}
