#include <gtest/gtest.h>

#include <cmath>

#include "oscs/duhamel.hpp"
#include "oscs/experiments.hpp"

using namespace oscs;

namespace {
const ModelParams kP = default_params(StudyCase::stationary, 0.1);
const PotentialSpec kV = PotentialSpec::gaussian();
const EnvelopeSpec kEta;
}  // namespace

TEST(Domain, Mapping) {
    const auto d = IntegrationDomain::from(kP);
    EXPECT_DOUBLE_EQ(d.s_star, 0.5);
    EXPECT_DOUBLE_EQ(d.s_of(0.0), 0.5);
    EXPECT_DOUBLE_EQ(d.z_min_full(), -5.0);
    EXPECT_DOUBLE_EQ(d.z_hi(), 5.0);
    ModelParams q = kP;
    q.eps = 0.01;
    EXPECT_DOUBLE_EQ(IntegrationDomain::from(q).z_lo(), -32.0);
}

TEST(Direct, SAndZVariablesAgree) {
    for (int n = 0; n <= 2; ++n)
        for (double x : {-0.5, 0.0, 0.75}) {
            const cplx a = duhamel_l1_direct(n, x, kP, kV, kEta, Variables::s);
            const cplx b = duhamel_l1_direct(n, x, kP, kV, kEta, Variables::z);
            EXPECT_LT(std::abs(a - b), 1e-9 * std::abs(b)) << n << " " << x;
        }
}

TEST(Grid, MatchesDirect) {
    DuhamelOptions o;
    o.n_max = 6;
    const DuhamelTerm t = duhamel_term(1, kP, kV, kEta, o);
    for (int n = 0; n <= 2; ++n)
        for (int j : {t.grid.n / 2 - 8, t.grid.n / 2 + 8}) {
            const cplx b = duhamel_l1_direct(n, t.grid.x(j), kP, kV, kEta, Variables::z);
            EXPECT_LT(std::abs(t.fields[n][j] - b), 1e-9 * std::abs(b));
        }
}

TEST(Grid, ReducedFieldsDropPhase) {
    DuhamelOptions o;
    o.n_max = 3;
    const DuhamelTerm t = duhamel_term(1, kP, kV, kEta, o);
    const double ss = IntegrationDomain::from(kP).s_star;
    const int j = t.grid.n / 2;
    for (int n = 0; n <= 3; ++n)
        EXPECT_LT(std::abs(t.reduced[n][j] - t.fields[n][j] * std::polar(1.0, -n * ss / kP.eps)), 1e-15);
}

TEST(Grid, SecondTermTailSmall) {
    DuhamelOptions o;
    const DysonTerms d = dyson_terms(2, kP, kV, kEta, o);
    EXPECT_EQ(d.second.l, 2);
    EXPECT_LT(d.second.tail_estimate, o.tail_tol);
    o.n_max = 2;
    o.tail_tol = 1e-9;
    EXPECT_THROW(dyson_terms(2, kP, kV, kEta, o), NumericalError);
}

TEST(CriticalPoint, SingleKick) {
    const auto c = stationary_point({1}, kP);
    EXPECT_NEAR(c.s[0], impact_time(kP), 1e-12);
    EXPECT_NEAR(c.xi[0], -1.0, 1e-12);
    EXPECT_TRUE(c.inside);
    const auto far = stationary_point({1}, default_params(StudyCase::nonstationary, 0.1));
    EXPECT_FALSE(far.inside);
}

TEST(Profile, PeakNearImpactTime) {
    const double tau = impact_time(kP);
    const double s = s_profile_argmax(0, 0.0, kP, kV, kEta, tau - 1.0 * kP.eps * 10, tau + kP.eps * 10, kP.eps / 50);
    EXPECT_LT(std::abs(s - tau), 3 * kP.eps);
}

TEST(Extrapolation, ExactForPolynomials) {
    const rvec eps{0.03, 0.02, 0.01, 0.005};
    std::vector<std::vector<cvec>> samples;
    for (double e : eps) samples.push_back({cvec{cplx(1.0 + 2 * e - 3 * e * e, e * e * e), cplx(0.5, -e)}});
    const auto c = extrapolate_in_eps(eps, samples);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_NEAR(std::abs(c[0][0][0] - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c[1][0][0] - 2.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(c[2][0][0] + 3.0), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(c[3][0][0] - I), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(c[1][0][1] + I), 0.0, 1e-10);
}

TEST(Sum, ZeroOrderIsFreeEvolution) {
    StudyConfig sc;
    sc.params = kP;
    const SpatialGrid g = study_grid(sc, kP);
    const ModeState s0 = build_initial_state(kP, g, kEta, 4);
    EXPECT_LT(state_distance(duhamel_sum(0, kP, kV, kEta, g, 4), free_evolve(s0, kP.t)), 1e-13);
}
