#include "oscs/check_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscs/duhamel.hpp"
#include "oscs/expansion.hpp"

namespace oscs {

CheckItem make_check(std::string name, double value, const std::string& relation, double threshold) {
    CheckItem c{std::move(name), value, relation, threshold, false};
    if (relation == "<") c.pass = value < threshold;
    else if (relation == "<=") c.pass = value <= threshold;
    else if (relation == ">") c.pass = value > threshold;
    else throw std::invalid_argument("make_check: relation " + relation);
    if (std::isnan(value)) c.pass = false;
    return c;
}

double relative_field_error(const std::vector<cvec>& a, const std::vector<cvec>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("relative_field_error: mode count");
    double d = 0.0, n = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].size() != b[k].size()) throw std::invalid_argument("relative_field_error: length");
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            d += std::norm(a[k][i] - b[k][i]);
            n += std::norm(b[k][i]);
        }
    }
    return n > 0 ? std::sqrt(d / n) : std::sqrt(d);
}

std::vector<CheckItem> run_check_suite(const RunConfig& cfg, const std::function<void(const CheckItem&)>& on_item) {
    std::vector<CheckItem> out;
    auto add = [&](CheckItem c) {
        if (on_item) on_item(c);
        out.push_back(std::move(c));
    };
    const bool full = cfg.check_level == "full";
    StudyConfig sc = cfg.study;
    // the expansion checks need the stationary geometry whatever case the config names
    if (!is_stationary(sc.params)) sc.params = default_params(StudyCase::stationary, sc.params.eps);
    const ModelParams& p = sc.params;
    const int nmax = sc.solver.n_max;

    {
        const SpatialGrid g = study_grid(sc, p);
        const ModeState s0 = build_initial_state(p, g, sc.eta, nmax);
        const EvolveResult ex = evolve_exact(s0, p.t, sc.V, sc.solver);
        add(make_check("unitarity_norm_drift", std::abs(ex.state.total_norm_sq() - s0.total_norm_sq()), "<", 1e-6));
        add(make_check("top_mode_population", ex.top_mode_population, "<", sc.solver.spill_threshold));

        SolverConfig wide = sc.solver;
        wide.n_max = nmax + 4;
        const EvolveResult ex2 = evolve_exact(build_initial_state(p, g, sc.eta, wide.n_max), p.t, sc.V, wide);
        double d = 0.0;
        for (int n = 0; n <= nmax; ++n)
            d = std::max(d, std::abs(mode_population(ex.state, n) - mode_population(ex2.state, n)));
        add(make_check("n_max_stability_population", d, "<", 1e-6));

        double fb = 0.0;
        for (int n = 0; n <= nmax; ++n)
            fb = std::max(fb, std::abs(momentum_halfline_probability(ex.state, n, 1) +
                                       momentum_halfline_probability(ex.state, n, -1) - mode_population(ex.state, n)));
        add(make_check("halfline_completeness", fb, "<", 1e-12));
    }
    add(make_check("zero_potential_oracle", zero_potential_error(p, sc.eta, sc.solver, sc.points_per_wavelength), "<",
                   1e-8));

    double aflat = 0.0;
    for (double e : cfg.epsilon_list)
        if (e <= 0.1) {
            ModelParams q = p;
            q.eps = e;
            aflat = std::max(aflat, std::abs(alpha_epsilon(q, sc.eta) - std::sqrt(0.5)));
        }
    add(make_check("alpha_flatness", aflat, "<", 1e-8));

    {
        ModelParams q = p;
        q.eps = 0.5 * p.eps;
        add(make_check("beta_modulus_eps_invariance",
                       std::abs(std::abs(beta_coefficient(1, p, sc.V)) - std::abs(beta_coefficient(1, q, sc.V))), "<",
                       1e-12));
    }

    rvec x;
    for (long j = 0; cfg.coeff_x_min + j * cfg.coeff_dx <= cfg.coeff_x_max + 1e-12; ++j) x.push_back(cfg.coeff_x_min + j * cfg.coeff_dx);
    {
        const auto c11 = closed_form_coefficient(1, 1, p, sc.V, sc.eta, x, nmax);
        const auto c12 = closed_form_coefficient(1, 2, p, sc.V, sc.eta, x, nmax);
        const auto c22 = closed_form_coefficient(2, 2, p, sc.V, sc.eta, x, nmax);
        std::vector<cvec> g11, g12, g22;
        for (int n = 0; n <= nmax; ++n) {
            g11.push_back(general_coefficient(1, 1, n, p, sc.V, sc.eta, x, nmax).field);
            g12.push_back(general_coefficient(1, 2, n, p, sc.V, sc.eta, x, nmax).field);
            g22.push_back(general_coefficient(2, 2, n, p, sc.V, sc.eta, x, nmax).field);
        }
        add(make_check("closed_vs_quadrature_l1h1", relative_field_error(g11, c11.fields), "<", 1e-6));
        add(make_check("closed_vs_quadrature_l1h2", relative_field_error(g12, c12.fields), "<", 1e-5));
        add(make_check("closed_vs_quadrature_l2h2", relative_field_error(g22, c22.fields), "<", 1e-4));
        const double no_limit = std::numeric_limits<double>::infinity();
        double tail = 0.0;
        for (int n = 0; n <= nmax; ++n)
            tail = std::max(tail, order2_double_constant(n, p, sc.V, nmax, no_limit).term_magnitude.back());
        add(make_check("order2_double_level_tail", tail, "<", 1e-4));

        // order-1 envelope peak of mode 1 sits at sigma tau / v0
        const auto& f1 = c11.fields[1];
        std::size_t jm = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (std::abs(f1[j]) > std::abs(f1[jm])) jm = j;
        add(make_check("order1_peak_shift_n1", std::abs(x[jm] - p.sigma * impact_time(p) / p.v0), "<=",
                       cfg.coeff_dx));
    }

    {
        DuhamelOptions dopt;
        dopt.n_max = nmax;
        const DysonTerms d = dyson_terms(1, p, sc.V, sc.eta, dopt);
        double gap_sz = 0.0, gap_grid = 0.0;
        for (int n = 0; n <= 2; ++n)
            for (int j : {d.first.grid.n / 2, d.first.grid.n / 2 + 16}) {
                const double xx = d.first.grid.x(j);
                const cplx a = duhamel_l1_direct(n, xx, p, sc.V, sc.eta, Variables::s);
                const cplx b = duhamel_l1_direct(n, xx, p, sc.V, sc.eta, Variables::z);
                const double scale = std::abs(b) + 1e-300;
                gap_sz = std::max(gap_sz, std::abs(a - b) / scale);
                gap_grid = std::max(gap_grid, std::abs(d.first.fields[n][j] - b) / scale);
            }
        add(make_check("duhamel_s_vs_z_variables", gap_sz, "<", 1e-8));
        add(make_check("duhamel_grid_vs_direct", gap_grid, "<", 1e-8));

        const CriticalPoint cp = stationary_point({1}, p);
        add(make_check("critical_point_s_minus_tau", std::abs(cp.s[0] - impact_time(p)), "<", 1e-12));
        const double tau = impact_time(p);
        const double sm = s_profile_argmax(0, 0.0, p, sc.V, sc.eta, std::max(0.0, tau - 10 * p.eps),
                                           std::min(p.t, tau + 10 * p.eps), p.eps / 50);
        add(make_check("s_profile_peak_minus_tau_over_eps", std::abs(sm - tau) / p.eps, "<", 3.0));
    }

    {
        ModelParams nz = p;
        SpatialGrid g = study_grid(sc, nz);
        const double dn = state_distance(duhamel_sum(0, nz, PotentialSpec::zero(), sc.eta, g, nmax),
                                         evolve_exact(build_initial_state(nz, g, sc.eta, nmax), nz.t,
                                                      PotentialSpec::zero(), sc.solver)
                                             .state);
        add(make_check("duhamel_sum_k0_zero_potential", dn, "<", 1e-8));
    }

    {
        LemmaOptions lo;
        lo.samples = full ? cfg.lemma_samples : std::min(cfg.lemma_samples, 20);
        lo.seeds = cfg.lemma_seeds;
        std::vector<std::vector<int>> alphas{{0, 0, 0}, {1, 0, 0}, {0, 0, 1}};
        if (full) alphas.insert(alphas.end(), {{0, 0, 2}, {1, 1, 1}, {0, 0, 3}, {0, 2, 1}});
        const RunReport lr = lemma_bound_check(alphas, lo);
        for (const auto& a : lr.lemma) {
            std::string tag = "lemma_";
            for (int v : a.alpha) tag += std::to_string(v);
            if (a.alpha == std::vector<int>{0, 0, 0}) {
                add(make_check(tag + "_zeta_norm_error", a.zeta_norm_error, "<", 1e-10));
                continue;
            }
            add(make_check(tag + "_constant_spread", a.spread, "<", 0.1));
            add(make_check(tag + "_fd_vs_exact", a.fd_vs_exact, "<", 1e-3));
            if (a.proof_bound > 0) add(make_check(tag + "_constant_over_proof_bound", a.c_alpha / a.proof_bound, "<=", 1.0));
        }
    }

    {
        rvec eps_app = full ? cfg.epsilon_list : rvec{0.1, 0.05};
        const RunReport ar = application_run(eps_app, sc);
        const auto& last = *std::min_element(ar.application.begin(), ar.application.end(),
                                             [](const auto& a, const auto& b) { return a.eps < b.eps; });
        add(make_check("application_ratio0_minus_half", std::abs(last.ratio0 - 0.5), "<", 0.05));
        add(make_check("application_ratio1_minus_one", std::abs(last.ratio1 - 1.0), "<", 0.05));
        add(make_check("application_p1_relative_to_prediction", std::abs(last.p1 / last.p1_predicted - 1.0), "<", 0.2));
    }

    if (full) {
        for (int k = 0; k <= 2; ++k) {
            const RunReport r = convergence_study(StudyCase::stationary, k, cfg.epsilon_list, sc);
            add(make_check("stationary_k" + std::to_string(k) + "_slope_error", std::abs(r.fit->slope - (k + 1)), "<",
                           0.5));
            add(make_check("stationary_k" + std::to_string(k) + "_r2", r.fit->r2, ">", 0.98));
        }
        StudyConfig ns = sc;
        ns.params = default_params(StudyCase::nonstationary, p.eps);
        rvec eps_ns;
        for (double e : cfg.epsilon_list)
            if (e >= 0.05) eps_ns.push_back(e);
        if (eps_ns.size() >= 3) {
            const RunReport r = convergence_study(StudyCase::nonstationary, 0, eps_ns, ns);
            add(make_check("nonstationary_k0_slope", r.fit->slope, ">", 1.7));
        }
        DuhamelOptions dopt;
        dopt.n_max = nmax;
        const ExtrapolatedCoefficients ec = duhamel_coefficients(p, sc.V, sc.eta, cfg.extrapolation_epsilon_list, dopt);
        add(make_check("duhamel_vs_closed_l1h1",
                       relative_field_error(ec.l1h1, closed_form_coefficient(1, 1, p, sc.V, sc.eta, ec.x, nmax).fields),
                       "<", 1e-4));
        add(make_check("duhamel_vs_closed_l1h2",
                       relative_field_error(ec.l1h2, closed_form_coefficient(1, 2, p, sc.V, sc.eta, ec.x, nmax).fields),
                       "<", 1e-4));
        add(make_check("duhamel_vs_closed_l2h2",
                       relative_field_error(ec.l2h2, closed_form_coefficient(2, 2, p, sc.V, sc.eta, ec.x, nmax).fields),
                       "<", 1e-4));
    }
    return out;
}

}  // namespace oscs
