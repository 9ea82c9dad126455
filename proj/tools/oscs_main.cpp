// oscs: command line driver for the scattering studies.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oscs/check_suite.hpp"
#include "oscs/config.hpp"
#include "oscs/duhamel.hpp"
#include "oscs/expansion.hpp"
#include "oscs/parallel.hpp"
#include "oscs/report_io.hpp"

#ifndef OSCS_VERSION
#define OSCS_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace oscs;

namespace {

struct Flags {
    std::string config;
    std::string out_dir;
    std::string epsilon_list;
    std::optional<int> order;
    std::string study_case;
    bool quiet = false;
};

class Run {
public:
    Run(std::string sub, RunConfig cfg, bool quiet)
        : sub_(std::move(sub)), cfg_(std::move(cfg)), quiet_(quiet), dir_(cfg_.output_directory) {
        fs::create_directories(dir_);
        manifest_["subcommand"] = sub_;
        manifest_["oscs_version"] = OSCS_VERSION;
        manifest_["resolved_config"] = cfg_.resolved_text();
        manifest_["config_hash"] = sha256_hex(cfg_.hash_text());
        manifest_["versions"] = library_versions();
        manifest_["threads"] = thread_count();
        manifest_["files"] = nlohmann::json::array();
        manifest_["timings_seconds"] = nlohmann::json::object();
    }

    const RunConfig& cfg() const { return cfg_; }
    nlohmann::json& manifest() { return manifest_; }

    void log(const std::string& msg) const {
        if (!quiet_) std::cerr << "[" << sub_ << "] " << msg << "\n";
    }

    template <class F>
    auto timed(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto result = f();
        manifest_["timings_seconds"][name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return result;
    }

    void write_csv(const std::string& name, const CsvTable& t) {
        t.write((dir_ / name).string());
        manifest_["files"].push_back(name);
    }

    void finish() {
        if (cfg_.plot_script) {
            write_text_file((dir_ / ("plot_" + sub_ + ".py")).string(), plot_script(sub_));
            manifest_["files"].push_back("plot_" + sub_ + ".py");
        }
        write_json((dir_ / "manifest.json").string(), manifest_);
        log("wrote " + (dir_ / "manifest.json").string());
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    std::string sub_;
    RunConfig cfg_;
    bool quiet_;
    fs::path dir_;
    nlohmann::json manifest_;
};

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config.empty() ? default_run_config() : load_config(f.config);
    if (!f.out_dir.empty()) c.output_directory = f.out_dir;
    if (!f.epsilon_list.empty()) c.epsilon_list = parse_real_list(f.epsilon_list, "--epsilon-list");
    if (f.order) c.order_k = *f.order;
    if (!f.study_case.empty()) c.study_case = study_case_from(f.study_case);
    c.resolve_case_defaults();
    c.validate();
    return c;
}

int cmd_convergence(Run& run) {
    const RunConfig& c = run.cfg();
    run.log("case " + to_string(c.study_case) + ", k = " + std::to_string(c.order_k));
    const RunReport r = run.timed("study", [&] { return convergence_study(c.study_case, c.order_k, c.epsilon_list, c.study); });
    CsvTable t({"epsilon", "error_norm", "order_k", "case", "grid_points", "steps", "norm_drift", "top_mode_population"});
    for (const auto& row : r.convergence)
        t.add_row({row.eps, row.error, long(row.order), to_string(row.study), long(row.grid_points), long(row.steps),
                   row.norm_drift, row.top_mode_population});
    run.write_csv("convergence.csv", t);
    CsvTable f({"case", "order_k", "slope", "ci95", "r2", "n_points"});
    f.add_row({to_string(c.study_case), long(c.order_k), r.fit->slope, r.fit->ci95, r.fit->r2, long(r.eps.size())});
    run.write_csv("convergence_fit.csv", f);
    run.log("slope " + format_real(r.fit->slope) + " +- " + format_real(r.fit->ci95) + ", r2 " + format_real(r.fit->r2));
    return 0;
}

int cmd_application(Run& run) {
    const RunConfig& c = run.cfg();
    StudyConfig sc = c.study;
    if (!is_stationary(sc.params)) sc.params = default_params(StudyCase::stationary, sc.params.eps);
    const RunReport r = run.timed("study", [&] { return application_run(c.epsilon_list, sc); });
    CsvTable t({"epsilon", "alpha", "p0", "p1", "p_plus_0", "p_plus_1", "ratio0", "ratio1"});
    CsvTable pr({"epsilon", "beta1_modulus", "p1_predicted", "p1_over_predicted", "beta1_shifted_modulus"});
    for (const auto& row : r.application) {
        t.add_row({row.eps, row.alpha, row.p0, row.p1, row.p_plus_0, row.p_plus_1, row.ratio0, row.ratio1});
        ModelParams p = sc.params;
        p.eps = row.eps;
        pr.add_row({row.eps, std::abs(beta_coefficient(1, p, sc.V)), row.p1_predicted, row.p1 / row.p1_predicted,
                    beta_shifted_modulus(1, p, sc.V)});
    }
    run.write_csv("application.csv", t);
    run.write_csv("application_predictions.csv", pr);
    return 0;
}

int cmd_evolve(Run& run) {
    const RunConfig& c = run.cfg();
    const ModelParams& p = c.study.params;
    const SpatialGrid g = study_grid(c.study, p);
    const ModeState s0 = build_initial_state(p, g, c.study.eta, c.study.solver.n_max);
    const EvolveResult ex = run.timed("evolve", [&] { return evolve_exact(s0, p.t, c.study.V, c.study.solver); });
    CsvTable t({"n", "population", "p_plus", "p_minus"});
    for (int n = 0; n <= ex.state.n_max(); ++n)
        t.add_row({long(n), mode_population(ex.state, n), momentum_halfline_probability(ex.state, n, 1),
                   momentum_halfline_probability(ex.state, n, -1)});
    run.write_csv("populations.csv", t);
    run.manifest()["evolve"] = {{"grid_points", g.n},
                                {"steps", ex.steps},
                                {"dt", ex.dt},
                                {"norm_drift", std::abs(ex.state.total_norm_sq() - s0.total_norm_sq())},
                                {"top_mode_population", ex.top_mode_population},
                                {"step_error_estimate", ex.step_error_estimate}};
    if (c.checkpoint) {
        write_checkpoint(ex.state, run.path("state.bin").string());
        run.manifest()["files"].push_back("state.bin");
    }
    return 0;
}

int cmd_coeffs(Run& run) {
    const RunConfig& c = run.cfg();
    StudyConfig sc = c.study;
    if (!is_stationary(sc.params)) sc.params = default_params(StudyCase::stationary, sc.params.eps);
    const int nmax = sc.solver.n_max;
    rvec x;
    for (long j = 0;; ++j) {
        const double v = c.coeff_x_min + j * c.coeff_dx;
        if (v > c.coeff_x_max + 1e-12) break;
        x.push_back(v);
    }
    CsvTable t({"n", "x", "re", "im", "l", "h"});
    run.timed("coefficients", [&] {
        std::vector<ExpansionCoefficient> all{order0(sc.eta, x, nmax)};
        for (auto [l, h] : {std::pair{1, 1}, {1, 2}, {2, 2}})
            all.push_back(closed_form_coefficient(l, h, sc.params, sc.V, sc.eta, x, nmax));
        for (const auto& e : all)
            for (int n = 0; n <= nmax; ++n)
                for (std::size_t j = 0; j < x.size(); ++j)
                    t.add_row({long(n), x[j], e.fields[n][j].real(), e.fields[n][j].imag(), long(e.l), long(e.h)});
        return 0;
    });
    run.write_csv("coeffs.csv", t);
    CsvTable b({"n", "re", "im", "modulus", "shifted_modulus"});
    for (int n = 0; n <= nmax; ++n) {
        const cplx v = beta_coefficient(n, sc.params, sc.V);
        b.add_row({long(n), v.real(), v.imag(), std::abs(v), beta_shifted_modulus(n, sc.params, sc.V)});
    }
    run.write_csv("beta.csv", b);
    return 0;
}

int cmd_check(Run& run, bool quiet) {
    const auto items = run.timed("suite", [&] {
        return run_check_suite(run.cfg(), [&](const CheckItem& it) {
            if (!quiet)
                std::printf("%s %-44s %.6g %s %.6g\n", it.pass ? "PASS" : "FAIL", it.name.c_str(), it.value,
                            it.relation.c_str(), it.threshold);
            std::fflush(stdout);
        });
    });
    CsvTable t({"name", "value", "relation", "threshold", "pass"});
    int failed = 0;
    for (const auto& it : items) {
        t.add_row({it.name, it.value, it.relation, it.threshold, long(it.pass)});
        failed += !it.pass;
    }
    run.write_csv("check.csv", t);
    run.manifest()["check"] = {{"items", items.size()}, {"failed", failed}};
    if (failed) std::fprintf(stderr, "check: %d of %zu items failed\n", failed, items.size());
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mode-resolved scattering of a fast particle off a harmonic oscillator"};
    app.set_version_flag("--version", OSCS_VERSION);
    Flags flags;
    app.add_option("--config", flags.config, "config file (sectioned key = value)")->check(CLI::ExistingFile);
    app.add_option("--out-dir", flags.out_dir, "output directory (overrides [output] directory)");
    app.add_option("--epsilon-list", flags.epsilon_list, "comma-separated eps values");
    app.add_option("--order", flags.order, "expansion order k (0, 1, 2)");
    app.add_option("--case", flags.study_case, "stationary | nonstationary");
    app.add_flag("--quiet", flags.quiet, "no progress output");
    app.fallthrough();
    app.require_subcommand(1);
    std::string which;
    for (const char* name : {"convergence", "application", "evolve", "coeffs", "check"}) {
        static const std::map<std::string, std::string> help = {
            {"convergence", "error norms against the asymptotic expansion, with a log-log slope fit"},
            {"application", "outgoing probabilities for the two-packet superposition"},
            {"evolve", "one exact run, level populations and a state checkpoint"},
            {"coeffs", "expansion coefficient fields and beta_n"},
            {"check", "property suite; nonzero exit when any item fails"}};
        app.add_subcommand(name, help.at(name))->callback([&which, name] { which = name; });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        Run run(which, resolve(flags), flags.quiet);
        int status = 0;
        if (which == "convergence") status = cmd_convergence(run);
        else if (which == "application") status = cmd_application(run);
        else if (which == "evolve") status = cmd_evolve(run);
        else if (which == "coeffs") status = cmd_coeffs(run);
        else status = cmd_check(run, flags.quiet);
        run.finish();
        return status;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
