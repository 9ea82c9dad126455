// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// usage: acceptance [work_dir]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oscs/check_suite.hpp"
#include "oscs/duhamel.hpp"
#include "oscs/experiments.hpp"
#include "oscs/expansion.hpp"

namespace fs = std::filesystem;
using namespace oscs;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, double a) {
    char b[64];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

const rvec kEps{0.2, 0.1, 0.05, 0.025};

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "oscs_acceptance";
    fs::create_directories(work);
    const auto t0 = std::chrono::steady_clock::now();

    StudyConfig sc;
    sc.params = default_params(StudyCase::stationary, 0.1);

    // 3 (and 1 from the same exact runs)
    double drift = 0.0;
    {
        bool ok = true;
        std::string detail;
        for (int k = 0; k <= 2; ++k) {
            const RunReport r = convergence_study(StudyCase::stationary, k, kEps, sc);
            for (const auto& row : r.convergence) drift = std::max(drift, row.norm_drift);
            const bool ok_k = std::abs(r.fit->slope - (k + 1)) <= 0.5 && r.fit->r2 >= 0.98;
            ok = ok && ok_k;
            detail += "k=" + std::to_string(k) + " slope " + fmt("%.3f", r.fit->slope) + " (ci95 " +
                      fmt("%.2f", r.fit->ci95) + ") r2 " + fmt("%.4f", r.fit->r2) + "; ";
        }
        report(1, "norm drift < 1e-6 at every eps", drift < 1e-6, "max drift " + fmt("%.2e", drift));
        report(3, "stationary slope k+1 +- 0.5, R2 >= 0.98, k=0,1,2", ok, detail);
    }

    {
        double worst = 0.0;
        for (double e : kEps) {
            ModelParams p = sc.params;
            p.eps = e;
            worst = std::max(worst, zero_potential_error(p, sc.eta, sc.solver, sc.points_per_wavelength));
        }
        report(2, "V = 0 solver vs analytic free packet < 1e-8", worst < 1e-8, "max error " + fmt("%.2e", worst));
    }

    {
        StudyConfig ns = sc;
        ns.params = default_params(StudyCase::nonstationary, 0.1);
        const RunReport r = convergence_study(StudyCase::nonstationary, 0, {0.2, 0.1, 0.05}, ns);
        std::string detail = "slope " + fmt("%.2f", r.fit->slope) + ", r2 " + fmt("%.3f", r.fit->r2) + ", errors";
        for (const auto& row : r.convergence) detail += " " + fmt("%.2e", row.error);
        report(4, "non-stationary ||exact - free|| slope > 1.7", r.fit->slope > 1.7, detail);
    }

    {
        const ModelParams& p = sc.params;
        const int nmax = sc.solver.n_max;
        const ExtrapolatedCoefficients ec =
            duhamel_coefficients(p, sc.V, sc.eta, {0.032, 0.016, 0.008, 0.004, 0.002}, DuhamelOptions{});
        double worst = 0.0;
        std::string detail;
        for (auto [l, h] : {std::pair{1, 1}, {1, 2}, {2, 2}}) {
            const auto closed = closed_form_coefficient(l, h, p, sc.V, sc.eta, ec.x, nmax).fields;
            std::vector<cvec> quad;
            for (int n = 0; n <= nmax; ++n) quad.push_back(general_coefficient(l, h, n, p, sc.V, sc.eta, ec.x, nmax).field);
            const std::vector<cvec>& duh = l == 1 ? (h == 1 ? ec.l1h1 : ec.l1h2) : ec.l2h2;
            const double a = relative_field_error(quad, closed), b = relative_field_error(duh, closed),
                         c = relative_field_error(duh, quad);
            worst = std::max({worst, a, b, c});
            detail += "l" + std::to_string(l) + "h" + std::to_string(h) + " " + fmt("%.1e", a) + "/" + fmt("%.1e", b) +
                      "/" + fmt("%.1e", c) + "; ";
        }
        report(5, "closed / quadrature / eps-extrapolated Duhamel agree < 1e-4", worst < 1e-4, detail);
    }

    {
        const RunReport r = application_run(kEps, sc);
        rvec e, d0, d1;
        const ApplicationRow* at05 = nullptr;
        std::string detail;
        for (const auto& row : r.application) {
            e.push_back(row.eps);
            d0.push_back(row.ratio0 - 0.5);
            d1.push_back(row.ratio1 - 1.0);
            if (row.eps == 0.05) at05 = &row;
            detail += "eps " + fmt("%g", row.eps) + ": r0-1/2 " + fmt("%.1e", row.ratio0 - 0.5) + ", r1-1 " +
                      fmt("%.1e", row.ratio1 - 1.0) + ", P1/pred " + fmt("%.3f", row.p1 / row.p1_predicted) + "; ";
        }
        const bool ok = at05 && std::abs(at05->ratio0 - 0.5) < 0.05 && std::abs(at05->ratio1 - 1.0) < 0.05 &&
                        std::abs(at05->p1 / at05->p1_predicted - 1.0) < 0.2 && shrinks_with_eps(e, d0) &&
                        shrinks_with_eps(e, d1);
        report(6, "ratios at eps=0.05, monotone deviations, P1 vs |beta1|^2 eps^2/2", ok, detail);
    }

    {
        LemmaOptions lo;
        const RunReport r = lemma_bound_check({{1, 0, 0}, {0, 0, 1}, {0, 0, 2}, {1, 1, 1}, {0, 0, 3}, {0, 2, 1}}, lo);
        bool ok = true;
        std::string detail;
        for (const auto& a : r.lemma) {
            const bool good = std::isfinite(a.c_alpha) && a.c_alpha > 0 && a.spread < 0.1 && a.fd_vs_exact < 1e-3;
            ok = ok && good;
            std::string tag;
            for (int v : a.alpha) tag += std::to_string(v);
            detail += tag + " C=" + fmt("%.4f", a.c_alpha) + " spread " + fmt("%.1e", a.spread) + "; ";
        }
        report(7, "lemma ratio bounded, constant stable within 10% across 3 x 100-point samples", ok, detail);
    }

    {
        double worst = 0.0;
        for (double e : {0.1, 0.05, 0.025, 0.0125}) {
            ModelParams p = sc.params;
            p.eps = e;
            worst = std::max(worst, std::abs(alpha_epsilon(p, sc.eta) - std::sqrt(0.5)));
        }
        report(8, "|alpha_eps - 1/sqrt2| < 1e-8 for eps <= 0.1", worst < 1e-8, "max " + fmt("%.2e", worst));
    }

    {
        bool ok = true;
        std::string detail;
        std::string first;
        for (int run = 0; run < 2; ++run) {
            const fs::path dir = work / ("check_run" + std::to_string(run));
            fs::remove_all(dir);
            const std::string cmd = std::string(OSCS_CLI_PATH) + " check --quiet --out-dir " + dir.string();
            const int status = std::system(cmd.c_str());
            if (status != 0) {
                ok = false;
                detail += "run " + std::to_string(run) + " exit " + std::to_string(status) + "; ";
            }
            const std::string csv = slurp(dir / "check.csv");
            if (csv.empty()) ok = false;
            if (run == 0) first = csv;
            else if (csv != first) ok = false;
            detail += "run " + std::to_string(run) + " check.csv bytes " + std::to_string(csv.size()) + "; ";
        }
        report(9, "two `oscs check` runs give byte-identical CSV", ok, detail);
    }

    std::printf("total %.1f s, %d failed\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), failures);
    return failures ? 1 : 0;
}
