#include "oscs/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace oscs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, const std::string& what) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + v + "' is not a number");
    }
    if (pos != v.size()) throw ConfigError(what + ": trailing characters in '" + v + "'");
    return x;
}

long to_int(const std::string& v, const std::string& what) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + v + "' is not an integer");
    }
    if (pos != v.size()) throw ConfigError(what + ": trailing characters in '" + v + "'");
    return x;
}

bool to_bool(const std::string& v, const std::string& what) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(what + ": expected true or false, got '" + v + "'");
}

std::string real_str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string list_str(const rvec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + real_str(v[i]);
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"scenario",
         {
             {"epsilon", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.params.eps = to_real(v, w); }},
             {"v0", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.params.v0 = to_real(v, w); }},
             {"r0", [](RunConfig& c, const std::string& v, const std::string& w) {
                  c.study.params.R0 = to_real(v, w);
                  c.r0_explicit = true;
              }},
             {"a", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.params.a = to_real(v, w); }},
             {"sigma", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.params.sigma = static_cast<int>(to_int(v, w)); }},
             {"t_final", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.params.t = to_real(v, w); }},
             {"potential_amplitude", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.V.shape.amplitude = to_real(v, w); }},
             {"potential_center", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.V.shape.center = to_real(v, w); }},
             {"potential_width", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.V.shape.width = to_real(v, w); }},
             {"envelope_width", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.eta.width = to_real(v, w); }},
         }},
        {"numerics",
         {
             {"n_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.n_max = static_cast<int>(to_int(v, w)); }},
             {"dt_factor", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.dt_factor = to_real(v, w); }},
             {"splitting_order", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.order = static_cast<int>(to_int(v, w)); }},
             {"spill_threshold", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.spill_threshold = to_real(v, w); }},
             {"step_check", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.step_check = to_bool(v, w); }},
             {"step_tolerance", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.solver.step_tolerance = to_real(v, w); }},
             {"points_per_wavelength", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.points_per_wavelength = to_real(v, w); }},
             {"max_grid_points", [](RunConfig& c, const std::string& v, const std::string& w) { c.study.max_grid_points = static_cast<int>(to_int(v, w)); }},
         }},
        {"study",
         {
             {"case", [](RunConfig& c, const std::string& v, const std::string&) { c.study_case = study_case_from(v); }},
             {"order_k", [](RunConfig& c, const std::string& v, const std::string& w) { c.order_k = static_cast<int>(to_int(v, w)); }},
             {"epsilon_list", [](RunConfig& c, const std::string& v, const std::string& w) { c.epsilon_list = parse_real_list(v, w); }},
             {"extrapolation_epsilon_list", [](RunConfig& c, const std::string& v, const std::string& w) { c.extrapolation_epsilon_list = parse_real_list(v, w); }},
             {"lemma_samples", [](RunConfig& c, const std::string& v, const std::string& w) { c.lemma_samples = static_cast<int>(to_int(v, w)); }},
             {"lemma_seeds", [](RunConfig& c, const std::string& v, const std::string& w) {
                  c.lemma_seeds.clear();
                  for (double x : parse_real_list(v, w)) {
                      if (x < 0 || x != std::floor(x)) throw ConfigError(w + ": seeds must be non-negative integers");
                      c.lemma_seeds.push_back(static_cast<std::uint64_t>(x));
                  }
              }},
             {"check_level", [](RunConfig& c, const std::string& v, const std::string&) { c.check_level = v; }},
             {"coeff_x_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.coeff_x_min = to_real(v, w); }},
             {"coeff_x_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.coeff_x_max = to_real(v, w); }},
             {"coeff_dx", [](RunConfig& c, const std::string& v, const std::string& w) { c.coeff_dx = to_real(v, w); }},
         }},
        {"output",
         {
             {"directory", [](RunConfig& c, const std::string& v, const std::string&) { c.output_directory = v; }},
             {"checkpoint", [](RunConfig& c, const std::string& v, const std::string& w) { c.checkpoint = to_bool(v, w); }},
             {"plot_script", [](RunConfig& c, const std::string& v, const std::string& w) { c.plot_script = to_bool(v, w); }},
         }},
    };
    return table;
}

}  // namespace

rvec parse_real_list(const std::string& s, const std::string& what) {
    rvec out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(what + ": empty list entry");
        out.push_back(to_real(item, what));
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

RunConfig default_run_config() {
    RunConfig c;
    c.study.params = default_params(StudyCase::stationary);
    return c;
}

void RunConfig::validate() const {
    study.params.validate();
    study.solver.validate();
    if (!(study.V.shape.width > 0)) throw ConfigError("potential_width must be positive");
    if (!(study.eta.width > 0)) throw ConfigError("envelope_width must be positive");
    if (study.solver.n_max > 40) throw ConfigError("n_max above 40 is not supported");
    if (!(study.points_per_wavelength >= 4)) throw ConfigError("points_per_wavelength must be at least 4");
    if (study.max_grid_points < 16) throw ConfigError("max_grid_points too small");
    if (order_k < 0 || order_k > 2) throw ConfigError("order_k must be 0, 1 or 2");
    for (double e : epsilon_list)
        if (!(e > 0 && e < 1)) throw ConfigError("epsilon_list entries must lie in (0, 1)");
    if (epsilon_list.size() < 3) throw ConfigError("epsilon_list needs at least 3 values for a slope fit");
    if (extrapolation_epsilon_list.size() < 3) throw ConfigError("extrapolation_epsilon_list needs at least 3 values");
    for (double e : extrapolation_epsilon_list)
        if (!(e > 0 && e < 0.1)) throw ConfigError("extrapolation_epsilon_list entries must lie in (0, 0.1)");
    if (lemma_samples < 1) throw ConfigError("lemma_samples must be positive");
    if (lemma_seeds.size() < 2) throw ConfigError("lemma_seeds needs at least 2 seeds to judge stability");
    if (check_level != "quick" && check_level != "full") throw ConfigError("check_level must be quick or full");
    if (!(coeff_x_max > coeff_x_min) || !(coeff_dx > 0)) throw ConfigError("coefficient x range is empty");
    if (output_directory.empty()) throw ConfigError("output directory is empty");
}

std::string RunConfig::resolved_text() const {
    std::ostringstream o;
    const auto& p = study.params;
    o << "[scenario]\n"
      << "epsilon = " << real_str(p.eps) << "\n"
      << "v0 = " << real_str(p.v0) << "\n"
      << "r0 = " << real_str(p.R0) << "\n"
      << "a = " << real_str(p.a) << "\n"
      << "sigma = " << p.sigma << "\n"
      << "t_final = " << real_str(p.t) << "\n"
      << "potential_amplitude = " << real_str(study.V.shape.amplitude) << "\n"
      << "potential_center = " << real_str(study.V.shape.center) << "\n"
      << "potential_width = " << real_str(study.V.shape.width) << "\n"
      << "envelope_width = " << real_str(study.eta.width) << "\n\n";
    const auto& s = study.solver;
    o << "[numerics]\n"
      << "n_max = " << s.n_max << "\n"
      << "dt_factor = " << real_str(s.dt_factor) << "\n"
      << "splitting_order = " << s.order << "\n"
      << "spill_threshold = " << real_str(s.spill_threshold) << "\n"
      << "step_check = " << (s.step_check ? "true" : "false") << "\n"
      << "step_tolerance = " << real_str(s.step_tolerance) << "\n"
      << "points_per_wavelength = " << real_str(study.points_per_wavelength) << "\n"
      << "max_grid_points = " << study.max_grid_points << "\n\n";
    std::string seeds;
    for (std::size_t i = 0; i < lemma_seeds.size(); ++i) seeds += (i ? ", " : "") + std::to_string(lemma_seeds[i]);
    o << "[study]\n"
      << "case = " << to_string(study_case) << "\n"
      << "order_k = " << order_k << "\n"
      << "epsilon_list = " << list_str(epsilon_list) << "\n"
      << "extrapolation_epsilon_list = " << list_str(extrapolation_epsilon_list) << "\n"
      << "lemma_samples = " << lemma_samples << "\n"
      << "lemma_seeds = " << seeds << "\n"
      << "check_level = " << check_level << "\n"
      << "coeff_x_min = " << real_str(coeff_x_min) << "\n"
      << "coeff_x_max = " << real_str(coeff_x_max) << "\n"
      << "coeff_dx = " << real_str(coeff_dx) << "\n\n";
    o << "[output]\n"
      << "directory = " << output_directory << "\n"
      << "checkpoint = " << (checkpoint ? "true" : "false") << "\n"
      << "plot_script = " << (plot_script ? "true" : "false") << "\n";
    return o.str();
}

std::string RunConfig::hash_text() const {
    const std::string t = resolved_text();
    return t.substr(0, t.find("[output]"));
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c = default_run_config();
    std::istringstream in(text);
    std::string line, section;
    std::map<std::string, int> seen;
    int lineno = 0;
    const auto& table = setters();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!table.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
        const auto& keys = table.at(section);
        auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        const std::string full = section + "." + key;
        if (seen.count(full))
            throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " + std::to_string(seen[full]) + ")");
        seen[full] = lineno;
        try {
            it->second(c, value, key);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    c.resolve_case_defaults();
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

void RunConfig::resolve_case_defaults() {
    if (!r0_explicit) study.params.R0 = default_params(study_case).R0;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace oscs
