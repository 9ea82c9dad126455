#pragma once

#include <string>

#include "oscs/experiments.hpp"

namespace oscs {

// Sectioned key = value file:
//
//   [scenario]  epsilon, v0, r0, a, sigma, t_final, potential_amplitude,
//               potential_center, potential_width, envelope_width
//   [numerics]  n_max, dt_factor, splitting_order, spill_threshold, step_check,
//               step_tolerance, points_per_wavelength, max_grid_points
//   [study]     case, order_k, epsilon_list, extrapolation_epsilon_list,
//               lemma_samples, lemma_seeds, check_level, coeff_x_min, coeff_x_max, coeff_dx
//   [output]    directory, checkpoint, plot_script
//
// '#' starts a comment. Unknown sections or keys are errors.
struct RunConfig {
    StudyConfig study;
    StudyCase study_case = StudyCase::stationary;
    int order_k = 2;
    rvec epsilon_list{0.2, 0.1, 0.05, 0.025};
    rvec extrapolation_epsilon_list{0.032, 0.016, 0.008, 0.004, 0.002};
    int lemma_samples = 100;
    std::vector<std::uint64_t> lemma_seeds{11, 23, 37};
    std::string check_level = "quick";  // quick | full
    double coeff_x_min = -12.0;
    double coeff_x_max = 14.0;
    double coeff_dx = 0.05;
    std::string output_directory = "oscs_out";
    bool checkpoint = true;
    bool plot_script = true;
    bool r0_explicit = false;  // otherwise r0 follows the study case (0.5 or 1.5)

    void resolve_case_defaults();

    void validate() const;
    // Canonical text with every key, defaults filled in; hashing this gives the config hash.
    std::string resolved_text() const;
    // resolved_text without [output]; where files go does not change their bytes
    std::string hash_text() const;
};

RunConfig default_run_config();
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

rvec parse_real_list(const std::string& s, const std::string& what);

}  // namespace oscs
