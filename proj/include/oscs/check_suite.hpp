#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscs/config.hpp"

namespace oscs {

struct CheckItem {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<", "<=", ">"
    double threshold = 0.0;
    bool pass = false;
};

CheckItem make_check(std::string name, double value, const std::string& relation, double threshold);

// sqrt(sum_n ||a_n - b_n||^2 / sum_n ||b_n||^2)
double relative_field_error(const std::vector<cvec>& a, const std::vector<cvec>& b);

// Property suite on the configured scenario. check_level = "full" adds the
// slope studies and the eps-extrapolated Duhamel comparison.
std::vector<CheckItem> run_check_suite(const RunConfig& cfg,
                                       const std::function<void(const CheckItem&)>& on_item = {});

}  // namespace oscs
