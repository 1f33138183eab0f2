#pragma once

#include <string>
#include <vector>

#include "rif/report.hpp"

namespace rif {

std::vector<std::string> all_check_ids();
bool is_known_check(const std::string& name);

CheckReport run_check(const std::string& name, const RunConfig& config);

// Executes the named checks and returns the reports sorted by check id.
// Throws on unknown names before running anything.
std::vector<CheckReport> run_suite(const std::vector<std::string>& names,
                                   const RunConfig& config);

}  // namespace rif
