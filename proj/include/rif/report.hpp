#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rif/types.hpp"

namespace rif {

inline constexpr std::uint64_t kDefaultSeed = 271828;
inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  std::map<std::string, Scalar> tolerance_overrides;  // check id -> tolerance
  std::string output_path;  // empty = stdout
  enum class Format { Json, Csv };
  Format format = Format::Json;
  // runtime_ms varies between runs, so it is only serialized on request
  bool include_timings = false;

  Scalar tolerance_for(const std::string& check_id, Scalar fallback) const;
};

struct CheckReport {
  std::string check_id;
  std::string claim;  // stable identifier of the verified statement
  std::uint64_t inputs_digest = 0;
  std::vector<std::pair<std::string, Scalar>> values;
  bool holds = false;
  Scalar tolerance = 0;
  double runtime_ms = 0;
};

std::uint64_t fnv1a(const std::string& text);

// Deterministic serialization: fixed field order, reports sorted by id.
std::string render_reports(const std::vector<CheckReport>& reports,
                           const RunConfig& config);
void write_reports(const std::vector<CheckReport>& reports, const RunConfig& config);

}  // namespace rif
