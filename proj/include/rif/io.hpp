#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rif/functional.hpp"
#include "rif/grid.hpp"
#include "rif/measure.hpp"

namespace rif {

// Text format:
//   masses: w1 w2 ... wN
//   <name>: v1 v2 ... vN      (one line per function)
// Family files may add
//   pair: a <name>
// lines referring to previously defined functions.
struct FunctionFile {
  SpacePtr space;
  std::vector<std::pair<std::string, DiscreteFunction>> functions;
  std::vector<std::pair<Scalar, std::string>> pair_specs;

  bool has(const std::string& name) const;
  const DiscreteFunction& get(const std::string& name) const;
  SupportFamily build_family() const;  // requires pair lines
};

FunctionFile parse_function_stream(std::istream& in);
FunctionFile parse_function_file(const std::string& path);

// Grid field format: one header line
//   box: n lo1 hi1 ... lo_2n hi_2n grid: N1 ... N_2n boundary: periodic|compact
// followed by whitespace-separated samples in row-major order (axis 0
// slowest).
GridField read_grid_field_stream(std::istream& in);
GridField read_grid_field(const std::string& path);
void write_grid_field(std::ostream& out, const GridField& field);
void write_grid_field(const std::string& path, const GridField& field);

}  // namespace rif
