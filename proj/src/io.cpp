#include "rif/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rif {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

std::vector<Scalar> parse_numbers(std::istringstream& in, int line) {
  std::vector<Scalar> out;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    Scalar v = 0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(line, "expected a decimal literal, got '" + token + "'");
    }
    if (used != token.size()) fail(line, "trailing characters in '" + token + "'");
    out.push_back(v);
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_'))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

bool FunctionFile::has(const std::string& name) const {
  for (const auto& [n, f] : functions)
    if (n == name) return true;
  return false;
}

const DiscreteFunction& FunctionFile::get(const std::string& name) const {
  for (const auto& [n, f] : functions)
    if (n == name) return f;
  throw std::runtime_error("unknown function '" + name + "'");
}

SupportFamily FunctionFile::build_family() const {
  if (pair_specs.empty()) throw std::runtime_error("file declares no pair lines");
  std::vector<SupportPair> pairs;
  for (const auto& [a, name] : pair_specs) pairs.push_back({a, get(name)});
  return SupportFamily(std::move(pairs));
}

FunctionFile parse_function_stream(std::istream& in) {
  FunctionFile out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) fail(lineno, "expected '<name>: values'");
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    std::istringstream rest(line.substr(colon + 1));

    if (!out.space && name != "masses") fail(lineno, "first line must declare masses");

    if (name == "masses") {
      if (out.space) fail(lineno, "duplicate masses line");
      const auto w = parse_numbers(rest, lineno);
      if (w.empty()) fail(lineno, "masses line needs at least one value");
      for (Scalar m : w)
        if (!(m > 0)) fail(lineno, "cell mass must be positive");
      out.space = MeasureSpace::make(
          Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size())));
      continue;
    }

    if (name == "pair") {
      std::string fname;
      Scalar a = 0;
      if (!(rest >> a >> fname) || !valid_name(fname))
        fail(lineno, "expected 'pair: <offset> <function-name>'");
      std::string extra;
      if (rest >> extra) fail(lineno, "trailing characters after pair");
      if (!out.has(fname)) fail(lineno, "pair refers to unknown function '" + fname + "'");
      out.pair_specs.push_back({a, fname});
      continue;
    }

    if (!valid_name(name)) fail(lineno, "invalid function name '" + name + "'");
    if (out.has(name)) fail(lineno, "duplicate function name '" + name + "'");
    const auto v = parse_numbers(rest, lineno);
    if (static_cast<Index>(v.size()) != out.space->cells())
      fail(lineno, "value count does not match cell count");
    out.functions.emplace_back(
        name, DiscreteFunction(out.space, Eigen::Map<const Vector>(
                                              v.data(), static_cast<Index>(v.size()))));
  }
  if (!out.space) throw std::runtime_error("empty function file");
  return out;
}

FunctionFile parse_function_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_function_stream(in);
}

GridField read_grid_field_stream(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty grid field file");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "box:") throw std::runtime_error("grid field header must start with 'box:'");
  DarbouxBox box;
  if (!(header >> box.n) || box.n < 1) throw std::runtime_error("bad half-dimension");
  box.lo.resize(2 * box.n);
  box.hi.resize(2 * box.n);
  box.res.resize(2 * box.n);
  for (int a = 0; a < 2 * box.n; ++a)
    if (!(header >> box.lo[a] >> box.hi[a]))
      throw std::runtime_error("bad extent in grid field header");
  header >> tag;
  if (tag != "grid:") throw std::runtime_error("expected 'grid:' in header");
  for (int a = 0; a < 2 * box.n; ++a) {
    int r = 0;
    if (!(header >> r)) throw std::runtime_error("bad resolution in header");
    box.res[a] = r;
  }
  header >> tag;
  if (tag != "boundary:") throw std::runtime_error("expected 'boundary:' in header");
  std::string kind;
  header >> kind;
  if (kind == "periodic")
    box.boundary = DarbouxBox::Boundary::Periodic;
  else if (kind == "compact")
    box.boundary = DarbouxBox::Boundary::CompactSupport;
  else
    throw std::runtime_error("boundary must be 'periodic' or 'compact'");
  box.validate();

  Vector samples(box.node_count());
  for (Index i = 0; i < samples.size(); ++i)
    if (!(in >> samples[i]))
      throw std::runtime_error("grid field file ended before all samples were read");
  return GridField(box, std::move(samples));
}

GridField read_grid_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_grid_field_stream(in);
}

void write_grid_field(std::ostream& out, const GridField& field) {
  const DarbouxBox& box = field.box();
  out << "box: " << box.n;
  out.precision(17);
  for (int a = 0; a < box.dims(); ++a) out << ' ' << box.lo[a] << ' ' << box.hi[a];
  out << " grid:";
  for (int a = 0; a < box.dims(); ++a) out << ' ' << box.res[a];
  out << " boundary: "
      << (box.boundary == DarbouxBox::Boundary::Periodic ? "periodic" : "compact")
      << '\n';
  for (Index i = 0; i < field.samples().size(); ++i)
    out << field.samples()[i] << ((i + 1) % 8 == 0 ? '\n' : ' ');
  out << '\n';
}

void write_grid_field(const std::string& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_grid_field(out, field);
}

}  // namespace rif
