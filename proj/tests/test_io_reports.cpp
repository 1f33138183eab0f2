#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "rif/checks.hpp"
#include "rif/io.hpp"
#include "rif/report.hpp"
#include "rif/rng.hpp"

using namespace rif;

TEST_CASE("counter rng reference blocks") {
  // frozen against an independent implementation of the block function
  CounterRng a(271828, 0);
  const std::uint32_t expected_a[8] = {0x77023f91u, 0x08dba6acu, 0x53c1d4f9u,
                                       0x1a62111au, 0xa35faff8u, 0x84ada9e0u,
                                       0xff4fa557u, 0x1882e8b7u};
  for (std::uint32_t e : expected_a) CHECK(a.next_u32() == e);

  CounterRng b(1, 42);
  const std::uint32_t expected_b[8] = {0xef9c1fb1u, 0x760894fau, 0x30573a59u,
                                       0x1457f37du, 0x081b2958u, 0x00091127u,
                                       0x9d0c4551u, 0x7dd44b02u};
  for (std::uint32_t e : expected_b) CHECK(b.next_u32() == e);

  CounterRng c(271828, 0);
  CHECK(c.uniform01() == doctest::Approx(0.034601609330828675).epsilon(1e-16));
}

TEST_CASE("counter rng stream independence and ranges") {
  CounterRng a(5, 1), b(5, 2);
  bool all_equal = true;
  for (int k = 0; k < 64; ++k) all_equal = all_equal && a.next_u32() == b.next_u32();
  CHECK_FALSE(all_equal);

  CounterRng r(9, 9);
  for (int k = 0; k < 1000; ++k) {
    const double u = r.uniform01();
    CHECK(u >= 0);
    CHECK(u < 1);
    const int v = r.range_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
  }
}

TEST_CASE("function file parsing") {
  std::istringstream good("masses: 1 1\nf: 1 2\ng: 0.5 -0.25\n");
  const FunctionFile file = parse_function_stream(good);
  CHECK(file.space->cells() == 2);
  CHECK(file.get("f").values() == (Vector(2) << 1, 2).finished());
  CHECK(file.get("g")[1] == -0.25);
  CHECK(file.functions.size() == 2);
  CHECK_THROWS(file.get("missing"));

  auto error_mentions = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_function_stream(in);
    } catch (const std::runtime_error& err) {
      return std::string(err.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(error_mentions("masses: 1 -1\nf: 1 2\n", "line 1"));
  CHECK(error_mentions("masses: 1 1\nf: 1 2\nf: 2 1\n", "line 3"));

  std::istringstream short_line("masses: 1 1\nf: 1\n");
  CHECK_THROWS(parse_function_stream(short_line));

  std::istringstream junk("masses: 1 1\nf: 1 2x\n");
  CHECK_THROWS(parse_function_stream(junk));

  std::istringstream headless("f: 1 2\n");
  CHECK_THROWS(parse_function_stream(headless));
}

TEST_CASE("family file parsing") {
  std::istringstream text(
      "masses: 1 1 1 1\n"
      "f: 1 1 -1 -1\n"
      "one: 1 1 1 1\n"
      "pair: 0 f\n"
      "pair: 0.5 one\n");
  const FunctionFile file = parse_function_stream(text);
  const SupportFamily family = file.build_family();
  CHECK(family.pairs().size() == 2);
  CHECK(family.pairs()[1].offset == 0.5);
  CHECK_FALSE(family.homogeneous());

  std::istringstream unknown("masses: 1\nf: 1\npair: 0 nope\n");
  CHECK_THROWS(parse_function_stream(unknown));
}

TEST_CASE("grid field round trip") {
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -1.0);
  box.hi = Vector::Constant(2, 2.0);
  box.res = IndexVector::Constant(2, 5);
  box.boundary = DarbouxBox::Boundary::CompactSupport;
  const GridField field = GridField::sample(
      box, [](const Vector& z) { return z[0] + 10 * z[1]; });

  std::stringstream buffer;
  write_grid_field(buffer, field);
  const GridField loaded = read_grid_field_stream(buffer);
  CHECK(loaded.box().n == 1);
  CHECK(loaded.box().res == box.res);
  CHECK((loaded.samples() - field.samples()).cwiseAbs().maxCoeff() == 0);

  std::istringstream bad("box: 1 0 1 0 1 grid: 4 4 boundary: nope\n0 0 0");
  CHECK_THROWS(read_grid_field_stream(bad));
  std::istringstream truncated("box: 1 0 1 0 1 grid: 4 4 boundary: compact\n0 0 0");
  CHECK_THROWS(read_grid_field_stream(truncated));
}

TEST_CASE("report rendering is deterministic and ordered") {
  RunConfig config;
  config.seed = 7;
  CheckReport r1;
  r1.check_id = "zeta";
  r1.claim = "claim-z";
  r1.inputs_digest = fnv1a("zeta");
  r1.values = {{"x", 1.5}, {"y", -2.0}};
  r1.holds = true;
  r1.tolerance = 1e-9;
  r1.runtime_ms = 12.5;
  CheckReport r2 = r1;
  r2.check_id = "alpha";
  r2.claim = "claim-a";

  const std::string a = render_reports({r1, r2}, config);
  const std::string b = render_reports({r2, r1}, config);
  CHECK(a == b);  // sorted by check id regardless of completion order
  CHECK(a.find("alpha") < a.find("zeta"));
  CHECK(a.find("runtime_ms") == std::string::npos);

  RunConfig timed = config;
  timed.include_timings = true;
  CHECK(render_reports({r1}, timed).find("runtime_ms") != std::string::npos);

  RunConfig csv = config;
  csv.format = RunConfig::Format::Csv;
  const std::string table = render_reports({r1, r2}, csv);
  CHECK(table.find("check_id,claim,inputs_digest,holds,tolerance,values") == 0);
  CHECK(table.find("x=1.5;y=-2.0") != std::string::npos);
}

TEST_CASE("suite runner") {
  CHECK_THROWS(run_suite({"no_such_check"}, RunConfig{}));
  CHECK(run_suite({}, RunConfig{}).empty());
  CHECK(is_known_check("t_closed_form"));
  CHECK_FALSE(is_known_check("bogus"));
  const auto ids = all_check_ids();
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());

  RunConfig config;
  const CheckReport rep = run_check("t_closed_form", config);
  CHECK(rep.holds);
  CHECK(rep.check_id == "t_closed_form");

  // tolerance overrides reach the checks
  RunConfig strict;
  strict.tolerance_overrides["t_closed_form"] = 1e-30;
  const CheckReport tight = run_check("t_closed_form", strict);
  CHECK(tight.tolerance == 1e-30);
}
