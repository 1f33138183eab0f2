// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "rif/checks.hpp"
#include "rif/report.hpp"

using namespace rif;

namespace {

RunConfig default_config() {
  RunConfig config;
  config.seed = kDefaultSeed;
  return config;
}

Scalar value_of(const CheckReport& rep, const std::string& name) {
  for (const auto& [key, v] : rep.values)
    if (key == name) return v;
  FAIL("missing value ", name);
  return 0;
}

void announce(int criterion, const char* label, bool ok) {
  std::printf("criterion %2d [%s] %s\n", criterion, ok ? "PASS" : "FAIL", label);
  std::fflush(stdout);
  CHECK(ok);
}

}  // namespace

TEST_CASE("criterion 1: adjoint-trace closed form") {
  const auto start = std::chrono::steady_clock::now();
  const CheckReport rep = run_check("t_closed_form", default_config());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(rep.tolerance == 1e-9);
  CHECK(value_of(rep, "max_rel_err") <= 1e-9);
  CHECK(value_of(rep, "t_xy_n1") == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(value_of(rep, "t_2sum_n2") == doctest::Approx(96.0).epsilon(1e-12));
  CHECK(seconds < 5.0);
  announce(1, "closed form for the adjoint trace on diagonal-type forms",
           rep.holds && seconds < 5.0);
}

TEST_CASE("criterion 2: symplectic invariance and unimodular witness") {
  const CheckReport inv = run_check("t_symplectic_invariance", default_config());
  CHECK(value_of(inv, "max_rel_err") <= 1e-6);
  const CheckReport wit = run_check("t_sl_witness", default_config());
  CHECK(value_of(wit, "t_ratio") ==
        doctest::Approx(value_of(wit, "t_ratio_expected")).epsilon(1e-9));
  CHECK(std::abs(value_of(wit, "det_ratio") - 1.0) <= 1e-12);
  announce(2, "conjugation invariance with a volume-preserving witness",
           inv.holds && wit.holds);
}

TEST_CASE("criterion 3: end-to-end functional separation") {
  const CheckReport rep = run_check("hessian_counterexample", default_config());
  const Scalar diff = value_of(rep, "difference");
  const Scalar expected = value_of(rep, "difference_expected");
  CHECK(std::abs(diff - expected) <= 0.05 * std::abs(expected));
  CHECK(std::abs(value_of(rep, "p_symplectic_pullback") - value_of(rep, "p_base")) <=
        0.05 * std::abs(value_of(rep, "p_base")));
  announce(3, "volume-preserving pullback moves the functional, symplectic does not",
           rep.holds);
}

TEST_CASE("criterion 4: pairing supremum oracle") {
  const CheckReport rep = run_check("pairing_oracle", default_config());
  CHECK(value_of(rep, "exact") == 1);
  CHECK(value_of(rep, "symmetric") == 1);
  announce(4, "sorted pairing equals the exhaustive maximum, symmetrically", rep.holds);
}

TEST_CASE("criterion 5: inequality suites") {
  const CheckReport cheb = run_check("chebyshev_suite", default_config());
  const CheckReport abs = run_check("abs_sup_suite", default_config());
  const CheckReport prod = run_check("product_abs_suite", default_config());
  const CheckReport block = run_check("two_block_bound_suite", default_config());
  CHECK(cheb.tolerance == 1e-9);
  CHECK(abs.tolerance == 1e-9);
  CHECK(prod.tolerance == 1e-9);
  announce(5, "pairing inequality suites on seeded corpora",
           cheb.holds && abs.holds && prod.holds && block.holds);
}

TEST_CASE("criterion 6: L1 lower bound constants and branches") {
  const CheckReport rep = run_check("l1_bound_suite", default_config());
  CHECK(value_of(rep, "c") == 0.5);
  CHECK(value_of(rep, "m") == 1.0);
  CHECK(value_of(rep, "breakpoint_oracle") == 1);
  CHECK(value_of(rep, "zero_branch") == 1);
  CHECK(value_of(rep, "positive_branch") == 1);
  announce(6, "two-level family constants and per-branch lower bounds", rep.holds);
}

TEST_CASE("criterion 7: lattice norm axioms") {
  const CheckReport rep = run_check("ri_norm_axioms", default_config());
  for (const char* axiom : {"homogeneity", "triangle", "monotonicity", "faithfulness",
                            "fatou", "l1_embedding", "equivalence"})
    CHECK(value_of(rep, axiom) == 1);
  announce(7, "rearrangement-invariant norm axioms with two-sided equivalence",
           rep.holds);
}

TEST_CASE("criterion 8: level-set transport") {
  const CheckReport rep = run_check("transport_suite", default_config());
  CHECK(value_of(rep, "worst_error_over_3eps") < 1.0);
  CHECK(value_of(rep, "exact_cases") > 0);
  announce(8, "transport error below 3 epsilon, exact under separation", rep.holds);
}

TEST_CASE("criterion 9: mollifier mass and convergence") {
  const CheckReport rep = run_check("regularizer_check", default_config());
  CHECK(value_of(rep, "mass_err_lambda8") <= 1e-8);
  CHECK(value_of(rep, "mass_err_lambda16") <= 1e-8);
  CHECK(value_of(rep, "sup_dev_lambda16") < value_of(rep, "sup_dev_lambda8"));
  announce(9, "mollifier conserves mass and tightens with lambda", rep.holds);
}

TEST_CASE("criterion 10: flow correctness") {
  const CheckReport rep = run_check("flow_check", default_config());
  CHECK(value_of(rep, "symplectic_defect") <= 1e-12);
  CHECK(value_of(rep, "leapfrog_volume_defect") <= 1e-6);
  CHECK(value_of(rep, "rotation_deviation") <=
        value_of(rep, "interpolation_tolerance"));
  announce(10, "linear flows symplectic, leapfrog volume-true, rotation pullback tight",
           rep.holds);
}

TEST_CASE("criterion 11: runtime and byte-identical reports") {
  RunConfig config = default_config();
  const auto names = all_check_ids();
  const auto start = std::chrono::steady_clock::now();
  const auto first = run_suite(names, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto second = run_suite(names, config);

  bool all_hold = true;
  for (const auto& rep : first) {
    if (!rep.holds) {
      std::printf("  failing check: %s\n", rep.check_id.c_str());
      all_hold = false;
    }
  }
  const bool identical = render_reports(first, config) == render_reports(second, config);
  CHECK(all_hold);
  CHECK(identical);
  CHECK(seconds < 120.0);
  std::printf("  full suite in %.1f s\n", seconds);
  announce(11, "deterministic byte-identical reports within the time budget",
           all_hold && identical && seconds < 120.0);
}
