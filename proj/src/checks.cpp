#include "rif/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rif/critical.hpp"
#include "rif/functional.hpp"
#include "rif/io.hpp"
#include "rif/rng.hpp"

namespace rif {

namespace {

using Clock = std::chrono::steady_clock;

struct Builder {
  CheckReport rep;
  Clock::time_point start = Clock::now();

  Builder(std::string id, std::string claim, const RunConfig& config,
          Scalar default_tol) {
    rep.check_id = std::move(id);
    rep.claim = std::move(claim);
    rep.tolerance = config.tolerance_for(rep.check_id, default_tol);
    rep.holds = true;
    std::ostringstream digest;
    digest << rep.check_id << '|' << config.seed << '|' << rep.tolerance;
    rep.inputs_digest = fnv1a(digest.str());
  }

  void value(const std::string& name, Scalar v) { rep.values.push_back({name, v}); }
  void require(bool ok) { rep.holds = rep.holds && ok; }

  CheckReport done() {
    rep.runtime_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return rep;
  }
};

// ----- shared generators ------------------------------------------------

Vector random_integer_values(Index cells, CounterRng& rng, int lo = -4, int hi = 4) {
  Vector v(cells);
  for (Index i = 0; i < cells; ++i) v[i] = rng.range_int(lo, hi);
  return v;
}

Vector random_quantized_values(Index cells, CounterRng& rng) {
  Vector v(cells);
  for (Index i = 0; i < cells; ++i) v[i] = 0.25 * rng.range_int(-12, 12);
  return v;
}

Vector random_uniform_values(Index cells, CounterRng& rng, Scalar radius = 3) {
  Vector v(cells);
  for (Index i = 0; i < cells; ++i) v[i] = rng.uniform(-radius, radius);
  return v;
}

// exhaustive maximum of the pairing over all value rearrangements
Scalar brute_force_sup_pairing(const DiscreteFunction& phi0, const DiscreteFunction& psi) {
  std::vector<Index> perm(static_cast<std::size_t>(phi0.cells()));
  std::iota(perm.begin(), perm.end(), Index{0});
  const Scalar w = phi0.space().mass(0);
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  do {
    Scalar s = 0;
    for (Index i = 0; i < phi0.cells(); ++i)
      s += phi0[perm[static_cast<std::size_t>(i)]] * psi[i];
    best = std::max(best, w * s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

SpacePtr unit_mass_space(Index cells) {
  return MeasureSpace::uniform(cells, 1.0 / static_cast<Scalar>(cells));
}

// +1 on the first half of the cells, -1 on the rest
DiscreteFunction two_level_density(const SpacePtr& space) {
  Vector v(space->cells());
  for (Index i = 0; i < space->cells(); ++i) v[i] = i < space->cells() / 2 ? 1.0 : -1.0;
  return DiscreteFunction(space, std::move(v));
}

// ----- quadratic form checks ---------------------------------------------

CheckReport check_t_closed_form(const RunConfig& config) {
  Builder b("t_closed_form", "trace-of-squared-adjoint-closed-form", config, 1e-9);
  Scalar max_rel = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 500; ++trial) {
      CounterRng rng(config.seed, 10 * n + 100 * static_cast<std::uint64_t>(trial));
      Vector q(n);
      for (int k = 0; k < n; ++k) q[k] = rng.uniform(-3, 3);
      const Scalar computed = t_invariant(QuadraticForm::diagonal_type(q));
      const Scalar expected = (4 * n + 4) * q.squaredNorm();
      max_rel = std::max(max_rel,
                         std::abs(computed - expected) / std::max<Scalar>(1, expected));
    }
  }
  const Scalar anchor1 = t_invariant(QuadraticForm::diagonal_type(Vector::Ones(1)));
  const Scalar anchor2 =
      t_invariant(QuadraticForm::diagonal_type(2 * Vector::Ones(2)));
  b.value("max_rel_err", max_rel);
  b.value("t_xy_n1", anchor1);
  b.value("t_2sum_n2", anchor2);
  b.require(max_rel <= b.rep.tolerance);
  b.require(std::abs(anchor1 - 8) <= 1e-12);
  b.require(std::abs(anchor2 - 96) <= 1e-12);
  return b.done();
}

CheckReport check_t_symplectic_invariance(const RunConfig& config) {
  Builder b("t_symplectic_invariance", "symplectic-conjugation-invariance-of-t",
            config, 1e-6);
  Scalar max_rel = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      CounterRng rng(config.seed, 5000 + 10 * n + static_cast<std::uint64_t>(trial));
      Matrix a(2 * n, 2 * n);
      for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) a(i, j) = a(j, i) = rng.uniform(-2, 2);
      const QuadraticForm q(n, a);
      const Matrix s = random_symplectic(n, rng);
      const Scalar before = t_invariant(q);
      const Scalar after = t_invariant(compose_linear(q, s));
      max_rel = std::max(max_rel,
                         std::abs(after - before) / std::max<Scalar>(1, std::abs(before)));
    }
  }
  b.value("max_rel_err", max_rel);
  b.require(max_rel <= b.rep.tolerance);
  return b.done();
}

CheckReport check_t_sl_witness(const RunConfig& config) {
  Builder b("t_sl_witness", "volume-preserving-noninvariance-witness", config, 1e-9);
  Vector c(2);
  c << 1, -1;
  const Diffeomorphism map = counterexample_map(c);
  const QuadraticForm q = QuadraticForm::diagonal_type(2 * Vector::Ones(2));
  const QuadraticForm moved = compose_linear(q, map.matrix());
  const Scalar t_ratio = t_invariant(moved) / t_invariant(q);
  const Scalar det_ratio = det_invariant(moved) / det_invariant(q);
  const Scalar expected = (std::exp(4.0) + std::exp(-4.0)) / 2;
  b.value("t_ratio", t_ratio);
  b.value("t_ratio_expected", expected);
  b.value("det_ratio", det_ratio);
  b.require(std::abs(t_ratio - expected) <= b.rep.tolerance * expected);
  b.require(std::abs(det_ratio - 1) <= 1e-12);
  b.require(t_ratio > 1);
  return b.done();
}

// Localized field with the germ 2 sum x_nu y_nu at the origin of an n = 2
// chart, windowed by the polynomial bump (1 - r^2/R^2)^3. The product is a
// polynomial inside the support, so the wide difference stencils read its
// Hessian essentially exactly everywhere: the window contributes nothing at
// the origin (its gradient vanishes there and q is zero), and the only
// off-origin gradient zeros are the degenerate balance circles on the
// diagonals, whose measured determinants sit at the noise floor far below
// any reporting threshold.
struct CounterexampleField {
  DarbouxBox box;
  GridField field;
};

CounterexampleField make_counterexample_field(Index res) {
  DarbouxBox box;
  box.n = 2;
  box.lo = Vector::Constant(4, -6.0);
  box.hi = Vector::Constant(4, 6.0);
  box.res = IndexVector::Constant(4, static_cast<int>(res));
  box.boundary = DarbouxBox::Boundary::CompactSupport;
  const Scalar radius = 4.5;  // stretched support stays inside the box
  GridField field = GridField::sample(box, [&](const Vector& z) {
    const Scalar quad = 2 * (z[0] * z[2] + z[1] * z[3]);
    const Scalar u = 1 - z.squaredNorm() / (radius * radius);
    return u > 0 ? quad * u * u * u : 0.0;
  });
  return {box, std::move(field)};
}

CheckReport check_hessian_counterexample(const RunConfig& config) {
  Builder b("hessian_counterexample", "hamiltonian-invariant-functional-volume-witness",
            config, 0.05);
  const int n = 2;
  const CounterexampleField cf = make_counterexample_field(37);

  const Scalar p_base = p_functional(cf.field, 0.5);
  const Scalar t_origin = 4.0 * (4 * n + 4) * n;
  b.value("p_base", p_base);
  b.value("p_base_expected", t_origin);

  Vector c(2);
  c << 0.25, -0.25;
  const GridField moved = pullback(counterexample_map(c), cf.field);
  const Scalar p_moved = p_functional(moved, 0.5);
  // pulling back by g samples the field at g^{-1}, so the origin Hessian is
  // the quadratic form composed with the inverse scaling
  Scalar sum_exp = 0;
  for (int nu = 0; nu < n; ++nu) sum_exp += std::exp(-4 * c[nu]);
  const Scalar expected_diff = 4.0 * (4 * n + 4) * (sum_exp - n);
  b.value("p_moved", p_moved);
  b.value("difference", p_moved - p_base);
  b.value("difference_expected", expected_diff);
  b.require(std::abs((p_moved - p_base) - expected_diff) <=
            b.rep.tolerance * std::abs(expected_diff));

  // a genuinely symplectic linear pullback must not move the value
  const Scalar angle1 = 0.35, angle2 = -0.2;
  Matrix rot = Matrix::Zero(4, 4);
  rot(0, 0) = std::cos(angle1);
  rot(0, 2) = std::sin(angle1);
  rot(2, 0) = -std::sin(angle1);
  rot(2, 2) = std::cos(angle1);
  rot(1, 1) = std::cos(angle2);
  rot(1, 3) = std::sin(angle2);
  rot(3, 1) = -std::sin(angle2);
  rot(3, 3) = std::cos(angle2);
  const GridField rotated = pullback(Diffeomorphism::linear(rot), cf.field);
  const Scalar p_rotated = p_functional(rotated, 0.5);
  b.value("p_symplectic_pullback", p_rotated);
  b.require(std::abs(p_rotated - p_base) <= b.rep.tolerance * std::abs(p_base));
  return b.done();
}

// ----- rearrangement checks ----------------------------------------------

CheckReport check_pairing_oracle(const RunConfig& config) {
  Builder b("pairing_oracle", "sorted-pairing-equals-exhaustive-maximum", config, 0);
  bool exact = true, symmetric = true, ordered = true;
  for (Index cells : {5, 6, 7}) {
    const SpacePtr space = MeasureSpace::uniform(cells, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      CounterRng rng(config.seed,
                     40000 + 100 * static_cast<std::uint64_t>(cells) +
                         static_cast<std::uint64_t>(trial));
      const DiscreteFunction phi(space, random_integer_values(cells, rng));
      const DiscreteFunction psi(space, random_integer_values(cells, rng));
      const PairingResult res = sup_pairing(phi, psi);
      exact = exact && res.value == brute_force_sup_pairing(phi, psi);
      symmetric = symmetric && res.value == sup_pairing(psi, phi).value;
      ordered = ordered && similarly_ordered(apply_witness(phi, res.witness), psi);
    }
  }
  b.value("exact", exact ? 1 : 0);
  b.value("symmetric", symmetric ? 1 : 0);
  b.value("witness_similarly_ordered", ordered ? 1 : 0);
  b.require(exact && symmetric && ordered);
  return b.done();
}

CheckReport check_chebyshev_suite(const RunConfig& config) {
  Builder b("chebyshev_suite", "similarly-ordered-pairing-dominates-mean-product",
            config, 1e-9);
  Scalar worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 50000 + static_cast<std::uint64_t>(trial));
    const Index cells = rng.range_int(2, 12);
    const SpacePtr space = unit_mass_space(cells);
    Vector a = random_uniform_values(cells, rng);
    Vector c = random_uniform_values(cells, rng);
    std::sort(a.data(), a.data() + cells);
    std::sort(c.data(), c.data() + cells);
    std::vector<Index> shuffle_idx(static_cast<std::size_t>(cells));
    std::iota(shuffle_idx.begin(), shuffle_idx.end(), Index{0});
    rng.shuffle(shuffle_idx);
    Vector av(cells), cv(cells);
    for (Index i = 0; i < cells; ++i) {
      av[i] = a[shuffle_idx[static_cast<std::size_t>(i)]];
      cv[i] = c[shuffle_idx[static_cast<std::size_t>(i)]];
    }
    const OrderedPair pair(DiscreteFunction(space, av), DiscreteFunction(space, cv));
    const auto [lhs, rhs] = chebyshev_lower(pair);
    worst = std::max(worst, rhs - lhs);
  }
  b.value("worst_slack", worst);
  b.require(worst <= b.rep.tolerance);
  return b.done();
}

CheckReport check_abs_sup_suite(const RunConfig& config) {
  Builder b("abs_sup_suite", "abs-pairing-sup-three-term-bound", config, 1e-9);
  bool all_hold = true;
  bool brute_ok = true;
  Scalar worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 60000 + static_cast<std::uint64_t>(trial));
    const Index cells = rng.range_int(2, 12);
    const SpacePtr space = unit_mass_space(cells);
    const DiscreteFunction phi(space, trial % 2 ? random_uniform_values(cells, rng)
                                                : random_quantized_values(cells, rng));
    const DiscreteFunction psi(space, trial % 2 ? random_uniform_values(cells, rng)
                                                : random_quantized_values(cells, rng));
    const InequalityReport rep = abs_sup_bound_check(phi, psi, b.rep.tolerance);
    all_hold = all_hold && rep.holds;
    worst = std::max(worst, rep.lhs - rep.rhs);
    if (cells <= 7) {
      const Scalar brute = brute_force_sup_pairing(
          phi.with_values(phi.values().cwiseAbs()), psi);
      brute_ok = brute_ok && std::abs(brute - rep.lhs) <= 1e-12;
    }
  }
  b.value("all_hold", all_hold ? 1 : 0);
  b.value("worst_slack", worst);
  b.value("lhs_matches_bruteforce", brute_ok ? 1 : 0);
  b.require(all_hold && brute_ok);
  return b.done();
}

CheckReport check_product_abs_suite(const RunConfig& config) {
  Builder b("product_abs_suite", "abs-product-sup-four-three-bound", config, 1e-9);
  bool all_hold = true;
  bool brute_ok = true;
  Scalar worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 70000 + static_cast<std::uint64_t>(trial));
    const Index cells = rng.range_int(2, 12);
    const SpacePtr space = unit_mass_space(cells);
    const DiscreteFunction f(space, trial % 2 ? random_uniform_values(cells, rng)
                                              : random_quantized_values(cells, rng));
    const DiscreteFunction xi(space, trial % 2 ? random_uniform_values(cells, rng)
                                               : random_quantized_values(cells, rng));
    const InequalityReport rep = product_abs_bound_check(f, xi, b.rep.tolerance);
    all_hold = all_hold && rep.holds;
    worst = std::max(worst, rep.lhs - rep.rhs);
    if (cells <= 7) {
      const Scalar brute = brute_force_sup_pairing(
          f.with_values(f.values().cwiseAbs()), xi.with_values(xi.values().cwiseAbs()));
      brute_ok = brute_ok && std::abs(brute - rep.lhs) <= 1e-12;
    }
  }
  b.value("all_hold", all_hold ? 1 : 0);
  b.value("worst_slack", worst);
  b.value("lhs_matches_bruteforce", brute_ok ? 1 : 0);
  b.require(all_hold && brute_ok);
  return b.done();
}

CheckReport check_two_block_bound_suite(const RunConfig& config) {
  Builder b("two_block_bound_suite", "two-block-average-lower-bound", config, 0);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 80000 + static_cast<std::uint64_t>(trial));
    const Index cells = rng.range_int(2, 7);
    const SpacePtr space = MeasureSpace::uniform(cells, 1.0);
    const DiscreteFunction f(space, random_integer_values(cells, rng));

    // T random, xi >= 0 on T and <= 0 off it
    CellSet T;
    for (Index i = 0; i < cells; ++i)
      if (rng.below(2)) T.push_back(i);
    Vector xi_vals(cells);
    {
      std::vector<bool> in_t(static_cast<std::size_t>(cells), false);
      for (Index i : T) in_t[static_cast<std::size_t>(i)] = true;
      for (Index i = 0; i < cells; ++i) {
        const int mag = rng.range_int(0, 4);
        xi_vals[i] = in_t[static_cast<std::size_t>(i)] ? mag : -mag;
      }
    }
    const DiscreteFunction xi(space, xi_vals);

    // S random with |S| = |T|
    std::vector<Index> all(static_cast<std::size_t>(cells));
    std::iota(all.begin(), all.end(), Index{0});
    rng.shuffle(all);
    CellSet S(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(T.size()));
    std::sort(S.begin(), S.end());

    const PairingBound pb = pairing_lower_bound(f, xi, S, T);
    const Scalar brute = brute_force_sup_pairing(f, xi);
    ok = ok && pb.sup == brute && pb.bound <= brute;
  }
  b.value("ok", ok ? 1 : 0);
  b.require(ok);
  return b.done();
}

CheckReport check_transport_suite(const RunConfig& config) {
  Builder b("transport_suite", "level-set-transport-error-bound", config, 0);
  bool ok = true;
  int exact_cases = 0;
  Scalar worst_ratio = 0;  // error / (3 epsilon)
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 90000 + static_cast<std::uint64_t>(trial));
    const Index cells = rng.range_int(2, 64);
    const SpacePtr space = unit_mass_space(cells);
    const Vector base = trial % 2 ? random_uniform_values(cells, rng)
                                  : random_quantized_values(cells, rng);
    std::vector<Index> perm(static_cast<std::size_t>(cells));
    std::iota(perm.begin(), perm.end(), Index{0});
    rng.shuffle(perm);
    Vector shuffled(cells);
    for (Index i = 0; i < cells; ++i) shuffled[i] = base[perm[static_cast<std::size_t>(i)]];

    const DiscreteFunction xi(space, base);
    const DiscreteFunction eta(space, shuffled);
    const Scalar epsilon = rng.uniform(0.05, 2.0);
    const TransportPlan plan = katok_transport(xi, eta, epsilon);

    // permutation must be a bijection
    std::vector<bool> hit(static_cast<std::size_t>(cells), false);
    for (Index image : plan.permutation) {
      if (image < 0 || image >= cells || hit[static_cast<std::size_t>(image)]) ok = false;
      else hit[static_cast<std::size_t>(image)] = true;
    }

    const Scalar err = transport_error(xi, eta, plan);
    ok = ok && err < 3 * epsilon;
    worst_ratio = std::max(worst_ratio, err / (3 * epsilon));

    // quantization separating all values forces an exact match
    bool separated = true;
    for (const auto& [lo, hi] : plan.intervals) {
      Scalar seen = 0;
      bool any = false;
      for (Index i = 0; i < cells; ++i) {
        if (base[i] >= lo && base[i] < hi) {
          if (any && base[i] != seen) separated = false;
          seen = base[i];
          any = true;
        }
      }
    }
    if (separated) {
      ok = ok && err == 0;
      ++exact_cases;
    }
  }
  b.value("ok", ok ? 1 : 0);
  b.value("worst_error_over_3eps", worst_ratio);
  b.value("exact_cases", exact_cases);
  b.require(ok && worst_ratio < 1);
  return b.done();
}

// ----- support family checks ---------------------------------------------

CheckReport check_l1_bound_suite(const RunConfig& config) {
  Builder b("l1_bound_suite", "support-family-l1-lower-bound", config, 1e-9);
  const Index cells = 8;
  const SpacePtr space = unit_mass_space(cells);
  const DiscreteFunction two_level = two_level_density(space);
  const SupportFamily family({{0.0, two_level}});

  // separation constants against the subset-enumeration oracle
  const AlphaCurves curves = alpha_curves(two_level);
  b.value("c", curves.c);
  b.value("m", curves.m);
  b.require(curves.c == 0.5 && curves.m == 1.0);

  bool oracle_ok = true;
  for (Index k = 1; k <= cells; ++k) {
    const Scalar alpha = static_cast<Scalar>(k) / cells;
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Index mask = 1; mask < (Index{1} << cells); ++mask) {
      if (static_cast<Index>(__builtin_popcountll(static_cast<unsigned long long>(mask))) != k)
        continue;
      Scalar avg = 0;
      for (Index i = 0; i < cells; ++i)
        if (mask & (Index{1} << i)) avg += two_level[i];
      best = std::max(best, avg / static_cast<Scalar>(k));
    }
    oracle_ok = oracle_ok && std::abs(top_average(two_level, alpha) - best) <= 1e-14;
  }
  b.value("breakpoint_oracle", oracle_ok ? 1 : 0);
  b.require(oracle_ok);

  // zero-mean branch with brute-force functional values
  bool zero_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 100000 + static_cast<std::uint64_t>(trial));
    Vector v = random_quantized_values(cells, rng);
    v.array() -= v.mean();  // equal masses: zero weighted mean
    const DiscreteFunction xi(space, v);
    const L1BoundReport rep = l1_lower_bound(family, xi, b.rep.tolerance);
    const Scalar brute = brute_force_sup_pairing(two_level, xi);
    zero_ok = zero_ok && rep.branch == L1Branch::ZeroMean && rep.holds &&
              std::abs(rep.q_value - brute) <= 1e-12 &&
              brute >= rep.bound - b.rep.tolerance;
  }
  b.value("zero_branch", zero_ok ? 1 : 0);
  b.require(zero_ok);

  // positive-mean branch over the family extended by a positive-mean density
  const DiscreteFunction one(space, Vector::Ones(cells));
  const SupportFamily extended({{0.0, two_level}, {0.0, one}});
  bool pos_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(config.seed, 110000 + static_cast<std::uint64_t>(trial));
    Vector v = random_quantized_values(cells, rng);
    v.array() += 0.25 * (1 + rng.range_int(0, 8));
    if (integrate(DiscreteFunction(space, v)) <= 0) v.array() += 3.5;
    const DiscreteFunction xi(space, v);
    const L1BoundReport rep = l1_lower_bound(extended, xi, b.rep.tolerance);
    const Scalar brute = std::max(brute_force_sup_pairing(two_level, xi),
                                  brute_force_sup_pairing(one, xi));
    pos_ok = pos_ok && rep.branch == L1Branch::NonnegativeMean && rep.holds &&
             std::abs(rep.q_value - brute) <= 1e-12 &&
             brute >= rep.bound - b.rep.tolerance;
  }
  b.value("positive_branch", pos_ok ? 1 : 0);
  b.require(pos_ok);
  return b.done();
}

CheckReport check_ri_norm_axioms(const RunConfig& config) {
  Builder b("ri_norm_axioms", "rearrangement-invariant-norm-axioms", config, 1e-9);
  const Index cells = 8;
  const SpacePtr space = unit_mass_space(cells);
  const DiscreteFunction two_level = two_level_density(space);
  const DiscreteFunction plus(space, Vector::Ones(cells));
  const DiscreteFunction minus(space, -Vector::Ones(cells));
  const SupportFamily family({{0.0, two_level}, {0.0, plus}, {0.0, minus}});
  const AxiomReport rep = ri_norm_axiom_report(family, 1000, config.seed, b.rep.tolerance);
  b.value("homogeneity", rep.homogeneity ? 1 : 0);
  b.value("triangle", rep.triangle ? 1 : 0);
  b.value("monotonicity", rep.monotonicity ? 1 : 0);
  b.value("faithfulness", rep.faithfulness ? 1 : 0);
  b.value("fatou", rep.fatou ? 1 : 0);
  b.value("l1_embedding", rep.l1_embedding ? 1 : 0);
  b.value("equivalence", rep.equivalence ? 1 : 0);
  b.value("b_embedding", rep.b_embedding);
  b.value("equivalence_factor", rep.equivalence_factor);
  b.require(rep.holds());
  return b.done();
}

CheckReport check_equidistribution_invariance(const RunConfig& config) {
  Builder b("equidistribution_invariance", "rearrangement-closed-evaluation-invariance",
            config, 0);
  const Index cells = 10;
  const SpacePtr space = unit_mass_space(cells);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    CounterRng rng(config.seed, 120000 + static_cast<std::uint64_t>(trial));
    const DiscreteFunction f(space, random_quantized_values(cells, rng));
    const DiscreteFunction g(space, random_quantized_values(cells, rng));
    const SupportFamily family({{rng.uniform(-1, 1), f}, {rng.uniform(-1, 1), g}});
    const Vector xi = random_quantized_values(cells, rng);
    std::vector<Index> perm(static_cast<std::size_t>(cells));
    std::iota(perm.begin(), perm.end(), Index{0});
    rng.shuffle(perm);
    Vector xi_perm(cells);
    for (Index i = 0; i < cells; ++i) xi_perm[i] = xi[perm[static_cast<std::size_t>(i)]];
    const Scalar before =
        evaluate(family, DiscreteFunction(space, xi), EvalMode::OverRearrangements);
    const Scalar after =
        evaluate(family, DiscreteFunction(space, xi_perm), EvalMode::OverRearrangements);
    ok = ok && before == after;
  }
  b.value("ok", ok ? 1 : 0);
  b.require(ok);
  return b.done();
}

// ----- flow checks --------------------------------------------------------

CheckReport check_regularizer(const RunConfig& config) {
  Builder b("regularizer_check", "hamiltonian-mollifier-mass-and-convergence", config,
            1e-8);
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -M_PI);
  box.hi = Vector::Constant(2, M_PI);
  box.res = IndexVector::Constant(2, 64);
  box.boundary = DarbouxBox::Boundary::Periodic;
  const GridField h = GridField::sample(box, [](const Vector& z) {
    return std::cos(z[0]) + 0.5 * std::cos(2 * z[1]);
  });

  const GridField r8 = regularize({8.0, 8}, h);
  const GridField r16 = regularize({16.0, 8}, h);
  const Scalar mass_err8 = std::abs(r8.integral() - h.integral());
  const Scalar mass_err16 = std::abs(r16.integral() - h.integral());
  const Scalar dev8 = (r8.samples() - h.samples()).cwiseAbs().maxCoeff();
  const Scalar dev16 = (r16.samples() - h.samples()).cwiseAbs().maxCoeff();
  b.value("mass_err_lambda8", mass_err8);
  b.value("mass_err_lambda16", mass_err16);
  b.value("sup_dev_lambda8", dev8);
  b.value("sup_dev_lambda16", dev16);
  b.require(mass_err8 <= b.rep.tolerance && mass_err16 <= b.rep.tolerance);
  b.require(dev16 < dev8);
  return b.done();
}

CheckReport check_flow(const RunConfig& config) {
  Builder b("flow_check", "flow-symplecticity-volume-and-pullback", config, 1e-6);

  // exact linear flows are symplectic to machine precision
  Scalar sympl_defect = 0;
  for (int n = 1; n <= 2; ++n) {
    CounterRng rng(config.seed, 130000 + static_cast<std::uint64_t>(n));
    Matrix a(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = i; j < 2 * n; ++j) a(i, j) = a(j, i) = rng.uniform(-1, 1);
    FlowSpec spec;
    spec.hamiltonian = QuadraticForm(n, a);
    spec.duration = 1.3;
    spec.method = FlowSpec::Method::ExactLinear;
    const Matrix s = flow(spec).matrix();
    const Matrix j = standard_symplectic_matrix(n);
    sympl_defect = std::max(sympl_defect,
                            (s.transpose() * j * s - j).cwiseAbs().maxCoeff());
  }
  b.value("symplectic_defect", sympl_defect);
  b.require(sympl_defect <= 1e-12);

  // leapfrog on a separable Hamiltonian preserves phase-space volume
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -M_PI);
  box.hi = Vector::Constant(2, M_PI);
  box.res = IndexVector::Constant(2, 48);
  box.boundary = DarbouxBox::Boundary::Periodic;
  const GridField pendulum = GridField::sample(box, [](const Vector& z) {
    return std::cos(z[0]) + 0.5 * z[1] * z[1] * (1 - z[1] * z[1] / 25);
  });
  FlowSpec spec;
  spec.hamiltonian = pendulum;
  spec.duration = 1.0;
  spec.steps = 120;
  spec.method = FlowSpec::Method::Leapfrog;
  const Diffeomorphism g = flow(spec);
  const VolumeReport vol = volume_check(g, box, 100, config.seed);
  b.value("leapfrog_volume_defect", vol.max_jacobian_deviation);
  b.require(vol.max_jacobian_deviation <= 1e-6);

  // rotating a radial field is the identity up to interpolation error
  DarbouxBox rbox;
  rbox.n = 1;
  rbox.lo = Vector::Constant(2, -4.0);
  rbox.hi = Vector::Constant(2, 4.0);
  rbox.res = IndexVector::Constant(2, 96);
  rbox.boundary = DarbouxBox::Boundary::CompactSupport;
  const GridField radial = GridField::sample(rbox, [](const Vector& z) {
    const Scalar r2 = z.squaredNorm() / (3.2 * 3.2);
    return r2 < 1 ? std::pow(1 - r2, 3) : 0.0;
  });
  FlowSpec rot;
  rot.hamiltonian = QuadraticForm(1, 0.5 * Matrix::Identity(2, 2));
  rot.duration = 0.7;
  rot.method = FlowSpec::Method::ExactLinear;
  const GridField turned = pullback(flow(rot), radial);
  const Scalar rot_dev = (turned.samples() - radial.samples()).cwiseAbs().maxCoeff();
  const Scalar rot_tol = radial.interpolation_tolerance();
  b.value("rotation_deviation", rot_dev);
  b.value("interpolation_tolerance", rot_tol);
  b.require(rot_dev <= rot_tol);
  return b.done();
}

// ----- registry ------------------------------------------------------------

using CheckFunction = CheckReport (*)(const RunConfig&);

const std::map<std::string, CheckFunction>& registry() {
  static const std::map<std::string, CheckFunction> reg = {
      {"t_closed_form", check_t_closed_form},
      {"t_symplectic_invariance", check_t_symplectic_invariance},
      {"t_sl_witness", check_t_sl_witness},
      {"hessian_counterexample", check_hessian_counterexample},
      {"pairing_oracle", check_pairing_oracle},
      {"chebyshev_suite", check_chebyshev_suite},
      {"abs_sup_suite", check_abs_sup_suite},
      {"product_abs_suite", check_product_abs_suite},
      {"two_block_bound_suite", check_two_block_bound_suite},
      {"l1_bound_suite", check_l1_bound_suite},
      {"ri_norm_axioms", check_ri_norm_axioms},
      {"transport_suite", check_transport_suite},
      {"regularizer_check", check_regularizer},
      {"flow_check", check_flow},
      {"equidistribution_invariance", check_equidistribution_invariance},
  };
  return reg;
}

}  // namespace

std::vector<std::string> all_check_ids() {
  std::vector<std::string> ids;
  for (const auto& [name, fn] : registry()) ids.push_back(name);
  return ids;
}

bool is_known_check(const std::string& name) { return registry().count(name) > 0; }

CheckReport run_check(const std::string& name, const RunConfig& config) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown check '" + name + "'");
  return it->second(config);
}

std::vector<CheckReport> run_suite(const std::vector<std::string>& names,
                                   const RunConfig& config) {
  for (const auto& name : names)
    if (!is_known_check(name)) throw std::invalid_argument("unknown check '" + name + "'");
  std::vector<CheckReport> reports;
  reports.reserve(names.size());
  for (const auto& name : names) reports.push_back(run_check(name, config));
  std::sort(reports.begin(), reports.end(),
            [](const CheckReport& a, const CheckReport& b) { return a.check_id < b.check_id; });
  return reports;
}

}  // namespace rif
