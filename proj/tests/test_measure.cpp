#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rif/measure.hpp"
#include "rif/rng.hpp"

using namespace rif;

namespace {

DiscreteFunction make(std::initializer_list<Scalar> masses,
                      std::initializer_list<Scalar> values) {
  Vector w(static_cast<Index>(masses.size()));
  Index k = 0;
  for (Scalar m : masses) w[k++] = m;
  Vector v(static_cast<Index>(values.size()));
  k = 0;
  for (Scalar x : values) v[k++] = x;
  return DiscreteFunction(MeasureSpace::make(w), std::move(v));
}

}  // namespace

TEST_CASE("measure space validation") {
  CHECK_THROWS(MeasureSpace::make(Vector::Zero(0)));
  Vector bad(2);
  bad << 1, -1;
  CHECK_THROWS(MeasureSpace::make(bad));
  CHECK(MeasureSpace::uniform(3)->equal_mass());
  Vector mixed(2);
  mixed << 1, 2;
  CHECK_FALSE(MeasureSpace::make(mixed)->equal_mass());
}

TEST_CASE("integrate") {
  CHECK(integrate(make({1, 1}, {1, 2})) == 3);
  CHECK(integrate(make({1, 1}, {5, -7}), CellSet{}) == 0);
  CHECK(integrate(make({0.5, 0.5, 1}, {3, -1, 2})) == 3);  // 1.5 - 0.5 + 2
  CHECK_THROWS(integrate(make({1, 1}, {1, 2}), CellSet{2}));
  CHECK_THROWS(integrate(make({1, 1}, {1, 2}), CellSet{1, 0}));  // unsorted
}

TEST_CASE("average") {
  CHECK(average(make({1, 1}, {1, 3})) == 2);
  CHECK(average(make({1, 1}, {1, 3}), CellSet{}) == 0);  // zero-mass subset
  CHECK(average(make({2}, {4})) == 4);
}

TEST_CASE("distribution mass") {
  const auto f = make({1, 1, 1}, {0, 1, 2});
  CHECK(distribution_mass(f, 0.5, Relation::Greater) == 2);
  const auto c = make({1, 2}, {7, 7});
  CHECK(distribution_mass(c, 7, Relation::GreaterEq) == 3);
  const auto g = make({1, 2, 3}, {1, 1, 2});
  CHECK(distribution_mass(g, 1, Relation::Equal) == 3);
  CHECK(distribution_mass(g, 1, Relation::LessEq) == 3);
  CHECK(distribution_mass(g, 2, Relation::Less) == 3);
}

TEST_CASE("equidistributed") {
  CHECK(equidistributed(make({1, 1}, {1, 2}), make({1, 1}, {2, 1})));
  CHECK(equidistributed(make({2}, {1}), make({1, 1}, {1, 1})));
  CHECK_FALSE(equidistributed(make({1, 1}, {1, 2}), make({2, 1}, {1, 2})));
  CHECK_FALSE(equidistributed(make({1, 1}, {1, 2}), make({1, 1}, {1, 3})));

  // reflexive, symmetric, and stable under injective value maps
  CounterRng rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index cells = rng.range_int(1, 9);
    Vector v(cells), w(cells);
    for (Index i = 0; i < cells; ++i) v[i] = rng.range_int(-3, 3);
    std::vector<Index> perm(static_cast<std::size_t>(cells));
    for (Index i = 0; i < cells; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    for (Index i = 0; i < cells; ++i) w[i] = v[perm[static_cast<std::size_t>(i)]];
    const auto space = MeasureSpace::uniform(cells);
    const DiscreteFunction f(space, v), g(space, w);
    CHECK(equidistributed(f, f));
    CHECK(equidistributed(f, g));
    CHECK(equidistributed(g, f));
    const auto cube = [](Scalar x) { return x * x * x + 2; };
    CHECK(equidistributed(f.with_values(v.unaryExpr(cube)), g.with_values(w.unaryExpr(cube))));
  }
}

TEST_CASE("decreasing rearrangement") {
  const auto p = decreasing_rearrangement(make({1, 1, 1}, {2, -1, 2}));
  REQUIRE(p.breakpoints() == 2);
  CHECK(p.values[0] == 2);
  CHECK(p.cumulative_mass[0] == 2);
  CHECK(p.values[1] == -1);
  CHECK(p.cumulative_mass[1] == 3);
  CHECK(p.value_at(1.5) == 2);
  CHECK(p.value_at(2.0) == 2);  // left continuity
  CHECK(p.value_at(2.5) == -1);

  const auto single = decreasing_rearrangement(make({1, 2}, {5, 5}));
  REQUIRE(single.breakpoints() == 1);
  CHECK(single.cumulative_mass[0] == 3);

  const auto q = decreasing_rearrangement(make({2, 1}, {1, 3}));
  REQUIRE(q.breakpoints() == 2);
  CHECK(q.values[0] == 3);
  CHECK(q.cumulative_mass[0] == 1);
  CHECK(q.values[1] == 1);
  CHECK(q.cumulative_mass[1] == 3);
}

TEST_CASE("profile is equidistributed with the function") {
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index cells = rng.range_int(1, 12);
    Vector w(cells), v(cells);
    for (Index i = 0; i < cells; ++i) {
      w[i] = 0.25 * rng.range_int(1, 8);
      v[i] = 0.5 * rng.range_int(-6, 6);
    }
    const DiscreteFunction f(MeasureSpace::make(w), v);
    const auto p = decreasing_rearrangement(f);
    // monotone decreasing breakpoints, strictly increasing mass
    for (Index k = 1; k < p.breakpoints(); ++k) {
      CHECK(p.values[k] < p.values[k - 1]);
      CHECK(p.cumulative_mass[k] > p.cumulative_mass[k - 1]);
    }
    CHECK(p.total_mass() == doctest::Approx(f.space().total_mass()).epsilon(1e-15));
    // the level-mass identity at every breakpoint
    for (Index k = 0; k < p.breakpoints(); ++k) {
      CHECK(distribution_mass(f, p.values[k], Relation::GreaterEq) ==
            doctest::Approx(p.cumulative_mass[k]).epsilon(1e-15));
    }
  }
}

TEST_CASE("sublevel parameterization") {
  const auto theta = sublevel_parameterization(make({1, 1, 1}, {0, 1, 2}));
  CHECK(theta.values() == Vector::LinSpaced(3, 0, 2));

  const auto single = sublevel_parameterization(make({3}, {5}));
  CHECK(single[0] == 0);

  CHECK_THROWS(sublevel_parameterization(make({1, 1}, {2, 2})));  // ties rejected

  // strictly increasing values: theta is the mass strictly below each cell
  const auto f = make({0.5, 1.5, 1}, {-2, 0, 3});
  const auto t = sublevel_parameterization(f);
  CHECK(t[0] == 0);
  CHECK(t[1] == 0.5);
  CHECK(t[2] == 2.0);
}

TEST_CASE("sublevel parameterization pushes mass to the uniform measure") {
  CounterRng rng(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index cells = rng.range_int(2, 20);
    Vector w(cells), v(cells);
    for (Index i = 0; i < cells; ++i) w[i] = 0.25 * rng.range_int(1, 6);
    // injective values
    for (Index i = 0; i < cells; ++i) v[i] = static_cast<Scalar>(i) + rng.uniform(0, 0.4);
    std::vector<Index> perm(static_cast<std::size_t>(cells));
    for (Index i = 0; i < cells; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    Vector shuffled(cells);
    for (Index i = 0; i < cells; ++i) shuffled[i] = v[perm[static_cast<std::size_t>(i)]];
    const DiscreteFunction zeta(MeasureSpace::make(w), shuffled);
    const DiscreteFunction theta = sublevel_parameterization(zeta);

    // sorting cells by theta yields cumulative masses matching theta
    {
      std::vector<Index> order(static_cast<std::size_t>(cells));
      for (Index i = 0; i < cells; ++i) order[static_cast<std::size_t>(i)] = i;
      std::sort(order.begin(), order.end(),
                [&](Index a, Index b) { return theta[a] < theta[b]; });
      Scalar cum = 0;
      for (Index k = 0; k < cells; ++k) {
        const Index cell = order[static_cast<std::size_t>(k)];
        CHECK(theta[cell] == doctest::Approx(cum).epsilon(1e-14));
        cum += zeta.space().mass(cell);
      }
    }

    // point-mass histogram over uniform bins deviates by at most one cell mass
    const Scalar total = zeta.space().total_mass();
    const int bins = 5;
    const Scalar max_cell = w.maxCoeff();
    for (int bin = 0; bin < bins; ++bin) {
      const Scalar lo = total * bin / bins, hi = total * (bin + 1) / bins;
      Scalar mass = 0;
      for (Index i = 0; i < cells; ++i)
        if (theta[i] >= lo && theta[i] < hi) mass += zeta.space().mass(i);
      CHECK(std::abs(mass - total / bins) <= max_cell + 1e-12);
    }
  }
}

TEST_CASE("positive and negative parts") {
  const auto f = make({1, 1}, {-1, 2});
  CHECK(positive_part(f).values() == (Vector(2) << 0, 2).finished());
  CHECK(negative_part(f).values() == (Vector(2) << 1, 0).finished());
  CHECK(integrate(positive_part(f)) + integrate(negative_part(f)) == 3);

  const auto g = make({1, 2}, {1, 4});
  CHECK(positive_part(g).values() == g.values());
  CHECK(negative_part(g).values() == Vector::Zero(2));

  // f = f+ - f- identically
  CounterRng rng(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(6);
    for (Index i = 0; i < 6; ++i) v[i] = rng.uniform(-5, 5);
    const DiscreteFunction h(MeasureSpace::uniform(6), v);
    CHECK((positive_part(h).values() - negative_part(h).values() - v).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("profile gaps shrink under grid refinement") {
  // samples of a continuous function at two resolutions
  auto sampled = [](Index cells) {
    Vector v(cells);
    for (Index i = 0; i < cells; ++i)
      v[i] = std::sin(2 * M_PI * (i + 0.5) / static_cast<Scalar>(cells));
    return DiscreteFunction(
        MeasureSpace::uniform(cells, 1.0 / static_cast<Scalar>(cells)), v);
  };
  auto max_gap = [](const DistributionProfile& p) {
    Scalar g = 0;
    for (Index k = 1; k < p.breakpoints(); ++k)
      g = std::max(g, p.values[k - 1] - p.values[k]);
    return g;
  };
  const Scalar coarse = max_gap(decreasing_rearrangement(sampled(64)));
  const Scalar fine = max_gap(decreasing_rearrangement(sampled(256)));
  CHECK(fine < coarse);
}
