#include "rif/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rif {

SupportFamily::SupportFamily(std::vector<SupportPair> pairs, bool rearrangement_closed)
    : pairs_(std::move(pairs)), rearrangement_closed_(rearrangement_closed) {
  if (pairs_.empty()) throw std::invalid_argument("support family must be nonempty");
  for (std::size_t k = 1; k < pairs_.size(); ++k)
    if (!same_space(pairs_[0].density, pairs_[k].density))
      throw std::invalid_argument("family densities must share one space");
}

bool SupportFamily::homogeneous() const {
  for (const auto& p : pairs_)
    if (p.offset != 0) return false;
  return true;
}

Scalar evaluate(const SupportFamily& family, const DiscreteFunction& xi, EvalMode mode) {
  if (!same_space(family.pairs().front().density, xi))
    throw std::invalid_argument("xi must live on the family space");
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (const auto& [a, f] : family.pairs()) {
    const Scalar v = (mode == EvalMode::Fixed)
                         ? a + f.values().cwiseProduct(xi.values()).dot(f.space().masses())
                         : a + sup_pairing(f, xi).value;
    best = std::max(best, v);
  }
  return best;
}

namespace {

struct SortedLevels {
  std::vector<Scalar> values;  // descending
  std::vector<Scalar> masses;
};

SortedLevels sorted_desc(const DiscreteFunction& f) {
  std::vector<Index> idx(static_cast<std::size_t>(f.cells()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return f[a] > f[b]; });
  SortedLevels s;
  for (Index i : idx) {
    s.values.push_back(f[i]);
    s.masses.push_back(f.space().mass(i));
  }
  return s;
}

// integral of the top alpha mass of the sorted levels
Scalar top_integral(const SortedLevels& s, Scalar alpha) {
  Scalar left = alpha, acc = 0;
  for (std::size_t k = 0; k < s.values.size() && left > 0; ++k) {
    const Scalar take = std::min(left, s.masses[k]);
    acc += take * s.values[k];
    left -= take;
  }
  return acc;
}

}  // namespace

Scalar top_average(const DiscreteFunction& f, Scalar alpha) {
  const Scalar total = f.space().total_mass();
  if (alpha < 0 || alpha > total * (1 + 1e-12))
    throw std::invalid_argument("alpha outside [0, total mass]");
  if (alpha == 0) return f.values().maxCoeff();
  return top_integral(sorted_desc(f), std::min(alpha, total)) / std::min(alpha, total);
}

Scalar bottom_average(const DiscreteFunction& f, Scalar alpha) {
  return -top_average(f.with_values(-f.values()), alpha);
}

AlphaCurves alpha_curves(const DiscreteFunction& f) {
  const Scalar total = f.space().total_mass();
  const SortedLevels desc = sorted_desc(f);

  std::set<Scalar> grid{0.0, total};
  Scalar cum = 0;
  for (Scalar m : desc.masses) {
    cum += m;
    grid.insert(std::min(cum, total));
    grid.insert(std::max(total - cum, 0.0));
  }
  std::vector<Scalar> alphas(grid.begin(), grid.end());
  // midpoints guard interior extrema between breakpoints
  std::vector<Scalar> with_mid;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    with_mid.push_back(alphas[k]);
    if (k + 1 < alphas.size()) with_mid.push_back(0.5 * (alphas[k] + alphas[k + 1]));
  }

  AlphaCurves curves;
  curves.alphas = Eigen::Map<const Vector>(with_mid.data(), static_cast<Index>(with_mid.size()));
  curves.upper.resize(curves.alphas.size());
  curves.lower.resize(curves.alphas.size());
  for (Index k = 0; k < curves.alphas.size(); ++k) {
    curves.upper[k] = top_average(f, curves.alphas[k]);
    curves.lower[k] = bottom_average(f, curves.alphas[k]);
  }

  Scalar min_sep = std::numeric_limits<Scalar>::infinity();
  Scalar max_size = -std::numeric_limits<Scalar>::infinity();
  for (Index k = 0; k < curves.alphas.size(); ++k) {
    const Scalar a = curves.alphas[k];
    const Scalar s_a = curves.upper[k];
    const Scalar i_comp = bottom_average(f, total - a);
    min_sep = std::min(min_sep, s_a - i_comp);
    max_size = std::max(max_size, std::abs(s_a) + std::abs(i_comp));
  }
  curves.c = min_sep / 2;
  curves.m = max_size / 2;
  return curves;
}

namespace {

bool nonconstant(const DiscreteFunction& f) {
  return f.values().maxCoeff() != f.values().minCoeff();
}

struct NormalizedFamily {
  SpacePtr space;
  std::vector<SupportPair> pairs;
  std::vector<Scalar> means;  // integral of each density
};

// Rescale masses to total one; densities absorb the factor so the induced
// functional is unchanged.
NormalizedFamily normalize(const SupportFamily& family) {
  const Scalar total = family.space().total_mass();
  NormalizedFamily out;
  out.space = MeasureSpace::make(family.space().masses() / total);
  for (const auto& [a, f] : family.pairs()) {
    DiscreteFunction density(out.space, f.values() * total);
    out.means.push_back(integrate(density));
    out.pairs.push_back({a, std::move(density)});
  }
  return out;
}

// deterministic convex blend with nonconstant density and mean of the wanted
// sign; the identity blend (t = 0) is tried first
SupportPair blend_pair(const NormalizedFamily& fam, bool want_positive_mean) {
  auto mean_ok = [&](Scalar mu) { return want_positive_mean ? mu > 0 : mu < 0; };
  for (std::size_t k = 0; k < fam.pairs.size(); ++k)
    if (nonconstant(fam.pairs[k].density) && mean_ok(fam.means[k]))
      return fam.pairs[k];

  std::ptrdiff_t base = -1, signed_k = -1;
  for (std::size_t k = 0; k < fam.pairs.size(); ++k) {
    if (base < 0 && nonconstant(fam.pairs[k].density)) base = static_cast<std::ptrdiff_t>(k);
    if (signed_k < 0 && mean_ok(fam.means[k])) signed_k = static_cast<std::ptrdiff_t>(k);
  }
  if (base < 0 || signed_k < 0)
    throw std::invalid_argument("no branch applicable: family lacks a usable density");
  const auto& pb = fam.pairs[static_cast<std::size_t>(base)];
  const auto& ps = fam.pairs[static_cast<std::size_t>(signed_k)];
  for (Scalar t : {0.5, 0.25, 0.75, 0.9, 0.99, 0.999}) {
    Vector v = (1 - t) * pb.density.values() + t * ps.density.values();
    SupportPair cand{(1 - t) * pb.offset + t * ps.offset,
                     DiscreteFunction(pb.density.space_ptr(), std::move(v))};
    if (nonconstant(cand.density) && mean_ok(integrate(cand.density))) return cand;
  }
  throw std::invalid_argument("no branch applicable: could not blend a usable density");
}

}  // namespace

L1BoundReport l1_lower_bound(const SupportFamily& family, const DiscreteFunction& xi,
                             Scalar tol) {
  if (!same_space(family.pairs().front().density, xi))
    throw std::invalid_argument("xi must live on the family space");

  const NormalizedFamily fam = normalize(family);
  bool any_nonconstant = false;
  for (const auto& p : fam.pairs) any_nonconstant |= nonconstant(p.density);
  if (!any_nonconstant)
    throw std::invalid_argument("family has only constant densities");

  const DiscreteFunction xi_n(fam.space, xi.values());
  const Scalar mean_xi = integrate(xi_n);
  const Scalar abs_xi = integrate(xi_n.with_values(xi_n.values().cwiseAbs()));
  const Scalar max_mean = *std::max_element(fam.means.begin(), fam.means.end());
  const Scalar min_mean = *std::min_element(fam.means.begin(), fam.means.end());

  L1BoundReport rep;
  rep.tolerance = tol;

  SupportPair used{0, fam.pairs.front().density};
  if (std::abs(mean_xi) <= 1e-12 * std::max<Scalar>(1, abs_xi)) {
    rep.branch = L1Branch::ZeroMean;
    for (const auto& p : fam.pairs)
      if (nonconstant(p.density)) {
        used = p;
        break;
      }
    const AlphaCurves curves = alpha_curves(used.density);
    rep.c = curves.c;
    rep.m = curves.m;
    rep.s1 = integrate(used.density);
    rep.b = curves.c;
  } else if (mean_xi > 0) {
    // the functional must grow on large positive constants
    if (!(max_mean > 0))
      throw std::invalid_argument("no branch applicable for positive-mean xi");
    rep.branch = L1Branch::NonnegativeMean;
    used = blend_pair(fam, /*want_positive_mean=*/true);
    const AlphaCurves curves = alpha_curves(used.density);
    rep.c = curves.c;
    rep.m = curves.m;
    rep.s1 = integrate(used.density);
    rep.b = rep.s1 * curves.c / (rep.s1 + curves.m);
  } else {
    if (!(min_mean < 0))
      throw std::invalid_argument("no branch applicable for negative-mean xi");
    rep.branch = L1Branch::NonpositiveMean;
    used = blend_pair(fam, /*want_positive_mean=*/false);
    const AlphaCurves curves = alpha_curves(used.density);
    rep.c = curves.c;
    rep.m = curves.m;
    rep.s1 = integrate(used.density);
    rep.b = curves.c * std::abs(rep.s1) / (std::abs(rep.s1) + curves.m);
  }

  rep.a0 = used.offset;
  rep.bound = rep.a0 + rep.b * abs_xi;
  rep.q_value = evaluate(SupportFamily(fam.pairs), xi_n, EvalMode::OverRearrangements);
  const Scalar scale = std::max({Scalar(1), std::abs(rep.q_value), std::abs(rep.bound)});
  rep.holds = rep.q_value >= rep.bound - tol * scale;
  return rep;
}

Scalar family_l1_norm_bound(const SupportFamily& family) {
  Scalar best = 0;
  for (const auto& [a, f] : family.pairs())
    best = std::max(best, integrate(f.with_values(f.values().cwiseAbs())));
  return best;
}

bool family_l1_proof_check(const SupportFamily& family, const DiscreteFunction& xi,
                           Scalar tol) {
  const NormalizedFamily fam = normalize(family);
  const DiscreteFunction xi_n(fam.space, xi.values());
  if (xi_n.values().minCoeff() < 0)
    throw std::invalid_argument("test function must be nonnegative");
  const Scalar int_xi = integrate(xi_n);
  if (!(int_xi > 0)) throw std::invalid_argument("test function must be nonzero");
  if (distribution_mass(xi_n, 0, Relation::Greater) > 0.5 + 1e-12)
    throw std::invalid_argument("test function support must carry at most half the mass");

  std::vector<SupportPair> homog;
  for (const auto& p : fam.pairs) homog.push_back({0.0, p.density});
  const SupportFamily closure(homog);
  const Scalar m_plus = evaluate(closure, xi_n, EvalMode::OverRearrangements);
  const Scalar m_minus =
      evaluate(closure, xi_n.with_values(-xi_n.values()), EvalMode::OverRearrangements);

  for (const auto& p : fam.pairs) {
    const Scalar mass_nonneg = distribution_mass(p.density, 0, Relation::GreaterEq);
    const Scalar mass_nonpos = distribution_mass(p.density, 0, Relation::LessEq);
    if (mass_nonneg >= 0.5) {
      const Scalar plus = integrate(positive_part(p.density));
      if (plus > 2 * m_plus / int_xi + tol) return false;
    }
    if (mass_nonpos >= 0.5) {
      const Scalar minus = integrate(negative_part(p.density));
      if (minus > 2 * m_minus / int_xi + tol) return false;
    }
  }
  return true;
}

Scalar minkowski_functional(const SupportFamily& family, Scalar c,
                            const DiscreteFunction& xi, EvalMode mode, Scalar rel_tol) {
  const DiscreteFunction zero = xi.with_values(Vector::Zero(xi.cells()));
  if (!(c > evaluate(family, zero, mode)))
    throw std::invalid_argument("level c must exceed the value at zero");
  auto below = [&](Scalar lambda) {
    return evaluate(family, xi.with_values(xi.values() / lambda), mode) < c;
  };

  Scalar lo, hi;
  if (below(1.0)) {
    hi = 1.0;
    lo = 0.5;
    while (below(lo)) {
      hi = lo;
      lo /= 2;
      if (lo < 1e-12) return 0.0;
    }
  } else {
    lo = 1.0;
    hi = 2.0;
    while (!below(hi)) {
      lo = hi;
      hi *= 2;
      if (hi > 1e300) throw std::runtime_error("minkowski functional diverges");
    }
  }
  while (hi - lo > rel_tol * hi) {
    const Scalar mid = 0.5 * (lo + hi);
    (below(mid) ? hi : lo) = mid;
  }
  return hi;
}

Scalar ri_norm(const SupportFamily& family, const DiscreteFunction& zeta) {
  if (!same_space(family.pairs().front().density, zeta))
    throw std::invalid_argument("zeta must live on the family space");
  const DiscreteFunction abs_zeta = zeta.with_values(zeta.values().cwiseAbs());
  Scalar best = 0;
  for (const auto& [a, f] : family.pairs())
    best = std::max(best,
                    sup_pairing(f.with_values(f.values().cwiseAbs()), abs_zeta).value);
  return best;
}

namespace {

Vector random_values(Index cells, CounterRng& rng, bool quantized) {
  Vector v(cells);
  for (Index i = 0; i < cells; ++i) {
    if (quantized)
      v[i] = 0.25 * static_cast<Scalar>(rng.range_int(-12, 12));
    else
      v[i] = rng.uniform(-3.0, 3.0);
  }
  return v;
}

}  // namespace

AxiomReport ri_norm_axiom_report(const SupportFamily& family, int trials,
                                 std::uint64_t seed, Scalar tol) {
  const SpacePtr space = family.space_ptr();
  const Index cells = family.space().cells();

  AxiomReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.homogeneity = rep.triangle = rep.monotonicity = rep.faithfulness = rep.fatou =
      rep.l1_embedding = rep.equivalence = true;

  // q dominates the mean pairing of every density
  Scalar b = 0, c_mean = 0;
  for (const auto& [a, f] : family.pairs()) {
    const Scalar mean_abs = average(f.with_values(f.values().cwiseAbs()));
    b = std::max(b, mean_abs);
    c_mean = std::max(c_mean, mean_abs);
  }
  rep.b_embedding = b;

  // universal L1 constant of the family functional, when every branch applies
  Scalar b_universal = 0;
  bool branches_ok = true;
  try {
    const NormalizedFamily fam = normalize(family);
    SupportPair zero_pair{0, fam.pairs.front().density};
    for (const auto& p : fam.pairs)
      if (nonconstant(p.density)) {
        zero_pair = p;
        break;
      }
    if (!nonconstant(zero_pair.density)) throw std::invalid_argument("constant family");
    const Scalar b_zero = alpha_curves(zero_pair.density).c;
    const SupportPair pos = blend_pair(fam, true);
    const AlphaCurves cp = alpha_curves(pos.density);
    const Scalar s1p = integrate(pos.density);
    const SupportPair neg = blend_pair(fam, false);
    const AlphaCurves cn = alpha_curves(neg.density);
    const Scalar s1n = integrate(neg.density);
    b_universal = std::min({b_zero, s1p * cp.c / (s1p + cp.m),
                            cn.c * std::abs(s1n) / (std::abs(s1n) + cn.m)});
  } catch (const std::invalid_argument&) {
    branches_ok = false;
  }
  rep.equivalence_factor = branches_ok && b_universal > 0
                               ? 4 + 3 * c_mean / b_universal
                               : 0;

  auto record = [&](bool& flag, Scalar violation) {
    if (violation > tol) flag = false;
    rep.max_violation = std::max(rep.max_violation, violation);
  };

  {
    const DiscreteFunction zero(space, Vector::Zero(cells));
    record(rep.faithfulness, std::abs(ri_norm(family, zero)));
  }

  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, 1000 + static_cast<std::uint64_t>(t));
    DiscreteFunction zeta(space, random_values(cells, rng, t % 2 == 0));
    if (zeta.values().cwiseAbs().maxCoeff() < 1e-9) {
      Vector v = zeta.values();
      v[0] = 1;
      zeta = zeta.with_values(std::move(v));
    }
    const DiscreteFunction eta(space, random_values(cells, rng, t % 3 == 0));
    const Scalar q_zeta = ri_norm(family, zeta);
    const Scalar q_eta = ri_norm(family, eta);

    // exact scaling by 2, relative scaling otherwise
    record(rep.homogeneity,
           std::abs(ri_norm(family, zeta.with_values(2 * zeta.values())) - 2 * q_zeta));
    const Scalar lam = rng.uniform(0.1, 4.0);
    record(rep.homogeneity,
           std::abs(ri_norm(family, zeta.with_values(lam * zeta.values())) - lam * q_zeta) /
               std::max<Scalar>(1, q_zeta));

    record(rep.triangle,
           ri_norm(family, zeta.with_values(zeta.values() + eta.values())) -
               (q_zeta + q_eta));

    Vector shrink(cells);
    for (Index i = 0; i < cells; ++i) shrink[i] = rng.uniform(-1.0, 1.0);
    record(rep.monotonicity,
           ri_norm(family, zeta.with_values(zeta.values().cwiseProduct(shrink))) - q_zeta);

    record(rep.faithfulness, q_zeta > 0 ? 0.0 : 1.0);

    const Vector abs_z = zeta.values().cwiseAbs();
    const Scalar q_abs = ri_norm(family, zeta.with_values(abs_z));
    Scalar prev = 0;
    constexpr int kChain = 4;
    for (int k = 1; k <= kChain; ++k) {
      const Scalar qk = ri_norm(
          family, zeta.with_values(abs_z * (static_cast<Scalar>(k) / kChain)));
      record(rep.fatou, prev - qk);  // nondecreasing
      prev = qk;
    }
    record(rep.fatou, std::abs(prev - q_abs));

    const Scalar l1 = integrate(zeta.with_values(abs_z));
    record(rep.l1_embedding, b * l1 - q_zeta);

    if (family.homogeneous()) {
      const Scalar p_plus = evaluate(family, zeta, EvalMode::OverRearrangements);
      const Scalar p_minus = evaluate(family, zeta.with_values(-zeta.values()),
                                      EvalMode::OverRearrangements);
      const Scalar p_abs = std::max(p_plus, p_minus);
      record(rep.equivalence, p_plus - q_zeta);
      record(rep.equivalence, q_zeta - (4 * p_abs + 3 * c_mean * l1));
      if (rep.equivalence_factor > 0)
        record(rep.equivalence, q_zeta - rep.equivalence_factor * p_abs);
    }
  }
  return rep;
}

LipschitzReport lipschitz_report(const SupportFamily& family, Scalar radius,
                                 int trials, std::uint64_t seed, Scalar tol) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  const SpacePtr space = family.space_ptr();
  const Index cells = family.space().cells();

  LipschitzReport rep;
  rep.trials = trials;
  Scalar max_abs_p = 0;
  auto eval = [&](const Vector& v) {
    const Scalar p = evaluate(family, DiscreteFunction(space, v),
                              EvalMode::OverRearrangements);
    max_abs_p = std::max(max_abs_p, std::abs(p));
    return p;
  };

  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, 2000 + static_cast<std::uint64_t>(t));
    Vector xi(cells), eta(cells);
    for (Index i = 0; i < cells; ++i) xi[i] = rng.uniform(-radius, radius);
    for (Index i = 0; i < cells; ++i) eta[i] = rng.uniform(-radius, radius);
    const Scalar dist = (xi - eta).cwiseAbs().maxCoeff();
    if (dist == 0) continue;
    const Vector rho = (xi - eta) / dist;
    const Scalar p_xi = eval(xi);
    const Scalar p_eta = eval(eta);
    eval(xi + rho);
    eval(eta - rho);
    rep.max_ratio = std::max(rep.max_ratio, std::abs(p_xi - p_eta) / dist);
  }
  rep.bound = 2 * max_abs_p;
  rep.holds = rep.max_ratio <= rep.bound + tol;
  return rep;
}

}  // namespace rif
