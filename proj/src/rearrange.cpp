#include "rif/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rif {

namespace {

void require_equal_mass_common(const DiscreteFunction& f, const DiscreteFunction& g) {
  if (!same_space(f, g)) throw std::invalid_argument("functions live on different spaces");
  if (!f.space().equal_mass())
    throw std::invalid_argument("equal-mass space required; split_to_equal_mass first");
}

// indices sorted by (value desc, index asc)
std::vector<Index> descending_order(const DiscreteFunction& f) {
  std::vector<Index> idx(static_cast<std::size_t>(f.cells()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return f[a] > f[b]; });
  return idx;
}

}  // namespace

bool similarly_ordered(const DiscreteFunction& phi, const DiscreteFunction& psi) {
  if (!same_space(phi, psi)) throw std::invalid_argument("functions live on different spaces");
  const Index n = phi.cells();
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y)
      if ((phi[x] - phi[y]) * (psi[x] - psi[y]) < 0) return false;
  return true;
}

OrderedPair::OrderedPair(DiscreteFunction phi, DiscreteFunction psi)
    : phi_(std::move(phi)), psi_(std::move(psi)) {
  require_equal_mass_common(phi_, psi_);
  if (!similarly_ordered(phi_, psi_))
    throw std::invalid_argument("pair is not similarly ordered");
}

std::vector<DiscreteFunction> split_to_equal_mass(
    const std::vector<DiscreteFunction>& fs, Index max_cells) {
  if (fs.empty()) return {};
  for (std::size_t k = 1; k < fs.size(); ++k)
    if (!same_space(fs[0], fs[k]))
      throw std::invalid_argument("inputs must share one space");
  const MeasureSpace& space = fs[0].space();

  if (space.equal_mass()) return fs;

  // real gcd of the masses; fails for non-commensurable ratios
  const Scalar scale = space.masses().maxCoeff();
  const Scalar tol = 1e-9 * scale;
  Scalar g = space.mass(0);
  for (Index i = 1; i < space.cells(); ++i) {
    Scalar a = std::max(g, space.mass(i)), b = std::min(g, space.mass(i));
    while (b > tol) {
      const Scalar r = std::fmod(a, b);
      a = b;
      b = r;
    }
    g = a;
  }

  std::vector<Index> counts(static_cast<std::size_t>(space.cells()));
  Index total = 0;
  for (Index i = 0; i < space.cells(); ++i) {
    const Scalar ratio = space.mass(i) / g;
    const auto n = static_cast<Index>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - static_cast<Scalar>(n)) > 1e-6)
      throw std::invalid_argument("masses are not commensurable");
    counts[static_cast<std::size_t>(i)] = n;
    total += n;
    if (total > max_cells)
      throw std::invalid_argument("equal-mass refinement exceeds max_cells");
  }

  const Scalar cell_mass = space.total_mass() / static_cast<Scalar>(total);
  auto refined = MeasureSpace::uniform(total, cell_mass);

  std::vector<DiscreteFunction> out;
  out.reserve(fs.size());
  for (const auto& f : fs) {
    Vector v(total);
    Index pos = 0;
    for (Index i = 0; i < space.cells(); ++i)
      for (Index r = 0; r < counts[static_cast<std::size_t>(i)]; ++r) v[pos++] = f[i];
    out.emplace_back(refined, std::move(v));
  }
  return out;
}

PairingResult sup_pairing(const DiscreteFunction& phi0, const DiscreteFunction& psi) {
  require_equal_mass_common(phi0, psi);
  const auto order_phi = descending_order(phi0);
  const auto order_psi = descending_order(psi);
  const Scalar w = phi0.space().mass(0);
  PairingResult res;
  res.witness.assign(static_cast<std::size_t>(phi0.cells()), 0);
  Scalar s = 0;
  for (std::size_t k = 0; k < order_phi.size(); ++k) {
    s += phi0[order_phi[k]] * psi[order_psi[k]];
    res.witness[static_cast<std::size_t>(order_psi[k])] = order_phi[k];
  }
  res.value = w * s;
  return res;
}

DiscreteFunction apply_witness(const DiscreteFunction& phi0,
                               const std::vector<Index>& witness) {
  if (witness.size() != static_cast<std::size_t>(phi0.cells()))
    throw std::invalid_argument("witness size mismatch");
  Vector v(phi0.cells());
  for (Index i = 0; i < phi0.cells(); ++i)
    v[i] = phi0[witness[static_cast<std::size_t>(i)]];
  return phi0.with_values(std::move(v));
}

namespace {

Scalar plain_pairing(const DiscreteFunction& phi, const DiscreteFunction& psi) {
  return phi.space().mass(0) * phi.values().dot(psi.values());
}

// pairing value after randomizing the order of equal values on both sides
Scalar randomized_sorted_pairing(const DiscreteFunction& phi,
                                 const DiscreteFunction& psi, CounterRng& rng) {
  auto op = descending_order(phi);
  auto oq = descending_order(psi);
  rng.shuffle(op);
  rng.shuffle(oq);
  std::stable_sort(op.begin(), op.end(), [&](Index a, Index b) { return phi[a] > phi[b]; });
  std::stable_sort(oq.begin(), oq.end(), [&](Index a, Index b) { return psi[a] > psi[b]; });
  Scalar s = 0;
  for (std::size_t k = 0; k < op.size(); ++k) s += phi[op[k]] * psi[oq[k]];
  return phi.space().mass(0) * s;
}

}  // namespace

bool pairing_value_invariance(const DiscreteFunction& phi0,
                              const DiscreteFunction& psi0, CounterRng* rng,
                              int random_witnesses) {
  require_equal_mass_common(phi0, psi0);
  const Scalar canonical = sup_pairing(phi0, psi0).value;

  if (phi0.cells() <= 8) {
    // Common relabelings of the cells do not move the integral, so it is
    // enough to rearrange one side against the fixed other side.
    Vector vals = phi0.values();
    std::vector<Index> perm(static_cast<std::size_t>(phi0.cells()));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::sort(perm.begin(), perm.end(), [&](Index a, Index b) { return vals[a] < vals[b]; });
    do {
      DiscreteFunction phi = apply_witness(phi0, perm);
      if (!similarly_ordered(phi, psi0)) continue;
      if (plain_pairing(phi, psi0) != canonical) return false;
    } while (std::next_permutation(perm.begin(), perm.end(), [&](Index a, Index b) {
      return vals[a] < vals[b];
    }));
    return true;
  }

  CounterRng fallback(0, 0);
  CounterRng& r = rng ? *rng : fallback;
  for (int k = 0; k < random_witnesses; ++k)
    if (randomized_sorted_pairing(phi0, psi0, r) != canonical) return false;
  return true;
}

std::pair<Scalar, Scalar> chebyshev_lower(const OrderedPair& pair) {
  const Scalar lhs = integrate(pair.phi().with_values(
      pair.phi().values().cwiseProduct(pair.psi().values())));
  const Scalar rhs = average(pair.phi()) * integrate(pair.psi());
  return {lhs, rhs};
}

InequalityReport abs_sup_bound_check(const DiscreteFunction& phi0,
                                     const DiscreteFunction& psi, Scalar tol) {
  require_equal_mass_common(phi0, psi);
  const DiscreteFunction abs_phi0 = phi0.with_values(phi0.values().cwiseAbs());
  const Scalar lhs = sup_pairing(abs_phi0, psi).value;
  const Scalar rhs = sup_pairing(phi0, psi).value +
                     sup_pairing(phi0.with_values(-phi0.values()), psi).value +
                     average(abs_phi0) * integrate(psi);
  return {lhs, rhs, lhs <= rhs + tol, tol};
}

InequalityReport product_abs_bound_check(const DiscreteFunction& f0,
                                         const DiscreteFunction& xi, Scalar tol) {
  require_equal_mass_common(f0, xi);
  const DiscreteFunction abs_f0 = f0.with_values(f0.values().cwiseAbs());
  const DiscreteFunction abs_xi = xi.with_values(xi.values().cwiseAbs());
  const Scalar lhs = sup_pairing(abs_f0, abs_xi).value;
  const Scalar sup_signed =
      std::max(sup_pairing(f0, xi).value,
               sup_pairing(f0.with_values(-f0.values()), xi).value);
  const Scalar rhs = 4 * sup_signed + 3 * average(abs_f0) * integrate(abs_xi);
  return {lhs, rhs, lhs <= rhs + tol, tol};
}

DiscreteFunction conv1_average_on(const DiscreteFunction& f, const CellSet& E) {
  const Scalar avg = average(f, E);
  Vector v = f.values();
  for (Index i : E) v[i] = avg;
  return f.with_values(std::move(v));
}

DiscreteFunction conv1_two_block(const DiscreteFunction& f, const CellSet& S,
                                 const CellSet& T) {
  validate_cell_set(f.space(), S);
  validate_cell_set(f.space(), T);
  const Scalar mS = mass_of(f.space(), S);
  const Scalar mT = mass_of(f.space(), T);
  if (std::abs(mS - mT) > 1e-12 * f.space().total_mass())
    throw std::invalid_argument("mass(S) must equal mass(T)");
  CellSet complement;
  {
    std::vector<bool> in_s(static_cast<std::size_t>(f.cells()), false);
    for (Index i : S) in_s[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < f.cells(); ++i)
      if (!in_s[static_cast<std::size_t>(i)]) complement.push_back(i);
  }
  const Scalar on_t = average(f, S);
  const Scalar off_t = average(f, complement);
  std::vector<bool> in_t(static_cast<std::size_t>(f.cells()), false);
  for (Index i : T) in_t[static_cast<std::size_t>(i)] = true;
  Vector v(f.cells());
  for (Index i = 0; i < f.cells(); ++i)
    v[i] = in_t[static_cast<std::size_t>(i)] ? on_t : off_t;
  return f.with_values(std::move(v));
}

PairingBound pairing_lower_bound(const DiscreteFunction& f,
                                 const DiscreteFunction& xi, const CellSet& S,
                                 const CellSet& T) {
  require_equal_mass_common(f, xi);
  validate_cell_set(f.space(), S);
  validate_cell_set(f.space(), T);
  if (S.size() != T.size())
    throw std::invalid_argument("mass(S) must equal mass(T)");
  {
    std::vector<bool> in_t(static_cast<std::size_t>(xi.cells()), false);
    for (Index i : T) in_t[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < xi.cells(); ++i) {
      if (in_t[static_cast<std::size_t>(i)] ? (xi[i] < 0) : (xi[i] > 0))
        throw std::invalid_argument("xi must be >= 0 on T and <= 0 off T");
    }
  }
  CellSet complement;
  {
    std::vector<bool> in_s(static_cast<std::size_t>(f.cells()), false);
    for (Index i : S) in_s[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < f.cells(); ++i)
      if (!in_s[static_cast<std::size_t>(i)]) complement.push_back(i);
  }
  const Scalar bound = average(f, S) * integrate(positive_part(xi)) -
                       average(f, complement) * integrate(negative_part(xi));
  return {bound, sup_pairing(f, xi).value};
}

TransportPlan katok_transport(const DiscreteFunction& xi,
                              const DiscreteFunction& eta, Scalar epsilon) {
  require_equal_mass_common(xi, eta);
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!equidistributed(xi, eta))
    throw std::invalid_argument("inputs are not equidistributed");

  const Scalar total = xi.space().total_mass();
  const Scalar pitch = epsilon / (2 * total);  // interval length < epsilon/total
  const Scalar lo = std::min(xi.values().minCoeff(), eta.values().minCoeff());

  // bucket cells by value interval
  std::map<long long, std::pair<CellSet, CellSet>> buckets;
  auto bucket_of = [&](Scalar v) {
    return static_cast<long long>(std::floor((v - lo) / pitch));
  };
  for (Index i = 0; i < xi.cells(); ++i) buckets[bucket_of(xi[i])].first.push_back(i);
  for (Index i = 0; i < eta.cells(); ++i) buckets[bucket_of(eta[i])].second.push_back(i);

  TransportPlan plan;
  plan.epsilon = epsilon;
  plan.permutation.assign(static_cast<std::size_t>(xi.cells()), -1);
  for (auto& [b, pair] : buckets) {
    auto& [sources, targets] = pair;
    if (sources.size() != targets.size())
      throw std::invalid_argument("inputs are not equidistributed");  // cannot happen after the check
    plan.intervals.push_back({lo + static_cast<Scalar>(b) * pitch,
                              lo + static_cast<Scalar>(b + 1) * pitch});
    // match within the interval by value order
    auto by_value = [](const DiscreteFunction& f) {
      return [&f](Index a, Index b2) { return f[a] < f[b2] || (f[a] == f[b2] && a < b2); };
    };
    CellSet src_sorted = sources, tgt_sorted = targets;
    std::sort(src_sorted.begin(), src_sorted.end(), by_value(xi));
    std::sort(tgt_sorted.begin(), tgt_sorted.end(), by_value(eta));
    for (std::size_t k = 0; k < src_sorted.size(); ++k)
      plan.permutation[static_cast<std::size_t>(src_sorted[k])] = tgt_sorted[k];
    plan.source_sets.push_back(std::move(sources));
    plan.target_sets.push_back(std::move(targets));
  }
  return plan;
}

Scalar transport_error(const DiscreteFunction& xi, const DiscreteFunction& eta,
                       const TransportPlan& plan) {
  if (plan.permutation.size() != static_cast<std::size_t>(xi.cells()))
    throw std::invalid_argument("plan does not match the space");
  Scalar err = 0;
  for (Index i = 0; i < xi.cells(); ++i)
    err += std::abs(xi[i] - eta[plan.permutation[static_cast<std::size_t>(i)]]) *
           xi.space().mass(i);
  return err;
}

}  // namespace rif
