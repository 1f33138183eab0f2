#pragma once

// Brute-force oracles for the test suites. These stay independent of the
// library's sorted-pairing implementation: everything here enumerates.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "rif/measure.hpp"

namespace oracle {

using rif::DiscreteFunction;
using rif::Index;
using rif::Scalar;
using rif::Vector;

// every value rearrangement of phi0, paired against fixed psi
inline Scalar max_pairing(const DiscreteFunction& phi0, const DiscreteFunction& psi) {
  std::vector<Index> perm(static_cast<std::size_t>(phi0.cells()));
  std::iota(perm.begin(), perm.end(), Index{0});
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  do {
    Scalar s = 0;
    for (Index i = 0; i < phi0.cells(); ++i)
      s += phi0[perm[static_cast<std::size_t>(i)]] * psi[i] * psi.space().mass(i);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Scalar max_abs_pairing(const DiscreteFunction& phi0, const DiscreteFunction& psi) {
  return max_pairing(phi0.with_values(phi0.values().cwiseAbs()), psi);
}

// max over subsets of exactly k cells of the subset average (equal masses)
inline Scalar best_subset_average(const DiscreteFunction& f, Index k) {
  const Index cells = f.cells();
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Index mask = 0; mask < (Index{1} << cells); ++mask) {
    Index count = 0;
    Scalar sum = 0;
    for (Index i = 0; i < cells; ++i)
      if (mask & (Index{1} << i)) {
        ++count;
        sum += f[i];
      }
    if (count == k) best = std::max(best, sum / static_cast<Scalar>(k));
  }
  return best;
}

}  // namespace oracle
