#pragma once

#include <cstdint>
#include <vector>

#include "rif/rearrange.hpp"

namespace rif {

// One affine pair (offset, density) of a support family.
struct SupportPair {
  Scalar offset;             // a
  DiscreteFunction density;  // f
};

// Finite family of affine pairs inducing the convex functional
//   p(xi) = max over pairs of (a + pairing of f against xi).
class SupportFamily {
 public:
  explicit SupportFamily(std::vector<SupportPair> pairs,
                         bool rearrangement_closed = true);

  const std::vector<SupportPair>& pairs() const { return pairs_; }
  const MeasureSpace& space() const { return pairs_.front().density.space(); }
  const SpacePtr& space_ptr() const { return pairs_.front().density.space_ptr(); }
  // evaluation treats each density as a representative of its full
  // rearrangement class
  bool rearrangement_closed() const { return rearrangement_closed_; }
  bool homogeneous() const;  // all offsets zero

 private:
  std::vector<SupportPair> pairs_;
  bool rearrangement_closed_;
};

enum class EvalMode { Fixed, OverRearrangements };

Scalar evaluate(const SupportFamily& family, const DiscreteFunction& xi,
                EvalMode mode);

// Running extremal averages: upper(alpha) averages the top alpha mass of f,
// lower(alpha) the bottom alpha mass. Evaluated on the breakpoint grid of
// the sorted function plus midpoints. The separation constant c and the size
// constant m are extremal values of upper(a) - lower(total - a) and
// |upper(a)| + |lower(total - a)| over that grid.
struct AlphaCurves {
  Vector alphas;
  Vector upper;  // s_alpha
  Vector lower;  // i_alpha
  Scalar c = 0;
  Scalar m = 0;
};

Scalar top_average(const DiscreteFunction& f, Scalar alpha);
Scalar bottom_average(const DiscreteFunction& f, Scalar alpha);
AlphaCurves alpha_curves(const DiscreteFunction& f);

enum class L1Branch { ZeroMean, NonnegativeMean, NonpositiveMean };

struct L1BoundReport {
  L1Branch branch = L1Branch::ZeroMean;
  Scalar a0 = 0;
  Scalar b = 0;
  Scalar bound = 0;    // a0 + b * integral |xi| on the normalized space
  Scalar q_value = 0;  // rearrangement-closed evaluation at xi
  bool holds = false;
  Scalar tolerance = 0;
  Scalar c = 0, m = 0, s1 = 0;  // constants of the pair the bound used
};

// Lower L1 bound for the family functional. The space is rescaled to total
// mass one internally (densities scaled to keep the functional unchanged).
// Requires a pair with nonconstant density; the sign of the mean of xi picks
// the branch, and the mean branches additionally require a density of the
// matching mean sign (a convex blend of family pairs is synthesized when no
// single pair qualifies).
L1BoundReport l1_lower_bound(const SupportFamily& family,
                             const DiscreteFunction& xi, Scalar tol = 1e-9);

// max over pairs of integral |f|.
Scalar family_l1_norm_bound(const SupportFamily& family);

// For a nonnegative test xi supported on at most half the mass: every
// integral of f+ is bounded by 2 * evaluate(family, xi) / integral(xi),
// whenever {f >= 0} carries at least half the mass.
bool family_l1_proof_check(const SupportFamily& family,
                           const DiscreteFunction& xi, Scalar tol = 1e-9);

// Minkowski functional of the sublevel set {p < c}: the infimum of lambda
// with p(xi / lambda) < c, located by bisection to the given relative
// tolerance. Requires c > p(0).
Scalar minkowski_functional(const SupportFamily& family, Scalar c,
                            const DiscreteFunction& xi,
                            EvalMode mode = EvalMode::OverRearrangements,
                            Scalar rel_tol = 1e-10);

// Rearrangement-invariant lattice functional
//   q(zeta) = max over pairs of sup-pairing of |f| against |zeta|.
// Offsets are ignored.
Scalar ri_norm(const SupportFamily& family, const DiscreteFunction& zeta);

struct AxiomReport {
  int trials = 0;
  std::uint64_t seed = 0;
  bool homogeneity = false;
  bool triangle = false;
  bool monotonicity = false;
  bool faithfulness = false;
  bool fatou = false;
  bool l1_embedding = false;
  bool equivalence = false;
  Scalar b_embedding = 0;        // constant in q >= b * integral|zeta|
  Scalar equivalence_factor = 0; // q <= factor * max(p(zeta), p(-zeta))
  Scalar max_violation = 0;
  bool holds() const {
    return homogeneity && triangle && monotonicity && faithfulness && fatou &&
           l1_embedding && equivalence;
  }
};

// Seeded verification of the lattice-norm axioms of ri_norm together with
// its two-sided equivalence with the family functional.
AxiomReport ri_norm_axiom_report(const SupportFamily& family, int trials,
                                 std::uint64_t seed, Scalar tol = 1e-9);

struct LipschitzReport {
  Scalar max_ratio = 0;
  Scalar bound = 0;  // 2 * max |p| over the sampled points
  int trials = 0;
  bool holds = false;
};

// Samples pairs with sup norm <= radius and compares difference quotients of
// the family functional against twice the largest sampled |p|.
LipschitzReport lipschitz_report(const SupportFamily& family, Scalar radius,
                                 int trials, std::uint64_t seed,
                                 Scalar tol = 1e-9);

}  // namespace rif
