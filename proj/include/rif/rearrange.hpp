#pragma once

#include <utility>
#include <vector>

#include "rif/measure.hpp"
#include "rif/rng.hpp"

namespace rif {

// Mass-preserving cell permutation together with the level-set bookkeeping
// that produced it: value intervals J_i, their source cells K_i and target
// cells L_i.
struct TransportPlan {
  std::vector<Index> permutation;                    // cell -> cell, bijective
  std::vector<std::pair<Scalar, Scalar>> intervals;  // half-open [lo, hi)
  std::vector<CellSet> source_sets;
  std::vector<CellSet> target_sets;
  Scalar epsilon = 0;
};

bool similarly_ordered(const DiscreteFunction& phi, const DiscreteFunction& psi);

// A similarly ordered pair on a common equal-mass space.
class OrderedPair {
 public:
  OrderedPair(DiscreteFunction phi, DiscreteFunction psi);
  const DiscreteFunction& phi() const { return phi_; }
  const DiscreteFunction& psi() const { return psi_; }

 private:
  DiscreteFunction phi_;
  DiscreteFunction psi_;
};

// Refine all inputs (which must share one space with commensurable masses)
// onto a single space of equal-mass cells. Each output is equidistributed
// with its input.
std::vector<DiscreteFunction> split_to_equal_mass(
    const std::vector<DiscreteFunction>& fs, Index max_cells);

struct PairingResult {
  Scalar value;
  // witness[i] is the source cell of phi0 placed at cell i; the rearranged
  // function realizing the supremum is phi0[witness[i]] at cell i.
  std::vector<Index> witness;
};

// max over rearrangements phi ~ phi0 of the pairing integral against psi,
// attained by sorting both descending. Equal-mass common space required.
PairingResult sup_pairing(const DiscreteFunction& phi0, const DiscreteFunction& psi);

DiscreteFunction apply_witness(const DiscreteFunction& phi0,
                               const std::vector<Index>& witness);

// True iff the pairing integral agrees across all similarly ordered
// equidistributed pairs. Exhaustive on spaces of at most 8 cells, otherwise
// compared against randomized similarly ordered witnesses.
bool pairing_value_invariance(const DiscreteFunction& phi0,
                              const DiscreteFunction& psi0,
                              CounterRng* rng = nullptr,
                              int random_witnesses = 64);

struct InequalityReport {
  Scalar lhs = 0;
  Scalar rhs = 0;
  bool holds = false;
  Scalar tolerance = 0;
};

// lhs = pairing integral, rhs = (mean phi) * (integral psi).
std::pair<Scalar, Scalar> chebyshev_lower(const OrderedPair& pair);

// sup over phi ~ phi0 of the pairing of |phi| against psi, versus the
// three-term majorant built from signed pairing suprema and the mean of
// |phi0|.
InequalityReport abs_sup_bound_check(const DiscreteFunction& phi0,
                                     const DiscreteFunction& psi,
                                     Scalar tol = 1e-9);

// sup over f ~ f0 of the integral of |f xi|, versus
// 4 sup |pairing(f, xi)| + 3 mean|f0| * integral|xi|.
InequalityReport product_abs_bound_check(const DiscreteFunction& f0,
                                         const DiscreteFunction& xi,
                                         Scalar tol = 1e-9);

// Replace f by its average on E, keep it elsewhere. Integral is preserved.
DiscreteFunction conv1_average_on(const DiscreteFunction& f, const CellSet& E);

// Two-block function: average of f over S on T, average over the complement
// of S off T. Requires mass(S) == mass(T).
DiscreteFunction conv1_two_block(const DiscreteFunction& f, const CellSet& S,
                                 const CellSet& T);

struct PairingBound {
  Scalar bound;
  Scalar sup;
};

// Lower bound (avg_S f) * integral(xi+) - (avg_{X\S} f) * integral(xi-)
// for the pairing supremum, valid when xi >= 0 on T and <= 0 off T with
// mass(S) == mass(T).
PairingBound pairing_lower_bound(const DiscreteFunction& f,
                                 const DiscreteFunction& xi, const CellSet& S,
                                 const CellSet& T);

// Constructive level-set transport between equidistributed functions on a
// common equal-mass space: quantizes the value range into intervals shorter
// than epsilon / total_mass, matches the interval preimages by a permutation.
// The realized L1 error is below 3 * epsilon, and is exactly 0 whenever the
// quantization separates all values.
TransportPlan katok_transport(const DiscreteFunction& xi,
                              const DiscreteFunction& eta, Scalar epsilon);

Scalar transport_error(const DiscreteFunction& xi, const DiscreteFunction& eta,
                       const TransportPlan& plan);

}  // namespace rif
