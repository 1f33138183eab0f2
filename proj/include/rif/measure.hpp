#pragma once

#include <memory>
#include <string>

#include "rif/types.hpp"

namespace rif {

// Finite measure space: a list of positive cell masses.
class MeasureSpace {
 public:
  explicit MeasureSpace(Vector masses);

  static std::shared_ptr<const MeasureSpace> make(Vector masses);
  // cells of identical mass
  static std::shared_ptr<const MeasureSpace> uniform(Index cells,
                                                     Scalar cell_mass = 1.0);

  Index cells() const { return masses_.size(); }
  Scalar mass(Index i) const { return masses_[i]; }
  const Vector& masses() const { return masses_; }
  Scalar total_mass() const { return total_; }
  // true iff all stored masses are bitwise-identical
  bool equal_mass() const { return equal_mass_; }

 private:
  Vector masses_;
  Scalar total_ = 0;
  bool equal_mass_ = true;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

// One real value per cell of a measure space.
class DiscreteFunction {
 public:
  DiscreteFunction(SpacePtr space, Vector values);

  const MeasureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  Index cells() const { return values_.size(); }
  Scalar operator[](Index i) const { return values_[i]; }
  const Vector& values() const { return values_; }

  DiscreteFunction with_values(Vector v) const;

 private:
  SpacePtr space_;
  Vector values_;
};

// Same space object, or cell-by-cell identical masses.
bool same_space(const DiscreteFunction& f, const DiscreteFunction& g);

enum class Relation { Greater, GreaterEq, Less, LessEq, Equal };

Scalar mass_of(const MeasureSpace& space, const CellSet& subset);
void validate_cell_set(const MeasureSpace& space, const CellSet& subset);

Scalar integrate(const DiscreteFunction& f);
Scalar integrate(const DiscreteFunction& f, const CellSet& subset);
// Average over a subset; zero-mass subsets average to 0.
Scalar average(const DiscreteFunction& f);
Scalar average(const DiscreteFunction& f, const CellSet& subset);

// Total mass of cells whose value satisfies the relation against t.
Scalar distribution_mass(const DiscreteFunction& f, Scalar t, Relation rel);

// True iff both functions put identical mass on every value. Values are
// compared exactly; masses within mass_tol (0 = exact).
bool equidistributed(const DiscreteFunction& f, const DiscreteFunction& g,
                     Scalar mass_tol = 0.0);

// Decreasing left-continuous step profile on (0, total_mass], equidistributed
// with the generating function.
struct DistributionProfile {
  Vector values;           // strictly decreasing
  Vector cumulative_mass;  // strictly increasing, ends at total mass

  Index breakpoints() const { return values.size(); }
  Scalar total_mass() const { return cumulative_mass[cumulative_mass.size() - 1]; }
  Scalar value_at(Scalar s) const;
};

DistributionProfile decreasing_rearrangement(const DiscreteFunction& f);

// Per-cell parameter theta = mu(zeta < zeta(cell)). Pushes the cell masses
// forward to the uniform measure on [0, total_mass]. Requires injective
// values; ties are rejected.
DiscreteFunction sublevel_parameterization(const DiscreteFunction& zeta);

DiscreteFunction positive_part(const DiscreteFunction& f);
DiscreteFunction negative_part(const DiscreteFunction& f);

}  // namespace rif
