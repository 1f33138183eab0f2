#include "rif/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rif {

MeasureSpace::MeasureSpace(Vector masses) : masses_(std::move(masses)) {
  if (masses_.size() == 0) throw std::invalid_argument("measure space needs at least one cell");
  for (Index i = 0; i < masses_.size(); ++i) {
    if (!(masses_[i] > 0) || !std::isfinite(masses_[i]))
      throw std::invalid_argument("cell mass must be positive and finite");
    if (masses_[i] != masses_[0]) equal_mass_ = false;
  }
  total_ = masses_.sum();
  if (!std::isfinite(total_)) throw std::invalid_argument("total mass must be finite");
}

std::shared_ptr<const MeasureSpace> MeasureSpace::make(Vector masses) {
  return std::make_shared<const MeasureSpace>(std::move(masses));
}

std::shared_ptr<const MeasureSpace> MeasureSpace::uniform(Index cells, Scalar cell_mass) {
  return make(Vector::Constant(cells, cell_mass));
}

DiscreteFunction::DiscreteFunction(SpacePtr space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw std::invalid_argument("null measure space");
  if (values_.size() != space_->cells())
    throw std::invalid_argument("value count does not match cell count");
}

DiscreteFunction DiscreteFunction::with_values(Vector v) const {
  return DiscreteFunction(space_, std::move(v));
}

bool same_space(const DiscreteFunction& f, const DiscreteFunction& g) {
  if (f.space_ptr() == g.space_ptr()) return true;
  return f.space().cells() == g.space().cells() &&
         f.space().masses() == g.space().masses();
}

void validate_cell_set(const MeasureSpace& space, const CellSet& subset) {
  Index prev = -1;
  for (Index i : subset) {
    if (i < 0 || i >= space.cells()) throw std::out_of_range("cell index out of range");
    if (i <= prev) throw std::invalid_argument("cell set must be sorted and duplicate-free");
    prev = i;
  }
}

Scalar mass_of(const MeasureSpace& space, const CellSet& subset) {
  validate_cell_set(space, subset);
  Scalar m = 0;
  for (Index i : subset) m += space.mass(i);
  return m;
}

Scalar integrate(const DiscreteFunction& f) {
  return f.values().dot(f.space().masses());
}

Scalar integrate(const DiscreteFunction& f, const CellSet& subset) {
  validate_cell_set(f.space(), subset);
  Scalar s = 0;
  for (Index i : subset) s += f[i] * f.space().mass(i);
  return s;
}

Scalar average(const DiscreteFunction& f) {
  return integrate(f) / f.space().total_mass();
}

Scalar average(const DiscreteFunction& f, const CellSet& subset) {
  const Scalar m = mass_of(f.space(), subset);
  if (m == 0) return 0;
  return integrate(f, subset) / m;
}

Scalar distribution_mass(const DiscreteFunction& f, Scalar t, Relation rel) {
  Scalar m = 0;
  for (Index i = 0; i < f.cells(); ++i) {
    const Scalar v = f[i];
    bool in = false;
    switch (rel) {
      case Relation::Greater: in = v > t; break;
      case Relation::GreaterEq: in = v >= t; break;
      case Relation::Less: in = v < t; break;
      case Relation::LessEq: in = v <= t; break;
      case Relation::Equal: in = v == t; break;
    }
    if (in) m += f.space().mass(i);
  }
  return m;
}

namespace {

// (value, mass) pairs with exactly equal values merged, values descending.
std::vector<std::pair<Scalar, Scalar>> level_masses(const DiscreteFunction& f) {
  std::vector<std::pair<Scalar, Scalar>> lv(static_cast<std::size_t>(f.cells()));
  for (Index i = 0; i < f.cells(); ++i) lv[static_cast<std::size_t>(i)] = {f[i], f.space().mass(i)};
  std::sort(lv.begin(), lv.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::pair<Scalar, Scalar>> merged;
  for (const auto& [v, m] : lv) {
    if (!merged.empty() && merged.back().first == v)
      merged.back().second += m;
    else
      merged.push_back({v, m});
  }
  return merged;
}

}  // namespace

bool equidistributed(const DiscreteFunction& f, const DiscreteFunction& g, Scalar mass_tol) {
  const auto lf = level_masses(f);
  const auto lg = level_masses(g);
  if (lf.size() != lg.size()) return false;
  for (std::size_t k = 0; k < lf.size(); ++k) {
    if (lf[k].first != lg[k].first) return false;
    if (std::abs(lf[k].second - lg[k].second) > mass_tol) return false;
  }
  return true;
}

Scalar DistributionProfile::value_at(Scalar s) const {
  if (s <= 0 || s > total_mass()) throw std::out_of_range("profile argument outside (0, total]");
  // left continuous: value on (cum_{k-1}, cum_k] is values[k]
  for (Index k = 0; k < breakpoints(); ++k)
    if (s <= cumulative_mass[k]) return values[k];
  return values[breakpoints() - 1];
}

DistributionProfile decreasing_rearrangement(const DiscreteFunction& f) {
  const auto lv = level_masses(f);
  DistributionProfile p;
  p.values.resize(static_cast<Index>(lv.size()));
  p.cumulative_mass.resize(static_cast<Index>(lv.size()));
  Scalar cum = 0;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    cum += lv[k].second;
    p.values[static_cast<Index>(k)] = lv[k].first;
    p.cumulative_mass[static_cast<Index>(k)] = cum;
  }
  return p;
}

DiscreteFunction sublevel_parameterization(const DiscreteFunction& zeta) {
  std::vector<Index> order(static_cast<std::size_t>(zeta.cells()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return zeta[a] < zeta[b]; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (zeta[order[k]] == zeta[order[k - 1]])
      throw std::invalid_argument("sublevel parameterization needs injective values");
  Vector theta(zeta.cells());
  Scalar below = 0;
  for (Index k = 0; k < zeta.cells(); ++k) {
    const Index cell = order[static_cast<std::size_t>(k)];
    theta[cell] = below;  // mass strictly below this value
    below += zeta.space().mass(cell);
  }
  return zeta.with_values(std::move(theta));
}

DiscreteFunction positive_part(const DiscreteFunction& f) {
  return f.with_values(f.values().cwiseMax(0.0));
}

DiscreteFunction negative_part(const DiscreteFunction& f) {
  return f.with_values((-f.values()).cwiseMax(0.0));
}

}  // namespace rif
