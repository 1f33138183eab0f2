#pragma once

#include <vector>

#include "rif/flow.hpp"
#include "rif/grid.hpp"
#include "rif/quadratic.hpp"

namespace rif {

struct CriticalPoint {
  Vector location;
  QuadraticForm hessian;  // quadratic Taylor coefficients at the point
  Scalar det_q = 0;
  Scalar t_q = 0;
  bool nondegenerate = false;
};

// Locates gradient zeros by scanning cells for sign changes and refining by
// Newton iteration on the interpolated gradient. The quadratic Taylor
// coefficients come from wide-stencil second differences. Zeros whose
// coefficient determinant stays below det_threshold (flat regions, continua
// of degenerate points) are dropped; the points reported must be separated
// by at least three grid cells. On compactly supported boxes the two cell
// layers next to each face are excluded from the scan.
std::vector<CriticalPoint> find_critical_points(const GridField& xi,
                                                Scalar det_threshold);

// Sum of cutoff_phi(det) * t over the critical points above the threshold.
Scalar p_functional(const GridField& xi, Scalar det_threshold = 0.5);

// Volume-preserving block scaling (x_nu, y_nu) -> (e^{c_nu} x_nu,
// e^{c_nu} y_nu); the exponents must sum to zero and n must be at least 2.
Diffeomorphism counterexample_map(const Vector& c);

}  // namespace rif
