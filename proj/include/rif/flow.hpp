#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "rif/grid.hpp"
#include "rif/quadratic.hpp"

namespace rif {

// Invertible point mapping. Linear maps keep their matrix so compositions
// and inverses stay exact.
class Diffeomorphism {
 public:
  using PointMap = std::function<Vector(const Vector&)>;

  static Diffeomorphism identity(int dims);
  static Diffeomorphism linear(Matrix m);
  static Diffeomorphism translation(Vector displacement);
  static Diffeomorphism from_maps(int dims, PointMap forward, PointMap inverse);

  Vector apply(const Vector& z) const;
  Vector apply_inverse(const Vector& z) const;
  int dims() const { return dims_; }
  bool is_linear() const { return linear_; }
  const Matrix& matrix() const;

 private:
  Diffeomorphism() = default;
  int dims_ = 0;
  bool linear_ = false;
  Matrix forward_matrix_, inverse_matrix_;
  PointMap forward_, inverse_;
};

// outer after inner: z -> outer(inner(z))
Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner);

// Symplectic gradient of a grid Hamiltonian by central differences:
// component k < n is +dh/dy_k, component n+k is -dh/dx_k.
std::vector<GridField> sgrad(const GridField& h);
// Linear field matrix 2 J A of a quadratic Hamiltonian.
Matrix linear_hamiltonian_field(const QuadraticForm& h);

struct FlowSpec {
  std::variant<std::monostate, QuadraticForm, GridField> hamiltonian;
  Scalar duration = 0;
  int steps = 1;
  enum class Method { ExactLinear, Leapfrog };
  Method method = Method::ExactLinear;
};

// Time-`duration` Hamiltonian flow. ExactLinear exponentiates the linear
// field of a quadratic Hamiltonian. Leapfrog integrates a separable grid
// Hamiltonian h(x, y) = V(x) + T(y) with the volume-preserving
// kick-drift-kick splitting; mixed second derivatives are validated.
Diffeomorphism flow(const FlowSpec& spec);

// Samples xi o g^{-1} at the grid nodes via interpolation. On a compactly
// supported box, points leaving the box require the field to vanish near
// the boundary.
GridField pullback(const Diffeomorphism& g, const GridField& xi);

struct VolumeReport {
  Scalar max_jacobian_deviation = 0;
  int samples = 0;
};

// Finite-difference Jacobian determinant of g at random interior points.
VolumeReport volume_check(const Diffeomorphism& g, const DarbouxBox& box,
                          int samples, std::uint64_t seed = 0);

// Hamiltonian flow of a cutoff coordinate function on the chart: translation
// of the conjugate coordinate. Axis < n flows the x_axis Hamiltonian, axis
// >= n flows the negated y coordinate.
Diffeomorphism coordinate_flow(int n, int axis, Scalar tau);

// Averages the pushforwards of h under the composed coordinate flows g^t
// against the rescaled kernel: a compactly supported mollifier of width
// 1/lambda built from Hamiltonian translations. The per-axis kernel is the
// normalized bump (1-t^2)^3 on [-1,1].
struct RegularizerSpec {
  Scalar lambda = 8;
  int quad_points = 8;  // Gauss-Legendre nodes per axis
};

GridField regularize(const RegularizerSpec& spec, const GridField& h);

}  // namespace rif
