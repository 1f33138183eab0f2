#pragma once

#include <functional>

#include "rif/types.hpp"

namespace rif {

// Axis-aligned chart carrying the standard symplectic structure: axes
// 0..n-1 are the x coordinates, axes n..2n-1 the conjugate y coordinates.
struct DarbouxBox {
  enum class Boundary { Periodic, CompactSupport };

  int n = 1;
  Vector lo, hi;    // 2n entries
  IndexVector res;  // nodes per axis, each >= 4
  Boundary boundary = Boundary::CompactSupport;

  int dims() const { return 2 * n; }
  Index node_count() const;
  Scalar extent(int axis) const { return hi[axis] - lo[axis]; }
  // periodic axes exclude the right endpoint
  Scalar spacing(int axis) const;
  Scalar coord(int axis, Index k) const { return lo[axis] + spacing(axis) * k; }
  Scalar cell_volume() const;
  bool contains(const Vector& z) const;
  void validate() const;

  Index flat_index(const IndexVector& multi) const;
  IndexVector multi_index(Index flat) const;
  Vector node_point(Index flat) const;
};

// Scalar samples over the nodes of a box, with tensor cubic interpolation
// (Catmull-Rom per axis; periodic wrap or zero extension at the boundary).
class GridField {
 public:
  GridField(DarbouxBox box, Vector samples);

  static GridField sample(const DarbouxBox& box,
                          const std::function<Scalar(const Vector&)>& f);

  const DarbouxBox& box() const { return box_; }
  const Vector& samples() const { return samples_; }
  Scalar sample(Index flat) const { return samples_[flat]; }
  GridField with_samples(Vector s) const;

  Scalar interpolate(const Vector& z) const;
  Scalar integral() const;  // node sum times cell volume
  Scalar max_abs() const;
  // largest |sample| within `layers` nodes of a non-periodic face
  Scalar boundary_band_max(int layers) const;
  // conservative interpolation error bound from third differences
  Scalar interpolation_tolerance() const;

 private:
  DarbouxBox box_;
  Vector samples_;
};

// Per-axis cubic interpolation stencil at a point: four node indices and
// weights per axis, index -1 marking the zero extension outside a compact
// box.
struct TensorStencil {
  int dims = 0;
  Scalar weights[8][4];
  Index index[8][4];
};

TensorStencil make_stencil(const DarbouxBox& box, const Vector& z);

// Central-difference derivative along one axis, sampled on the same grid.
GridField derivative_grid(const GridField& f, int axis);
std::vector<GridField> gradient_grids(const GridField& f);

namespace detail {
// Deterministic data-parallel loop over [0, count) in contiguous chunks.
void parallel_for(Index count, const std::function<void(Index, Index)>& chunk);
}  // namespace detail

}  // namespace rif
