#include "rif/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rif {

Index DarbouxBox::node_count() const {
  Index count = 1;
  for (int a = 0; a < dims(); ++a) count *= res[a];
  return count;
}

Scalar DarbouxBox::spacing(int axis) const {
  const Index denom = boundary == Boundary::Periodic ? res[axis] : res[axis] - 1;
  return extent(axis) / static_cast<Scalar>(denom);
}

Scalar DarbouxBox::cell_volume() const {
  Scalar v = 1;
  for (int a = 0; a < dims(); ++a) v *= spacing(a);
  return v;
}

bool DarbouxBox::contains(const Vector& z) const {
  for (int a = 0; a < dims(); ++a)
    if (z[a] < lo[a] || z[a] > hi[a]) return false;
  return true;
}

void DarbouxBox::validate() const {
  if (n < 1) throw std::invalid_argument("half-dimension must be at least 1");
  if (lo.size() != dims() || hi.size() != dims() || res.size() != dims())
    throw std::invalid_argument("box arrays must have 2n entries");
  for (int a = 0; a < dims(); ++a) {
    if (!(hi[a] > lo[a])) throw std::invalid_argument("box extent must be positive");
    if (res[a] < 4) throw std::invalid_argument("grid needs at least 4 nodes per axis");
  }
}

Index DarbouxBox::flat_index(const IndexVector& multi) const {
  Index flat = 0;
  for (int a = 0; a < dims(); ++a) flat = flat * res[a] + multi[a];
  return flat;
}

IndexVector DarbouxBox::multi_index(Index flat) const {
  IndexVector multi(dims());
  for (int a = dims() - 1; a >= 0; --a) {
    multi[a] = static_cast<int>(flat % res[a]);
    flat /= res[a];
  }
  return multi;
}

Vector DarbouxBox::node_point(Index flat) const {
  const IndexVector multi = multi_index(flat);
  Vector z(dims());
  for (int a = 0; a < dims(); ++a) z[a] = coord(a, multi[a]);
  return z;
}

GridField::GridField(DarbouxBox box, Vector samples)
    : box_(std::move(box)), samples_(std::move(samples)) {
  box_.validate();
  if (box_.dims() > 8) throw std::invalid_argument("at most 8 axes supported");
  if (samples_.size() != box_.node_count())
    throw std::invalid_argument("sample count does not match the grid");
}

GridField GridField::sample(const DarbouxBox& box,
                            const std::function<Scalar(const Vector&)>& f) {
  box.validate();
  Vector s(box.node_count());
  detail::parallel_for(box.node_count(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) s[i] = f(box.node_point(i));
  });
  return GridField(box, std::move(s));
}

GridField GridField::with_samples(Vector s) const { return GridField(box_, std::move(s)); }

namespace {

inline void catmull_rom_weights(Scalar t, Scalar w[4]) {
  const Scalar t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline Index wrap(Index k, Index n) {
  k %= n;
  return k < 0 ? k + n : k;
}

}  // namespace

TensorStencil make_stencil(const DarbouxBox& box, const Vector& z) {
  TensorStencil s;
  s.dims = box.dims();
  for (int a = 0; a < s.dims; ++a) {
    const Scalar u = (z[a] - box.lo[a]) / box.spacing(a);
    const Scalar fl = std::floor(u);
    catmull_rom_weights(u - fl, s.weights[a]);
    const Index b = static_cast<Index>(fl);
    for (int k = 0; k < 4; ++k) {
      Index idx = b - 1 + k;
      if (box.boundary == DarbouxBox::Boundary::Periodic) {
        idx = wrap(idx, box.res[a]);
      } else if (idx < 0 || idx >= box.res[a]) {
        idx = -1;  // zero extension
      }
      s.index[a][k] = idx;
    }
  }
  return s;
}

Scalar GridField::interpolate(const Vector& z) const {
  const TensorStencil s = make_stencil(box_, z);
  const int d = s.dims;

  // accumulate over the 4^d tensor stencil
  int counter[8] = {0};
  Scalar acc = 0;
  while (true) {
    Scalar w = 1;
    Index flat = 0;
    bool zero = false;
    for (int a = 0; a < d; ++a) {
      const Index idx = s.index[a][counter[a]];
      if (idx < 0) {
        zero = true;
        break;
      }
      w *= s.weights[a][counter[a]];
      flat = flat * box_.res[a] + idx;
    }
    if (!zero) acc += w * samples_[flat];
    int a = d - 1;
    while (a >= 0 && ++counter[a] == 4) counter[a--] = 0;
    if (a < 0) break;
  }
  return acc;
}

Scalar GridField::integral() const { return samples_.sum() * box_.cell_volume(); }

Scalar GridField::max_abs() const { return samples_.cwiseAbs().maxCoeff(); }

Scalar GridField::boundary_band_max(int layers) const {
  if (box_.boundary == DarbouxBox::Boundary::Periodic) return 0;
  Scalar worst = 0;
  for (Index i = 0; i < samples_.size(); ++i) {
    const IndexVector multi = box_.multi_index(i);
    for (int a = 0; a < box_.dims(); ++a) {
      if (multi[a] < layers || multi[a] >= box_.res[a] - layers) {
        worst = std::max(worst, std::abs(samples_[i]));
        break;
      }
    }
  }
  return worst;
}

Scalar GridField::interpolation_tolerance() const {
  Scalar worst = 0;
  for (int a = 0; a < box_.dims(); ++a) {
    Index stride = 1;
    for (int b = box_.dims() - 1; b > a; --b) stride *= box_.res[b];
    const Index n = box_.res[a];
    for (Index i = 0; i < samples_.size(); ++i) {
      const Index k = (i / stride) % n;
      if (k + 3 >= n) continue;
      const Scalar d3 = samples_[i + 3 * stride] - 3 * samples_[i + 2 * stride] +
                        3 * samples_[i + stride] - samples_[i];
      worst = std::max(worst, std::abs(d3));
    }
  }
  return worst + 1e-12;
}

GridField derivative_grid(const GridField& f, int axis) {
  const DarbouxBox& box = f.box();
  if (axis < 0 || axis >= box.dims()) throw std::invalid_argument("axis out of range");
  Index stride = 1;
  for (int b = box.dims() - 1; b > axis; --b) stride *= box.res[b];
  const Index n = box.res[axis];
  const Scalar inv2h = 1 / (2 * box.spacing(axis));
  const bool periodic = box.boundary == DarbouxBox::Boundary::Periodic;

  Vector out(f.samples().size());
  detail::parallel_for(out.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const Index k = (i / stride) % n;
      if (periodic) {
        const Scalar plus = f.sample(i + (k + 1 == n ? (1 - n) : 1) * stride);
        const Scalar minus = f.sample(i + (k == 0 ? (n - 1) : -1) * stride);
        out[i] = (plus - minus) * inv2h;
      } else if (k == 0) {
        out[i] = (f.sample(i + stride) - f.sample(i)) * 2 * inv2h;
      } else if (k + 1 == n) {
        out[i] = (f.sample(i) - f.sample(i - stride)) * 2 * inv2h;
      } else {
        out[i] = (f.sample(i + stride) - f.sample(i - stride)) * inv2h;
      }
    }
  });
  return f.with_samples(std::move(out));
}

std::vector<GridField> gradient_grids(const GridField& f) {
  std::vector<GridField> grads;
  grads.reserve(static_cast<std::size_t>(f.box().dims()));
  for (int a = 0; a < f.box().dims(); ++a) grads.push_back(derivative_grid(f, a));
  return grads;
}

namespace detail {

void parallel_for(Index count, const std::function<void(Index, Index)>& chunk) {
  const unsigned hw = std::thread::hardware_concurrency();
  const Index workers =
      std::min<Index>(count, std::max<Index>(1, std::min<unsigned>(hw, 8)));
  if (workers <= 1 || count < 4096) {
    chunk(0, count);
    return;
  }
  std::vector<std::thread> pool;
  const Index step = (count + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * step;
    const Index end = std::min(count, begin + step);
    if (begin >= end) break;
    pool.emplace_back(chunk, begin, end);
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace rif
