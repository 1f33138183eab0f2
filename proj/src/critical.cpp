#include "rif/critical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rif {

namespace {

// gradient components interleaved per node, so one stencil pass interpolates
// the whole gradient with contiguous gathers
struct GradientSampler {
  const DarbouxBox* box = nullptr;
  int d = 0;
  Vector data;

  explicit GradientSampler(const std::vector<GridField>& grads)
      : box(&grads.front().box()), d(static_cast<int>(grads.size())) {
    const Index nodes = box->node_count();
    data.resize(nodes * d);
    for (int a = 0; a < d; ++a)
      for (Index i = 0; i < nodes; ++i)
        data[i * d + a] = grads[static_cast<std::size_t>(a)].sample(i);
  }

  Vector operator()(const Vector& z) const {
    const TensorStencil s = make_stencil(*box, z);
    Vector g = Vector::Zero(d);
    int counter[8] = {0};
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
        flat = flat * box->res[a] + idx;
      }
      if (!zero)
        for (int a = 0; a < d; ++a) g[a] += w * data[flat * d + a];
      int a = d - 1;
      while (a >= 0 && ++counter[a] == 4) counter[a--] = 0;
      if (a < 0) break;
    }
    return g;
  }
};

// fourth-order first derivative of the interpolated field
Scalar d1_wide(const GridField& f, Vector z, int axis, Scalar h) {
  auto at = [&](Scalar off) {
    Vector p = z;
    p[axis] += off;
    return f.interpolate(p);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

std::string point_string(const Vector& z) {
  std::ostringstream out;
  out << '(';
  for (Index k = 0; k < z.size(); ++k) out << (k ? ", " : "") << z[k];
  out << ')';
  return out.str();
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const GridField& xi,
                                                Scalar det_threshold) {
  const DarbouxBox& box = xi.box();
  const int d = box.dims();
  const bool periodic = box.boundary == DarbouxBox::Boundary::Periodic;

  const std::vector<GridField> grads = gradient_grids(xi);
  const GradientSampler gradient(grads);
  Scalar grad_scale = 0;
  for (const auto& g : grads) grad_scale = std::max(grad_scale, g.max_abs());
  if (grad_scale == 0) return {};
  const Scalar g_tol = 1e-10 * std::max<Scalar>(1, grad_scale);
  // cells whose corner gradients all sit this far below the global scale are
  // flat tails, saturated plateaus, or cancellation shells; their curvature
  // cannot be certified at grid resolution, so they are not refined
  const Scalar live_tol = 1e-4 * grad_scale;

  IndexVector cells(d);
  for (int a = 0; a < d; ++a) cells[a] = periodic ? box.res[a] : box.res[a] - 1;
  Index cell_count = 1;
  for (int a = 0; a < d; ++a) cell_count *= cells[a];

  std::vector<Index> stride(static_cast<std::size_t>(d));
  {
    Index s = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[static_cast<std::size_t>(a)] = s;
      s *= box.res[a];
    }
  }
  // node offsets of the 2^d cell corners (wrap handled separately)
  const Index corners = Index{1} << d;
  std::vector<Index> corner_delta(static_cast<std::size_t>(corners), 0);
  for (Index c = 0; c < corners; ++c)
    for (int b = 0; b < d; ++b)
      if (c & (Index{1} << b))
        corner_delta[static_cast<std::size_t>(c)] += stride[static_cast<std::size_t>(b)];

  Scalar min_spacing = box.spacing(0);
  for (int a = 1; a < d; ++a) min_spacing = std::min(min_spacing, box.spacing(a));

  std::vector<Index> seeds;
  IndexVector base(d);
  for (Index cell = 0; cell < cell_count; ++cell) {
    {
      Index rest = cell;
      for (int a = d - 1; a >= 0; --a) {
        base[a] = static_cast<int>(rest % cells[a]);
        rest /= cells[a];
      }
    }
    // stay away from non-periodic faces: edge stencils have no valid data
    bool at_wrap = false;
    if (periodic) {
      for (int a = 0; a < d; ++a)
        if (base[a] + 1 == box.res[a]) at_wrap = true;
    } else {
      bool near_face = false;
      for (int a = 0; a < d; ++a)
        if (base[a] < 2 || base[a] + 3 > box.res[a]) near_face = true;
      if (near_face) continue;
    }

    Index base_flat = 0;
    for (int a = 0; a < d; ++a) base_flat += base[a] * stride[static_cast<std::size_t>(a)];

    bool candidate = true;
    bool live = false;
    for (int a = 0; a < d && candidate; ++a) {
      const auto& samples = grads[static_cast<std::size_t>(a)].samples();
      Scalar lo_v = 0, hi_v = 0;
      for (Index c = 0; c < corners; ++c) {
        Index flat;
        if (!at_wrap) {
          flat = base_flat + corner_delta[static_cast<std::size_t>(c)];
        } else {
          flat = 0;
          for (int b = 0; b < d; ++b) {
            Index node = base[b] + ((c >> b) & 1);
            if (node == box.res[b]) node = 0;
            flat += node * stride[static_cast<std::size_t>(b)];
          }
        }
        const Scalar v = samples[flat];
        lo_v = c == 0 ? v : std::min(lo_v, v);
        hi_v = c == 0 ? v : std::max(hi_v, v);
      }
      if (lo_v > 0 || hi_v < 0) candidate = false;
      if (std::max(std::abs(lo_v), std::abs(hi_v)) > live_tol) live = true;
    }
    if (candidate && live) seeds.push_back(cell);
  }

  // refine seeds in parallel; results keep the seed order
  std::vector<char> ok(seeds.size(), 0);
  std::vector<Vector> refined(seeds.size());
  detail::parallel_for(static_cast<Index>(seeds.size()), [&](Index begin, Index end) {
    IndexVector cell_base(d);
    for (Index s = begin; s < end; ++s) {
      Index rest = seeds[static_cast<std::size_t>(s)];
      for (int a = d - 1; a >= 0; --a) {
        cell_base[a] = static_cast<int>(rest % cells[a]);
        rest /= cells[a];
      }
      Vector z(d);
      for (int a = 0; a < d; ++a)
        z[a] = box.coord(a, cell_base[a]) + 0.5 * box.spacing(a);
      const Vector seed_center = z;

      // the Jacobian of a near-quadratic zero is nearly constant, so one
      // factorization per seed carries the whole iteration
      bool converged = false;
      Eigen::CompleteOrthogonalDecomposition<Matrix> solver;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (int iter = 0; iter < 25; ++iter) {
        const Vector g = gradient(z);
        const Scalar g_norm = g.cwiseAbs().maxCoeff();
        if (g_norm <= g_tol) {
          converged = true;
          break;
        }
        if (iter == 12 && g_norm > 1e4 * g_tol) break;  // not closing in
        best = std::min(best, g_norm);
        if (iter == 0 || (iter % 8 == 0 && g_norm > 0.5 * best)) {
          Matrix jac(d, d);
          for (int a = 0; a < d; ++a) {
            const Scalar h = 0.25 * box.spacing(a);
            Vector zp = z, zm = z;
            zp[a] += h;
            zm[a] -= h;
            jac.col(a) = (gradient(zp) - gradient(zm)) / (2 * h);
          }
          solver.compute(jac);
        }
        Vector step = solver.solve(-g);
        const Scalar cap = 1.5 * min_spacing;
        const Scalar norm = step.cwiseAbs().maxCoeff();
        if (!(norm > 0) || !step.allFinite()) break;
        if (norm > cap) step *= cap / norm;
        z += step;
        bool escaped = false;
        for (int a = 0; a < d; ++a)
          if (std::abs(z[a] - seed_center[a]) > 3 * box.spacing(a)) escaped = true;
        if (escaped) break;
      }
      ok[static_cast<std::size_t>(s)] = converged ? 1 : 0;
      if (converged) refined[static_cast<std::size_t>(s)] = std::move(z);
    }
  });

  // quadratic Taylor coefficients by second differences at the given spacing
  auto taylor_at = [&](const Vector& z, Scalar spacing_cells) {
    Matrix hess(d, d);
    for (int a = 0; a < d; ++a) {
      const Scalar h = spacing_cells * box.spacing(a);
      auto at = [&](Scalar off) {
        Vector p = z;
        p[a] += off;
        return xi.interpolate(p);
      };
      hess(a, a) = (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
                   (12 * h * h);
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        const Scalar hb = spacing_cells * box.spacing(b);
        auto dxa = [&](Scalar off_b) {
          Vector p = z;
          p[b] += off_b;
          return d1_wide(xi, p, a, spacing_cells * box.spacing(a));
        };
        const Scalar mixed =
            (-dxa(2 * hb) + 8 * dxa(hb) - 8 * dxa(-hb) + dxa(-2 * hb)) / (12 * hb);
        hess(a, b) = hess(b, a) = mixed;
      }
    return hess;
  };

  std::vector<Vector> found;
  std::vector<CriticalPoint> points;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (!ok[s]) continue;
    const Vector& z = refined[s];

    bool duplicate = false;
    for (const Vector& prev : found) {
      bool close = true;
      for (int a = 0; a < d; ++a) {
        Scalar delta = std::abs(z[a] - prev[a]);
        if (periodic) delta = std::min(delta, box.extent(a) - delta);
        if (delta > 1.01 * box.spacing(a)) close = false;
      }
      if (close) duplicate = true;
    }
    if (duplicate) continue;
    found.push_back(z);

    const Matrix hess = taylor_at(z, 1.0);
    QuadraticForm taylor(box.n, (hess / 2).eval());
    const Scalar det = det_invariant(taylor);
    if (std::abs(det) <= det_threshold) continue;

    // a Morse point grows its gradient like the Hessian predicts; points in
    // numerically flat regions report stencil artifacts instead
    Scalar measured = 0, predicted = 0;
    for (int a = 0; a < d; ++a) {
      const Scalar h = box.spacing(a);
      for (Scalar sign : {-1.0, 1.0}) {
        Vector p = z;
        p[a] += sign * h;
        measured = std::max(measured, gradient(p).cwiseAbs().maxCoeff());
        predicted = std::max(predicted, (hess.col(a) * h).cwiseAbs().maxCoeff());
      }
    }
    if (measured < 0.1 * predicted) continue;

    // the quadratic model of a resolved critical point is stable under
    // doubling the stencil; window cliffs and other unresolved structure are
    // not, and carry no certifiable invariants
    const Matrix hess_wide = taylor_at(z, 2.0);
    const Scalar mismatch = (hess - hess_wide).cwiseAbs().maxCoeff() /
                            std::max<Scalar>(1, hess.cwiseAbs().maxCoeff());
    if (mismatch > 0.25) continue;

    const Scalar t = t_invariant(taylor);
    points.push_back({z, std::move(taylor), det, t, true});
  }

  // reported points must be isolated by at least three cells
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      bool close = true;
      for (int a = 0; a < d; ++a) {
        Scalar delta = std::abs(points[i].location[a] - points[j].location[a]);
        if (periodic) delta = std::min(delta, box.extent(a) - delta);
        if (delta > 3 * box.spacing(a)) close = false;
      }
      if (close)
        throw std::runtime_error("clustered critical points near " +
                                 point_string(points[i].location) + " and " +
                                 point_string(points[j].location));
    }

  std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    for (Index k = 0; k < a.location.size(); ++k) {
      if (a.location[k] < b.location[k] - 1e-12) return true;
      if (a.location[k] > b.location[k] + 1e-12) return false;
    }
    return false;
  });
  return points;
}

Scalar p_functional(const GridField& xi, Scalar det_threshold) {
  Scalar total = 0;
  for (const CriticalPoint& cp : find_critical_points(xi, det_threshold))
    total += cutoff_phi(cp.det_q) * cp.t_q;
  return total;
}

Diffeomorphism counterexample_map(const Vector& c) {
  const int n = static_cast<int>(c.size());
  if (n < 2) throw std::invalid_argument("the construction needs half-dimension >= 2");
  if (std::abs(c.sum()) > 1e-12 * (1 + c.cwiseAbs().sum()))
    throw std::invalid_argument("exponents must sum to zero");
  Vector diag(2 * n);
  for (int nu = 0; nu < n; ++nu) diag[nu] = diag[n + nu] = std::exp(c[nu]);
  return Diffeomorphism::linear(Matrix(diag.asDiagonal()));
}

}  // namespace rif
