#include "rif/flow.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "rif/rng.hpp"

namespace rif {

Diffeomorphism Diffeomorphism::identity(int dims) {
  return linear(Matrix::Identity(dims, dims));
}

Diffeomorphism Diffeomorphism::linear(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("linear map must be square");
  Diffeomorphism g;
  g.dims_ = static_cast<int>(m.rows());
  g.linear_ = true;
  g.inverse_matrix_ = m.inverse();
  if (!g.inverse_matrix_.allFinite())
    throw std::invalid_argument("linear map must be invertible");
  g.forward_matrix_ = std::move(m);
  return g;
}

Diffeomorphism Diffeomorphism::translation(Vector displacement) {
  const int d = static_cast<int>(displacement.size());
  Diffeomorphism g;
  g.dims_ = d;
  auto shift = std::make_shared<Vector>(std::move(displacement));
  g.forward_ = [shift](const Vector& z) { return (z + *shift).eval(); };
  g.inverse_ = [shift](const Vector& z) { return (z - *shift).eval(); };
  return g;
}

Diffeomorphism Diffeomorphism::from_maps(int dims, PointMap forward, PointMap inverse) {
  Diffeomorphism g;
  g.dims_ = dims;
  g.forward_ = std::move(forward);
  g.inverse_ = std::move(inverse);
  return g;
}

Vector Diffeomorphism::apply(const Vector& z) const {
  if (z.size() != dims_) throw std::invalid_argument("point dimension mismatch");
  return linear_ ? (forward_matrix_ * z).eval() : forward_(z);
}

Vector Diffeomorphism::apply_inverse(const Vector& z) const {
  if (z.size() != dims_) throw std::invalid_argument("point dimension mismatch");
  return linear_ ? (inverse_matrix_ * z).eval() : inverse_(z);
}

const Matrix& Diffeomorphism::matrix() const {
  if (!linear_) throw std::logic_error("map is not linear");
  return forward_matrix_;
}

Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner) {
  if (outer.dims() != inner.dims()) throw std::invalid_argument("dimension mismatch");
  if (outer.is_linear() && inner.is_linear())
    return Diffeomorphism::linear(outer.matrix() * inner.matrix());
  auto o = std::make_shared<Diffeomorphism>(outer);
  auto i = std::make_shared<Diffeomorphism>(inner);
  return Diffeomorphism::from_maps(
      outer.dims(),
      [o, i](const Vector& z) { return o->apply(i->apply(z)); },
      [o, i](const Vector& z) { return i->apply_inverse(o->apply_inverse(z)); });
}

std::vector<GridField> sgrad(const GridField& h) {
  const int n = h.box().n;
  std::vector<GridField> field;
  field.reserve(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < n; ++k) field.push_back(derivative_grid(h, n + k));
  for (int k = 0; k < n; ++k) {
    GridField d = derivative_grid(h, k);
    field.push_back(d.with_samples(-d.samples()));
  }
  return field;
}

Matrix linear_hamiltonian_field(const QuadraticForm& h) {
  return 2 * standard_symplectic_matrix(h.half_dim()) * h.coeffs();
}

namespace {

struct LeapfrogData {
  DarbouxBox box;
  std::vector<GridField> grad;  // gradient of the Hamiltonian per axis
  Scalar step = 0;
  int steps = 0;
};

Vector leapfrog_integrate(const LeapfrogData& d, Vector z, Scalar direction) {
  const int n = d.box.n;
  const Scalar tau = direction * d.step;
  auto kick = [&](Vector& state, Scalar dt) {
    Vector dx(n);
    for (int k = 0; k < n; ++k) dx[k] = d.grad[static_cast<std::size_t>(k)].interpolate(state);
    for (int k = 0; k < n; ++k) state[n + k] -= dt * dx[k];
  };
  auto drift = [&](Vector& state, Scalar dt) {
    Vector dy(n);
    for (int k = 0; k < n; ++k)
      dy[k] = d.grad[static_cast<std::size_t>(n + k)].interpolate(state);
    for (int k = 0; k < n; ++k) state[k] += dt * dy[k];
  };
  for (int s = 0; s < d.steps; ++s) {
    kick(z, tau / 2);
    drift(z, tau);
    kick(z, tau / 2);
  }
  return z;
}

void require_separable(const GridField& h) {
  const int n = h.box().n;
  Scalar min_spacing = h.box().spacing(0);
  for (int a = 1; a < h.box().dims(); ++a)
    min_spacing = std::min(min_spacing, h.box().spacing(a));
  const Scalar tol = 1e-7 * (1 + h.max_abs()) / (min_spacing * min_spacing);
  for (int a = 0; a < n; ++a) {
    const GridField da = derivative_grid(h, a);
    for (int b = n; b < 2 * n; ++b) {
      if (derivative_grid(da, b).max_abs() > tol)
        throw std::invalid_argument(
            "leapfrog needs a separable hamiltonian h(x,y) = V(x) + T(y)");
    }
  }
}

}  // namespace

Diffeomorphism flow(const FlowSpec& spec) {
  if (spec.steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (spec.method == FlowSpec::Method::ExactLinear) {
    const auto* q = std::get_if<QuadraticForm>(&spec.hamiltonian);
    if (!q)
      throw std::invalid_argument("exact linear flow needs a quadratic hamiltonian");
    const Matrix generator = linear_hamiltonian_field(*q) * spec.duration;
    return Diffeomorphism::linear(generator.exp());
  }

  const auto* h = std::get_if<GridField>(&spec.hamiltonian);
  if (!h) throw std::invalid_argument("leapfrog flow needs a grid hamiltonian");
  require_separable(*h);
  auto data = std::make_shared<LeapfrogData>();
  data->box = h->box();
  data->grad = gradient_grids(*h);
  data->steps = spec.steps;
  data->step = spec.duration / spec.steps;
  return Diffeomorphism::from_maps(
      h->box().dims(),
      [data](const Vector& z) { return leapfrog_integrate(*data, z, +1); },
      [data](const Vector& z) { return leapfrog_integrate(*data, z, -1); });
}

GridField pullback(const Diffeomorphism& g, const GridField& xi) {
  const DarbouxBox& box = xi.box();
  if (g.dims() != box.dims()) throw std::invalid_argument("dimension mismatch");
  const bool compact = box.boundary == DarbouxBox::Boundary::CompactSupport;
  const Scalar band = compact ? xi.boundary_band_max(2) : 0;
  const Scalar band_tol = 1e-12 * (1 + xi.max_abs());

  Vector out(box.node_count());
  std::atomic<bool> escaped{false};
  detail::parallel_for(box.node_count(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const Vector source = g.apply_inverse(box.node_point(i));
      if (compact && !box.contains(source)) escaped = true;
      out[i] = xi.interpolate(source);
    }
  });
  if (escaped && band > band_tol)
    throw std::runtime_error(
        "pullback leaves a compactly supported box with nonzero boundary values");
  return xi.with_samples(std::move(out));
}

VolumeReport volume_check(const Diffeomorphism& g, const DarbouxBox& box,
                          int samples, std::uint64_t seed) {
  box.validate();
  if (g.dims() != box.dims()) throw std::invalid_argument("dimension mismatch");
  VolumeReport rep;
  rep.samples = samples;
  if (g.is_linear()) {
    // the derivative is the matrix itself everywhere
    rep.max_jacobian_deviation = std::abs(g.matrix().determinant() - 1);
    return rep;
  }
  const int d = box.dims();
  CounterRng rng(seed, 777);
  for (int s = 0; s < samples; ++s) {
    Vector z(d);
    for (int a = 0; a < d; ++a) {
      const Scalar margin = 0.1 * box.extent(a);
      z[a] = rng.uniform(box.lo[a] + margin, box.hi[a] - margin);
    }
    Matrix jac(d, d);
    for (int a = 0; a < d; ++a) {
      const Scalar h = 1e-5 * box.extent(a);
      Vector zp = z, zm = z;
      zp[a] += h;
      zm[a] -= h;
      jac.col(a) = (g.apply(zp) - g.apply(zm)) / (2 * h);
    }
    rep.max_jacobian_deviation =
        std::max(rep.max_jacobian_deviation, std::abs(jac.determinant() - 1));
  }
  return rep;
}

Diffeomorphism coordinate_flow(int n, int axis, Scalar tau) {
  if (axis < 0 || axis >= 2 * n) throw std::invalid_argument("axis out of range");
  Vector d = Vector::Zero(2 * n);
  if (axis < n)
    d[n + axis] = -tau;  // flow of +x_axis moves the conjugate coordinate
  else
    d[axis - n] = -tau;  // flow of -y_(axis-n) moves the base coordinate
  return Diffeomorphism::translation(std::move(d));
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] via the symmetric Jacobi matrix.
void gauss_legendre(int points, Vector& nodes, Vector& weights) {
  Matrix jacobi = Matrix::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const Scalar beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
  nodes = es.eigenvalues();
  weights.resize(points);
  for (int k = 0; k < points; ++k) {
    const Scalar first = es.eigenvectors()(0, k);
    weights[k] = 2 * first * first;
  }
}

Scalar bump_kernel(Scalar t) {
  const Scalar s = 1 - t * t;
  return s > 0 ? (35.0 / 32.0) * s * s * s : 0.0;
}

}  // namespace

GridField regularize(const RegularizerSpec& spec, const GridField& h) {
  if (!(spec.lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (spec.quad_points < 4) throw std::invalid_argument("need at least 4 quadrature points");
  const DarbouxBox& box = h.box();
  const int d = box.dims();
  const int n = box.n;

  Vector nodes, weights;
  gauss_legendre(spec.quad_points, nodes, weights);

  Scalar kernel_mass = 0;
  for (int k = 0; k < spec.quad_points; ++k) kernel_mass += weights[k] * bump_kernel(nodes[k]);
  if (std::abs(kernel_mass - 1) > 1e-8)
    throw std::runtime_error("kernel quadrature lost unit mass");

  if (box.boundary == DarbouxBox::Boundary::CompactSupport) {
    Scalar max_spacing = 0;
    for (int a = 0; a < d; ++a) max_spacing = std::max(max_spacing, box.spacing(a));
    const Scalar margin = 1 / spec.lambda + 2 * max_spacing;
    int layers = 0;
    for (int a = 0; a < d; ++a)
      layers = std::max(layers, static_cast<int>(std::ceil(margin / box.spacing(a))));
    if (h.boundary_band_max(layers) > 1e-12 * (1 + h.max_abs()))
      throw std::invalid_argument("support margin violated for the mollifier width");
  }

  // enumerate tensor quadrature nodes; each contributes one composed
  // coordinate-flow pushforward
  std::vector<int> counter(static_cast<std::size_t>(d), 0);
  Vector out = Vector::Zero(box.node_count());
  while (true) {
    Scalar w = 1;
    Vector t(d);
    for (int a = 0; a < d; ++a) {
      const int k = counter[static_cast<std::size_t>(a)];
      w *= weights[k] * bump_kernel(nodes[k]);
      t[a] = nodes[k] / spec.lambda;
    }
    if (w != 0) {
      Diffeomorphism g = coordinate_flow(n, 0, t[0]);
      for (int a = 1; a < d; ++a) g = compose(g, coordinate_flow(n, a, t[a]));
      Vector contrib(box.node_count());
      detail::parallel_for(box.node_count(), [&](Index begin, Index end) {
        for (Index i = begin; i < end; ++i)
          contrib[i] = h.interpolate(g.apply_inverse(box.node_point(i)));
      });
      out += w * contrib;
    }
    int a = d - 1;
    while (a >= 0 && ++counter[static_cast<std::size_t>(a)] == spec.quad_points)
      counter[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return h.with_samples(std::move(out));
}

}  // namespace rif
