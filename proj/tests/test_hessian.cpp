#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rif/critical.hpp"
#include "rif/rng.hpp"

using namespace rif;

namespace {

// bounded odd reshaping of the value range: the gradient of cap(q(z))
// vanishes exactly where the gradient of q does, and the Hessian at a zero
// of q is untouched
Scalar cap(Scalar q, Scalar height) { return height * std::tanh(q / height); }

}  // namespace

TEST_CASE("quadratic form basics") {
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS(QuadraticForm(1, skew));

  const QuadraticForm xy = QuadraticForm::diagonal_type(Vector::Ones(1));
  CHECK(xy.coeffs()(0, 1) == 0.5);
  Vector z(2);
  z << 2, 3;
  CHECK(xy(z) == 6);
}

TEST_CASE("poisson bracket") {
  const QuadraticForm xy = QuadraticForm::diagonal_type(Vector::Ones(1));
  Matrix xx = Matrix::Zero(2, 2);
  xx(0, 0) = 1;
  Matrix yy = Matrix::Zero(2, 2);
  yy(1, 1) = 1;

  // antisymmetry
  CHECK(poisson_bracket(xy, xy).coeffs().cwiseAbs().maxCoeff() == 0);

  // {xy, x^2} = 2 x^2 and {xy, y^2} = -2 y^2
  CHECK((poisson_bracket(xy, QuadraticForm(1, xx)).coeffs() - 2 * xx).cwiseAbs().maxCoeff() <=
        1e-14);
  CHECK((poisson_bracket(xy, QuadraticForm(1, yy)).coeffs() + 2 * yy).cwiseAbs().maxCoeff() <=
        1e-14);

  // bilinearity and the Jacobi identity on random triples
  CounterRng rng(61, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    auto random_form = [&]() {
      Matrix a(2 * n, 2 * n);
      for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) a(i, j) = a(j, i) = rng.uniform(-1, 1);
      return QuadraticForm(n, a);
    };
    const QuadraticForm a = random_form(), b = random_form(), c = random_form();
    const Matrix jacobi = poisson_bracket(a, poisson_bracket(b, c)).coeffs() +
                          poisson_bracket(b, poisson_bracket(c, a)).coeffs() +
                          poisson_bracket(c, poisson_bracket(a, b)).coeffs();
    CHECK(jacobi.cwiseAbs().maxCoeff() <= 1e-10);
    const Matrix anti = poisson_bracket(a, b).coeffs() + poisson_bracket(b, a).coeffs();
    CHECK(anti.cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("adjoint eigenstructure of diagonal-type forms") {
  // monomials are eigenvectors with eigenvalues q_l + q_m, q_l - q_m, -q_l - q_m
  Vector q(2);
  q << 1.5, -0.5;
  const Matrix ad = adjoint_matrix(QuadraticForm::diagonal_type(q));
  CHECK(ad.rows() == monomial_basis_size(2));
  // off-diagonal triangular structure vanishes for diagonal-type forms
  Matrix residual = ad;
  for (Index k = 0; k < ad.rows(); ++k) residual(k, k) = 0;
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-14);
  // trace of ad is zero: eigenvalues come in opposite pairs
  CHECK(std::abs(ad.trace()) <= 1e-13);
}

TEST_CASE("t invariant") {
  CHECK(t_invariant(QuadraticForm::diagonal_type(Vector::Ones(1))) ==
        doctest::Approx(8.0).epsilon(1e-14));
  CHECK(t_invariant(QuadraticForm::zero(2)) == 0);
  CHECK(t_invariant(QuadraticForm::diagonal_type(2 * Vector::Ones(2))) ==
        doctest::Approx(96.0).epsilon(1e-14));

  // closed form on random diagonal-type forms
  CounterRng rng(67, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    Vector q(n);
    for (int k = 0; k < n; ++k) q[k] = rng.uniform(-3, 3);
    const Scalar expected = (4 * n + 4) * q.squaredNorm();
    CHECK(t_invariant(QuadraticForm::diagonal_type(q)) ==
          doctest::Approx(expected).epsilon(1e-11));
  }

  // symplectic invariance
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    Matrix a(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = i; j < 2 * n; ++j) a(i, j) = a(j, i) = rng.uniform(-2, 2);
    const QuadraticForm form(n, a);
    const Matrix s = random_symplectic(n, rng);
    CHECK(t_invariant(compose_linear(form, s)) ==
          doctest::Approx(t_invariant(form)).epsilon(1e-8));
  }
}

TEST_CASE("t invariant on a general form") {
  // frozen against an independent implementation of the adjoint matrix
  Matrix a(4, 4);
  a << 0.7, -0.3, 0.5, 0.1,
      -0.3, 1.2, -0.4, 0.8,
       0.5, -0.4, -0.6, 0.2,
       0.1, 0.8, 0.2, 0.9;
  CHECK(t_invariant(QuadraticForm(2, a)) == doctest::Approx(12.96).epsilon(1e-12));
}

TEST_CASE("det invariant") {
  const QuadraticForm xy = QuadraticForm::diagonal_type(Vector::Ones(1));
  CHECK(det_invariant(xy) == -0.25);
  CHECK(det_invariant(QuadraticForm::diagonal_type(2 * Vector::Ones(1))) == -1.0);
  CHECK(det_invariant(QuadraticForm::zero(2)) == 0);

  // det scales by det(S)^2 under composition
  CounterRng rng(71, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    Matrix a(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = i; j < 2 * n; ++j) a(i, j) = a(j, i) = rng.uniform(-2, 2);
    Matrix s(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) s(i, j) = rng.uniform(-1, 1);
    if (std::abs(s.determinant()) < 1e-3) continue;
    const QuadraticForm form(n, a);
    const Scalar lhs = det_invariant(compose_linear(form, s));
    const Scalar rhs = s.determinant() * s.determinant() * det_invariant(form);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("compose linear") {
  const QuadraticForm q = QuadraticForm::diagonal_type(2 * Vector::Ones(1));
  CHECK((compose_linear(q, Matrix::Identity(2, 2)).coeffs() - q.coeffs()).cwiseAbs().maxCoeff() ==
        0);
  const Scalar c = 0.6;
  const Matrix s = std::exp(c) * Matrix::Identity(2, 2);
  const QuadraticForm scaled = compose_linear(q, s);
  CHECK(scaled.coeffs()(0, 1) == doctest::Approx(std::exp(2 * c)).epsilon(1e-14));
  CHECK_THROWS(compose_linear(q, Matrix::Zero(2, 2)));
}

TEST_CASE("cutoff") {
  CHECK(cutoff_phi(0.3) == 0.0);
  CHECK(cutoff_phi(-0.5) == 0.0);
  CHECK(cutoff_phi(2.0) == 2.0);
  CHECK(cutoff_phi(1.0) == 1.0);
  CHECK(cutoff_phi(-3.0) == -3.0);
  // odd, monotone interpolation in between
  for (Scalar s : {0.55, 0.7, 0.9}) {
    CHECK(cutoff_phi(s) > 0);
    CHECK(cutoff_phi(s) < s);
    CHECK(cutoff_phi(-s) == -cutoff_phi(s));
  }
}

TEST_CASE("critical points of a planar saddle") {
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -3.0);
  box.hi = Vector::Constant(2, 3.0);
  box.res = IndexVector::Constant(2, 61);
  box.boundary = DarbouxBox::Boundary::CompactSupport;

  // bounded saddle with germ 2xy at the origin
  const GridField field = GridField::sample(
      box, [](const Vector& z) { return cap(2 * z[0] * z[1], 50.0); });
  const auto points = find_critical_points(field, 0.5);
  REQUIRE(points.size() == 1);
  CHECK(points[0].location.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(points[0].det_q == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(points[0].t_q == doctest::Approx(32.0).epsilon(1e-4));  // (4n+4) q^2, q = 2
  CHECK(points[0].nondegenerate);

  CHECK(p_functional(field) == doctest::Approx(-32.0).epsilon(1e-4));

  // a linear field has no critical points
  const GridField slope = GridField::sample(box, [](const Vector& z) { return z[0]; });
  CHECK(find_critical_points(slope, 0.5).empty());
  CHECK(p_functional(slope) == 0.0);
}

TEST_CASE("periodic critical points of cos x cos y") {
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, 0.0);
  box.hi = Vector::Constant(2, 2 * M_PI);
  box.res = IndexVector::Constant(2, 64);
  box.boundary = DarbouxBox::Boundary::Periodic;
  const GridField field = GridField::sample(
      box, [](const Vector& z) { return std::cos(z[0]) * std::cos(z[1]); });

  // gradient (-sin x cos y, -cos x sin y) vanishes at sin x = sin y = 0
  // (four points) and at cos x = cos y = 0 (four points); all eight are
  // nondegenerate with |det| = 1/4
  const auto points = find_critical_points(field, 0.1);
  CHECK(points.size() == 8);
  for (const auto& cp : points) {
    CHECK(std::abs(cp.det_q) == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(cp.nondegenerate);
  }

  // the cutoff kills every |det| <= 1/2 point
  CHECK(p_functional(field, 0.5) == 0.0);
}

TEST_CASE("two copies double the functional") {
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -6.0);
  box.hi = Vector::Constant(2, 6.0);
  box.res = IndexVector::Constant(2, 241);
  box.boundary = DarbouxBox::Boundary::CompactSupport;

  // two far-apart bounded saddles; each is flat to machine precision at the
  // other's center
  auto saddle_at = [](const Vector& z, Scalar cx, Scalar cy) {
    return cap(2 * (z[0] - cx) * (z[1] - cy), 1.0);
  };
  const GridField single = GridField::sample(
      box, [&](const Vector& z) { return saddle_at(z, -3, -3); });
  const GridField twin = GridField::sample(box, [&](const Vector& z) {
    return saddle_at(z, -3, -3) + saddle_at(z, 3, 3);
  });
  const Scalar p1 = p_functional(single);
  const Scalar p2 = p_functional(twin);
  CHECK(p1 == doctest::Approx(-32.0).epsilon(1e-2));
  CHECK(p2 == doctest::Approx(2 * p1).epsilon(1e-9));
  CHECK(find_critical_points(twin, 0.5).size() == 2);
}

TEST_CASE("clustered critical points are rejected") {
  DarbouxBox box;
  box.n = 1;
  box.lo = Vector::Constant(2, -3.0);
  box.hi = Vector::Constant(2, 3.0);
  box.res = IndexVector::Constant(2, 61);
  box.boundary = DarbouxBox::Boundary::CompactSupport;
  // y x (x - a) has saddles at (0, 0) and (a, 0); a is 2.5 cells
  const Scalar gap = 2.5 * box.spacing(0);
  const GridField field = GridField::sample(box, [&](const Vector& z) {
    return z[1] * z[0] * (z[0] - gap);
  });
  CHECK_THROWS_AS(find_critical_points(field, 0.001), std::runtime_error);
}

TEST_CASE("counterexample map") {
  Vector c0(2);
  c0 << 0, 0;
  const Diffeomorphism id_map = counterexample_map(c0);
  CHECK((id_map.matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0);

  Vector c(2);
  c << 1, -1;
  const Diffeomorphism g = counterexample_map(c);
  CHECK(g.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));

  Vector unbalanced(2);
  unbalanced << 1, 1;
  CHECK_THROWS(counterexample_map(unbalanced));
  CHECK_THROWS(counterexample_map(Vector::Ones(1)));

  // Hessian of the pulled-back germ: 2 sum e^{2 c_nu} x_nu y_nu under
  // composition with the scaling itself
  const QuadraticForm germ = QuadraticForm::diagonal_type(2 * Vector::Ones(2));
  const QuadraticForm moved = compose_linear(germ, g.matrix());
  CHECK(moved.coeffs()(0, 2) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(moved.coeffs()(1, 3) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("sup-norm discontinuity: shrinking heights keep the invariant") {
  // fields of height A with the same germ 2xy at the origin; A -> 0 in sup
  // norm while the functional stays pinned
  auto field_of_height = [](Scalar height, int res) {
    DarbouxBox box;
    box.n = 1;
    box.lo = Vector::Constant(2, -1.5);
    box.hi = Vector::Constant(2, 1.5);
    box.res = IndexVector::Constant(2, res);
    box.boundary = DarbouxBox::Boundary::CompactSupport;
    return GridField::sample(box, [&](const Vector& z) {
      return cap(2 * z[0] * z[1], height);
    });
  };
  const GridField tall = field_of_height(0.25, 121);
  const GridField flat = field_of_height(0.0625, 241);
  CHECK(tall.max_abs() <= 0.25);
  CHECK(flat.max_abs() <= 0.0625);
  CHECK(p_functional(tall) == doctest::Approx(-32.0).epsilon(1e-2));
  CHECK(p_functional(flat) == doctest::Approx(-32.0).epsilon(1e-2));
}
