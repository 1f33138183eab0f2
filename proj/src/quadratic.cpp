#include "rif/quadratic.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace rif {

QuadraticForm::QuadraticForm(int n, Matrix coeffs) : n_(n), a_(std::move(coeffs)) {
  if (n_ < 1) throw std::invalid_argument("half-dimension must be at least 1");
  if (a_.rows() != 2 * n_ || a_.cols() != 2 * n_)
    throw std::invalid_argument("coefficient matrix must be 2n x 2n");
  const Scalar scale = std::max<Scalar>(1, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw std::invalid_argument("coefficient matrix must be symmetric");
  a_ = ((a_ + a_.transpose()) / 2).eval();
}

QuadraticForm QuadraticForm::zero(int n) {
  return QuadraticForm(n, Matrix::Zero(2 * n, 2 * n));
}

QuadraticForm QuadraticForm::diagonal_type(const Vector& q) {
  const int n = static_cast<int>(q.size());
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  for (int nu = 0; nu < n; ++nu) {
    a(nu, n + nu) = q[nu] / 2;
    a(n + nu, nu) = q[nu] / 2;
  }
  return QuadraticForm(n, std::move(a));
}

Matrix standard_symplectic_matrix(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

QuadraticForm poisson_bracket(const QuadraticForm& q, const QuadraticForm& r) {
  if (q.half_dim() != r.half_dim())
    throw std::invalid_argument("dimension mismatch");
  // gradient of R contracted with the symplectic gradient of Q:
  // z^T (2B) J (2A) z, symmetrized; (BJA)^T = -AJB
  const Matrix j = standard_symplectic_matrix(q.half_dim());
  const Matrix bja = r.coeffs() * j * q.coeffs();
  return QuadraticForm(q.half_dim(), 2 * (bja + bja.transpose()).eval());
}

Index monomial_basis_size(int n) { return static_cast<Index>(n) * (2 * n + 1); }

namespace {

// basis index of z_l z_m with l <= m under lexicographic (l, m) order
Index monomial_index(int l, int m, int dim) {
  // l ranges over 0..dim-1; pairs with first index l start at
  // sum_{k<l} (dim - k) = l*dim - l(l-1)/2
  return static_cast<Index>(l) * dim - static_cast<Index>(l) * (l - 1) / 2 +
         (m - l);
}

QuadraticForm monomial(int l, int m, int n) {
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  if (l == m)
    a(l, l) = 1;
  else
    a(l, m) = a(m, l) = 0.5;
  return QuadraticForm(n, std::move(a));
}

}  // namespace

Matrix adjoint_matrix(const QuadraticForm& q) {
  const int n = q.half_dim();
  const int dim = 2 * n;
  const Index size = monomial_basis_size(n);
  Matrix ad = Matrix::Zero(size, size);
  for (int l = 0; l < dim; ++l) {
    for (int m = l; m < dim; ++m) {
      const QuadraticForm bracket = poisson_bracket(q, monomial(l, m, n));
      const Index col = monomial_index(l, m, dim);
      for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
          const Scalar coeff = (a == b) ? bracket.coeffs()(a, a)
                                        : 2 * bracket.coeffs()(a, b);
          ad(monomial_index(a, b, dim), col) = coeff;
        }
    }
  }
  return ad;
}

Scalar t_invariant(const QuadraticForm& q) {
  const Matrix ad = adjoint_matrix(q);
  return (ad * ad).trace();
}

Scalar det_invariant(const QuadraticForm& q) { return q.coeffs().determinant(); }

QuadraticForm compose_linear(const QuadraticForm& q, const Matrix& s) {
  if (s.rows() != q.dim() || s.cols() != q.dim())
    throw std::invalid_argument("linear map must be 2n x 2n");
  if (std::abs(s.determinant()) < 1e-14)
    throw std::invalid_argument("linear map must be invertible");
  return QuadraticForm(q.half_dim(), (s.transpose() * q.coeffs() * s).eval());
}

Matrix random_symplectic(int n, CounterRng& rng) {
  Matrix sym(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i; j < 2 * n; ++j) sym(i, j) = sym(j, i) = rng.uniform(-0.5, 0.5);
  const Matrix gen = standard_symplectic_matrix(n) * sym;
  return gen.exp();
}

Scalar cutoff_phi(Scalar s) {
  const Scalar u = 2 * (std::abs(s) - 0.5);
  if (u <= 0) return 0;
  if (u >= 1) return s;
  const Scalar e0 = std::exp(-1 / u);
  const Scalar e1 = std::exp(-1 / (1 - u));
  return s * e0 / (e0 + e1);
}

}  // namespace rif
