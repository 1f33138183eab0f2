#pragma once

#include "rif/rng.hpp"
#include "rif/types.hpp"

namespace rif {

// Quadratic form on a 2n-dimensional symplectic vector space written in a
// symplectic basis (x_1..x_n, y_1..y_n):
//   Q(z) = z^T A z  with A symmetric.
class QuadraticForm {
 public:
  QuadraticForm(int n, Matrix coeffs);

  static QuadraticForm zero(int n);
  // Q = sum q_nu x_nu y_nu
  static QuadraticForm diagonal_type(const Vector& q);

  int half_dim() const { return n_; }
  int dim() const { return 2 * n_; }
  const Matrix& coeffs() const { return a_; }
  Scalar operator()(const Vector& z) const { return z.dot(a_ * z); }

 private:
  int n_;
  Matrix a_;
};

// Standard symplectic matrix J with J(x, y) = (y, -x) block structure.
Matrix standard_symplectic_matrix(int n);

// {Q, R}: derivative of R along the symplectic gradient of Q. Again a
// quadratic form; bilinear, antisymmetric, satisfies the Jacobi identity.
QuadraticForm poisson_bracket(const QuadraticForm& q, const QuadraticForm& r);

Index monomial_basis_size(int n);  // n(2n+1)

// Matrix of the adjoint action R -> {Q, R} on the monomial basis
// z_l z_m (l <= m), ordered lexicographically.
Matrix adjoint_matrix(const QuadraticForm& q);

// Trace of the squared adjoint action. Invariant under symplectic changes of
// basis but not under all unimodular ones.
Scalar t_invariant(const QuadraticForm& q);

// Determinant of the coefficient matrix; picks up det(S)^2 under composition
// with S, hence is invariant under the unimodular group.
Scalar det_invariant(const QuadraticForm& q);

// Q composed with the linear map S: coefficients S^T A S.
QuadraticForm compose_linear(const QuadraticForm& q, const Matrix& s);

// Random symplectic matrix exp(J * sym) with a bounded random symmetric sym.
Matrix random_symplectic(int n, CounterRng& rng);

// Smooth odd cutoff: exactly 0 on |s| <= 1/2, exactly s on |s| >= 1,
// monotone interpolation by the standard exponential step in between.
Scalar cutoff_phi(Scalar s);

}  // namespace rif
