#include "skelpot/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace skelpot {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  RMatrix jac = RMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Real b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(jac);
  QuadratureRule rule;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const Real t = 0.5 * (eig.eigenvalues()(i) + 1.0);
    rule.points(i, 0) = 1.0 - t;
    rule.points(i, 1) = t;
    const Real v = eig.eigenvectors()(0, i);
    rule.weights(i) = v * v;  // sums to 1
  }
  return rule;
}

QuadratureRule simplex_rule(int dim, int order) {
  if (dim < 0 || dim > 3) throw DomainError("simplex rules exist for dimensions 0 to 3");
  if (order < 0) throw DomainError("quadrature order must be non-negative");
  QuadratureRule rule;
  if (dim == 0) {
    rule.points = RMatrix::Ones(1, 1);
    rule.weights = RVector::Ones(1);
    return rule;
  }
  // Each collapse raises the degree by one; n points integrate degree 2n-1.
  const int n = (order + dim) / 2 + 1;
  const QuadratureRule g = gauss_legendre(n);
  Real factorial = 1.0;
  for (int k = 2; k <= dim; ++k) factorial *= k;
  int total = 1;
  for (int k = 0; k < dim; ++k) total *= n;
  rule.points.resize(total, dim + 1);
  rule.weights.resize(total);
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    RVector u(dim);
    Real w = factorial;
    for (int k = 0; k < dim; ++k) {
      const int i = rest % n;
      rest /= n;
      u(k) = g.points(i, 1);
      w *= g.weights(i);
    }
    // x_k = u_k * prod_{l<k} (1 - u_l); Jacobian prod_l (1 - u_l)^{dim-1-l}.
    Real remaining = 1.0;
    for (int k = 0; k < dim; ++k) {
      rule.points(idx, k + 1) = u(k) * remaining;
      w *= remaining;
      remaining *= 1.0 - u(k);
    }
    rule.points(idx, 0) = remaining;
    rule.weights(idx) = w;
  }
  return rule;
}

}  // namespace skelpot
