#ifndef SKELPOT_QUADRATURE_HPP
#define SKELPOT_QUADRATURE_HPP

#include "skelpot/types.hpp"

namespace skelpot {

// Rule on the reference d-simplex in barycentric coordinates. Weights sum
// to 1, so integrals are obtained by multiplying with the simplex measure.
struct QuadratureRule {
  RMatrix points;  // n x (d+1), rows sum to 1
  RVector weights;
  int size() const { return static_cast<int>(weights.size()); }
};

// Gauss-Legendre nodes and weights on [0, 1].
QuadratureRule gauss_legendre(int n);

// Collapsed Gauss rule exact for polynomials of total degree <= order on
// simplices of dimension 0 to 3.
QuadratureRule simplex_rule(int dim, int order);

}  // namespace skelpot

#endif
