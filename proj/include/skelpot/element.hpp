#ifndef SKELPOT_ELEMENT_HPP
#define SKELPOT_ELEMENT_HPP

#include "skelpot/types.hpp"

namespace skelpot {

// P1 stiffness volume * grad_a^T A grad_b. Only the upper triangle is
// computed and mirrored, so the result is exactly symmetric.
inline RMatrix local_stiffness(const RMatrix& grads, Real volume, const RMatrix& A) {
  const int n = static_cast<int>(grads.rows());
  RMatrix k(n, n);
  const RMatrix ag = grads * A;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      k(a, b) = volume * ag.row(a).dot(grads.row(b));
      k(b, a) = k(a, b);
    }
  return k;
}

// Exact P1 mass on a simplex with n_vertices vertices and the given measure.
inline RMatrix local_mass(int n_vertices, Real measure, Real weight = 1.0) {
  const Real off = weight * measure / (n_vertices * (n_vertices + 1.0));
  RMatrix m = RMatrix::Constant(n_vertices, n_vertices, off);
  m.diagonal().array() *= 2.0;
  return m;
}

}  // namespace skelpot

#endif
