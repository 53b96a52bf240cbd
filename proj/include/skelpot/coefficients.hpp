#ifndef SKELPOT_COEFFICIENTS_HPP
#define SKELPOT_COEFFICIENTS_HPP

#include <functional>
#include <map>
#include <vector>

#include "skelpot/geometry.hpp"
#include "skelpot/types.hpp"

namespace skelpot {

// Cellwise constant diffusion tensor A (symmetric positive definite) and
// positive reaction weight p.
class CoefficientField {
 public:
  CoefficientField(const PartitionedMesh& mesh, std::vector<RMatrix> tensors, RVector weights);

  static CoefficientField identity(const PartitionedMesh& mesh);

  int num_cells() const { return static_cast<int>(weights_.size()); }
  const RMatrix& A(int cell) const { return tensors_[cell]; }
  Real p(int cell) const { return weights_(cell); }

 private:
  std::vector<RMatrix> tensors_;
  RVector weights_;
};

using TensorFunction = std::function<RMatrix(const RVector&)>;
using ScalarFunction = std::function<Real(const RVector&)>;

namespace fields {
ScalarFunction constant(Real value);
// a0 at the origin rising linearly to a1 at radius r0, constant beyond.
ScalarFunction radial_ramp(Real a0, Real a1, Real r0);
// Values a and b alternating on an n^d grid of cubes covering [-R,R]^d.
ScalarFunction checkerboard(Real a, Real b, int n, Real half_width);
TensorFunction isotropic(ScalarFunction f, int dim);
TensorFunction constant_tensor(RMatrix A);
}  // namespace fields

struct RegionCoefficient {
  TensorFunction A;
  ScalarFunction p;
};

// Evaluates per-tag analytic fields at cell barycenters. Tags missing from
// `regions` use `fallback`.
CoefficientField sample_coefficients(const PartitionedMesh& mesh,
                                     const std::map<int, RegionCoefficient>& regions,
                                     const RegionCoefficient& fallback);

enum class ExtensionMode { Global, ConstantFreeze };

// Coefficients seen by the full-space potentials of subdomain j. Global keeps
// the global field; ConstantFreeze extends the (constant) values of
// subdomain j to every cell.
CoefficientField extend(const PartitionedMesh& mesh, const CoefficientField& global, int j,
                        ExtensionMode mode);

struct SpectralBounds {
  Real lower = 0.0;  // min over cells of the smallest eigenvalue of A and p
  Real upper = 0.0;  // max over cells of the largest eigenvalue of A and p
};

SpectralBounds spectral_bounds(const CoefficientField& field);

}  // namespace skelpot

#endif
