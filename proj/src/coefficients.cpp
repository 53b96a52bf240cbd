#include "skelpot/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace skelpot {

CoefficientField::CoefficientField(const PartitionedMesh& mesh, std::vector<RMatrix> tensors,
                                   RVector weights)
    : tensors_(std::move(tensors)), weights_(std::move(weights)) {
  const int d = mesh.dim();
  if (static_cast<int>(tensors_.size()) != mesh.num_cells() || weights_.size() != mesh.num_cells())
    throw DomainError("coefficient arrays must have one entry per cell");
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const RMatrix& a = tensors_[c];
    if (a.rows() != d || a.cols() != d)
      throw DomainError("diffusion tensor on cell " + std::to_string(c) + " has wrong shape");
    if (!a.allFinite() || !std::isfinite(weights_(c)))
      throw DomainError("non-finite coefficient on cell " + std::to_string(c));
    if ((a - a.transpose()).norm() > 1e-12 * a.norm())
      throw DomainError("diffusion tensor on cell " + std::to_string(c) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(a, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0))
      throw DomainError("diffusion tensor on cell " + std::to_string(c) +
                        " is not positive definite");
    if (!(weights_(c) > 0.0))
      throw DomainError("reaction weight on cell " + std::to_string(c) + " is not positive");
  }
}

CoefficientField CoefficientField::identity(const PartitionedMesh& mesh) {
  return CoefficientField(mesh, std::vector<RMatrix>(mesh.num_cells(), RMatrix::Identity(mesh.dim(), mesh.dim())),
                          RVector::Ones(mesh.num_cells()));
}

namespace fields {

ScalarFunction constant(Real value) {
  return [value](const RVector&) { return value; };
}

ScalarFunction radial_ramp(Real a0, Real a1, Real r0) {
  if (!(r0 > 0.0)) throw DomainError("radial ramp radius must be positive");
  return [=](const RVector& x) { return a0 + (a1 - a0) * std::min(x.norm() / r0, 1.0); };
}

ScalarFunction checkerboard(Real a, Real b, int n, Real half_width) {
  if (n < 1) throw DomainError("checkerboard size must be positive");
  return [=](const RVector& x) {
    int parity = 0;
    for (int i = 0; i < x.size(); ++i) {
      int cell = static_cast<int>(std::floor((x(i) + half_width) / (2.0 * half_width) * n));
      parity += std::clamp(cell, 0, n - 1);
    }
    return parity % 2 == 0 ? a : b;
  };
}

TensorFunction isotropic(ScalarFunction f, int dim) {
  return [f = std::move(f), dim](const RVector& x) -> RMatrix {
    return f(x) * RMatrix::Identity(dim, dim);
  };
}

TensorFunction constant_tensor(RMatrix A) {
  return [A = std::move(A)](const RVector&) { return A; };
}

}  // namespace fields

CoefficientField sample_coefficients(const PartitionedMesh& mesh,
                                     const std::map<int, RegionCoefficient>& regions,
                                     const RegionCoefficient& fallback) {
  std::vector<RMatrix> tensors(mesh.num_cells());
  RVector weights(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto it = regions.find(mesh.tag(c));
    const RegionCoefficient& rc = it == regions.end() ? fallback : it->second;
    const RVector b = mesh.cell_barycenter(c);
    tensors[c] = rc.A(b);
    weights(c) = rc.p(b);
  }
  return CoefficientField(mesh, std::move(tensors), std::move(weights));
}

CoefficientField extend(const PartitionedMesh& mesh, const CoefficientField& global, int j,
                        ExtensionMode mode) {
  if (mode == ExtensionMode::Global) return global;
  int first = -1;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.tag(c) != j) continue;
    if (first < 0) {
      first = c;
      continue;
    }
    const bool same_a = (global.A(c) - global.A(first)).norm() <= 1e-12 * global.A(first).norm();
    const bool same_p = std::abs(global.p(c) - global.p(first)) <= 1e-12 * global.p(first);
    if (!same_a || !same_p)
      throw DomainError("ConstantFreeze extension requires constant coefficients on subdomain " +
                        std::to_string(j));
  }
  if (first < 0) throw DomainError("subdomain tag " + std::to_string(j) + " has no cells");
  return CoefficientField(mesh, std::vector<RMatrix>(mesh.num_cells(), global.A(first)),
                          RVector::Constant(mesh.num_cells(), global.p(first)));
}

SpectralBounds spectral_bounds(const CoefficientField& field) {
  SpectralBounds b{std::numeric_limits<Real>::max(), 0.0};
  for (int c = 0; c < field.num_cells(); ++c) {
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(field.A(c), Eigen::EigenvaluesOnly);
    b.lower = std::min({b.lower, eig.eigenvalues().minCoeff(), field.p(c)});
    b.upper = std::max({b.upper, eig.eigenvalues().maxCoeff(), field.p(c)});
  }
  return b;
}

}  // namespace skelpot
