#ifndef SKELPOT_ASSEMBLY_HPP
#define SKELPOT_ASSEMBLY_HPP

#include "skelpot/coefficients.hpp"
#include "skelpot/femspace.hpp"
#include "skelpot/types.hpp"

namespace skelpot {

// P1 stiffness with tensor A and mass with weight p over the selected cells,
// indexed by mesh vertex. Cells are visited in ascending order.
RSparse assemble_stiffness(const PartitionedMesh& mesh, const CoefficientField& coeffs,
                           const CellFilter& cells = nullptr);
RSparse assemble_mass(const PartitionedMesh& mesh, const CoefficientField& coeffs,
                      const CellFilter& cells = nullptr);

// The form l_j(s)(u,v) = (A grad u, grad v) + s^2 (p u, v) for extended
// coefficients of subdomain j, split by side of Gamma_j. Only the affine
// dependence on s^2 is stored, so evaluating at a new s is cheap.
class SubdomainForms {
 public:
  SubdomainForms(const BrokenSpace& space, const CoefficientField& extended);

  const BrokenSpace& space() const { return *space_; }
  int subdomain() const { return space_->subdomain(); }
  const CoefficientField& coefficients() const { return coeffs_; }
  SpectralBounds bounds() const { return bounds_; }

  // Side matrices indexed by mesh vertex.
  const RSparse& stiffness(Side side) const { return k_[side == Side::Minus ? 0 : 1]; }
  const RSparse& mass(Side side) const { return m_[side == Side::Minus ? 0 : 1]; }
  // (K_side + s^2 P_side) applied to vertex values.
  CVector apply_side(Side side, Frequency s, const CVector& vertex_values) const;

  // Restrictions of K_- + K_+ and P_- + P_+ to the conforming dofs.
  const RSparse& conforming_stiffness() const { return kc_; }
  const RSparse& conforming_mass() const { return mc_; }

 private:
  const BrokenSpace* space_;
  CoefficientField coeffs_;
  SpectralBounds bounds_;
  RSparse k_[2], m_[2];
  RSparse kc_, mc_;
};

// Complex symmetric matrix of l_j(s) on the conforming space.
struct FormMatrix {
  int j = 0;
  Frequency s{1.0};
  CSparse matrix;
};

FormMatrix assemble_ell(const SubdomainForms& forms, Frequency s);

// Load vector w -> <phi, gamma_D(s) w> = s^{1/2} <phi, w|Gamma_j>.
CVector trace_rhs(const SubdomainForms& forms, const NeumannTrace& phi, Frequency s);

// Frequency-scaled conormal derivative of the side-sigma restriction of u,
// outward with respect to that side, defined variationally by
// <g, chi> = s^{-1/2} a_sigma(u, Z_sigma chi) for every trace hat chi.
// Warns when u does not satisfy the homogeneous equation inside the side.
NeumannTrace weak_conormal(const SubdomainForms& forms, const BrokenField& u, Side side);

// Side-sigma residual at vertices away from Gamma_j, relative to the size of
// the terms summed on both sides.
Real interior_residual(const SubdomainForms& forms, const BrokenField& u, Side side);

}  // namespace skelpot

#endif
