#include "skelpot/assembly.hpp"

#include <algorithm>
#include <sstream>

#include "skelpot/element.hpp"
#include "skelpot/log.hpp"

namespace skelpot {

namespace {

template <typename Local>
RSparse assemble(const PartitionedMesh& mesh, const CellFilter& cells, Local local) {
  const int d = mesh.dim();
  std::vector<Eigen::Triplet<Real>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_cells()) * (d + 1) * (d + 1));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (cells && !cells(c)) continue;
    const RMatrix lm = local(c);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b)
        trips.emplace_back(mesh.cells()(c, a), mesh.cells()(c, b), lm(a, b));
  }
  RSparse out(mesh.num_vertices(), mesh.num_vertices());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

RSparse restrict_to_dofs(const ConformingSpace& space, const RSparse& vertex_matrix) {
  std::vector<Eigen::Triplet<Real>> trips;
  for (int col = 0; col < vertex_matrix.outerSize(); ++col) {
    const int dc = space.dof(col);
    if (dc < 0) continue;
    for (RSparse::InnerIterator it(vertex_matrix, col); it; ++it) {
      const int dr = space.dof(static_cast<int>(it.row()));
      if (dr >= 0) trips.emplace_back(dr, dc, it.value());
    }
  }
  RSparse out(space.size(), space.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

RSparse assemble_stiffness(const PartitionedMesh& mesh, const CoefficientField& coeffs,
                           const CellFilter& cells) {
  return assemble(mesh, cells, [&](int c) {
    return local_stiffness(barycentric_gradients(mesh, c), mesh.cell_volume(c), coeffs.A(c));
  });
}

RSparse assemble_mass(const PartitionedMesh& mesh, const CoefficientField& coeffs,
                      const CellFilter& cells) {
  return assemble(mesh, cells, [&](int c) {
    return local_mass(mesh.dim() + 1, mesh.cell_volume(c), coeffs.p(c));
  });
}

SubdomainForms::SubdomainForms(const BrokenSpace& space, const CoefficientField& extended)
    : space_(&space), coeffs_(extended), bounds_(spectral_bounds(extended)) {
  const PartitionedMesh& mesh = space.mesh();
  if (extended.num_cells() != mesh.num_cells())
    throw SpaceError("coefficient field does not match the mesh");
  for (Side side : {Side::Minus, Side::Plus}) {
    const int s = side == Side::Minus ? 0 : 1;
    auto on_side = [&](int c) { return space.side_of_cell(c) == side; };
    k_[s] = assemble_stiffness(mesh, coeffs_, on_side);
    m_[s] = assemble_mass(mesh, coeffs_, on_side);
  }
  kc_ = restrict_to_dofs(space.conforming(), RSparse(k_[0] + k_[1]));
  mc_ = restrict_to_dofs(space.conforming(), RSparse(m_[0] + m_[1]));
}

CVector SubdomainForms::apply_side(Side side, Frequency s, const CVector& vertex_values) const {
  return stiffness(side) * vertex_values + s.square() * (mass(side) * vertex_values);
}

FormMatrix assemble_ell(const SubdomainForms& forms, Frequency s) {
  CSparse m = forms.conforming_stiffness().cast<Complex>() +
              s.square() * forms.conforming_mass().cast<Complex>();
  m.makeCompressed();
  return {forms.subdomain(), s, std::move(m)};
}

CVector trace_rhs(const SubdomainForms& forms, const NeumannTrace& phi, Frequency s) {
  const TraceSpace& tr = forms.space().trace();
  check_trace(tr, phi);
  const CVector paired = tr.mass().cast<Complex>() * phi.values;
  const ConformingSpace& cs = forms.space().conforming();
  CVector rhs = CVector::Zero(cs.size());
  for (int q = 0; q < tr.size(); ++q) rhs(cs.dof(tr.nodes()[q])) = s.sqrt() * paired(q);
  return rhs;
}

namespace {

// Size of the terms summed by the side-sigma form applied to u.
Real term_magnitude(const SubdomainForms& forms, Side side, const BrokenField& u) {
  const RVector magnitude = side_values(forms.space(), u, side).cwiseAbs();
  return (forms.stiffness(side).cwiseAbs() * magnitude +
          std::norm(u.s.value()) * (forms.mass(side).cwiseAbs() * magnitude))
      .norm();
}

// Interior residual relative to the terms of both sides, so that roundoff in
// a side where u nearly vanishes does not count as a residual.
Real interior_residual_of(const SubdomainForms& forms, Side side, const BrokenField& u,
                          const CVector& applied) {
  Real inner = 0.0;
  for (int v : forms.space().interior_vertices(side)) inner += std::norm(applied(v));
  const Real scale =
      std::max(term_magnitude(forms, Side::Minus, u), term_magnitude(forms, Side::Plus, u));
  return scale == 0.0 ? 0.0 : std::sqrt(inner) / scale;
}

}  // namespace

NeumannTrace weak_conormal(const SubdomainForms& forms, const BrokenField& u, Side side) {
  const BrokenSpace& space = forms.space();
  const CVector values = side_values(space, u, side);
  const CVector applied = forms.apply_side(side, u.s, values);
  const Real residual = interior_residual_of(forms, side, u, applied);
  if (residual > 1e-8) {
    std::ostringstream msg;
    msg << "weak conormal on Gamma_" << space.subdomain() << " of a field that is not a discrete "
        << "homogeneous solution (relative interior residual " << residual << ")";
    warn(msg.str());
  }
  const TraceSpace& tr = space.trace();
  CVector r(tr.size());
  for (int q = 0; q < tr.size(); ++q) r(q) = applied(tr.nodes()[q]);
  return {space.subdomain(), u.s.inv_sqrt() * tr.solve_mass(r)};
}

Real interior_residual(const SubdomainForms& forms, const BrokenField& u, Side side) {
  const CVector values = side_values(forms.space(), u, side);
  return interior_residual_of(forms, side, u, forms.apply_side(side, u.s, values));
}

}  // namespace skelpot
