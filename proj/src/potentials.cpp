#include "skelpot/potentials.hpp"

#include <algorithm>

namespace skelpot {

SubdomainPotentials::SubdomainPotentials(const SubdomainForms& forms, Frequency s,
                                         SolverOptions options)
    : forms_(&forms), s_(s), solver_(assemble_ell(forms, s).matrix, s.rotation(), options) {}

ConformingField SubdomainPotentials::newton(const CVector& load) const {
  if (load.size() != space().conforming().size()) throw SpaceError("load has wrong length");
  return {solver_.solve(load)};
}

ConformingField SubdomainPotentials::single_layer(const NeumannTrace& phi) const {
  return {solver_.solve(trace_rhs(*forms_, phi, s_))};
}

BrokenField SubdomainPotentials::double_layer(const DirichletTrace& psi) const {
  check_trace(space().trace(), psi);
  // Zero extension of s^{-1/2} psi onto the plus copies of Gamma_j.
  BrokenField lift{subdomain(), s_, CVector::Zero(space().conforming().size()), psi.values};
  return double_layer(lift);
}

BrokenField SubdomainPotentials::double_layer(const BrokenField& lifting) const {
  if (lifting.j != subdomain()) throw SpaceError("lifting belongs to another subdomain");
  const BrokenSpace& sp = space();
  const CVector minus = side_values(sp, lifting, Side::Minus);
  const CVector plus = side_values(sp, lifting, Side::Plus);
  const CVector applied =
      forms_->apply_side(Side::Minus, s_, minus) + forms_->apply_side(Side::Plus, s_, plus);
  const CVector correction = solver_.solve(CVector(-sp.conforming().from_vertices(applied)));
  return {subdomain(), s_, lifting.base + correction, lifting.scaled_jump};
}

BrokenField SubdomainPotentials::green(const CauchyData& data) const {
  const ConformingField single = single_layer(data.neumann);
  const BrokenField dbl = double_layer(data.dirichlet);
  return {subdomain(), s_, single.values - dbl.base, -dbl.scaled_jump};
}

JumpsAndMeans jump_and_mean(const SubdomainForms& forms, const BrokenField& u) {
  const BrokenSpace& sp = forms.space();
  const int j = sp.subdomain();
  const NeumannTrace gm = weak_conormal(forms, u, Side::Minus);
  const NeumannTrace gp = weak_conormal(forms, u, Side::Plus);
  const DirichletTrace dm = dirichlet_trace(sp, u, Side::Minus);
  JumpsAndMeans out;
  out.jump_dirichlet = {j, u.scaled_jump};
  out.mean_dirichlet = {j, dm.values + 0.5 * u.scaled_jump};
  out.jump_neumann = {j, -gp.values - gm.values};
  out.mean_neumann = {j, 0.5 * (gm.values - gp.values)};
  return out;
}

CauchyData interior_cauchy_data(const SubdomainForms& forms, const BrokenField& u) {
  return {dirichlet_trace(forms.space(), u, Side::Minus), weak_conormal(forms, u, Side::Minus)};
}

BrokenField side_solution(const SubdomainForms& forms, Side side, const DirichletTrace& data,
                          Frequency s) {
  const BrokenSpace& sp = forms.space();
  const TraceSpace& tr = sp.trace();
  check_trace(tr, data);
  const PartitionedMesh& mesh = sp.mesh();
  CVector vals = CVector::Zero(mesh.num_vertices());
  for (int q = 0; q < tr.size(); ++q) vals(tr.nodes()[q]) = s.inv_sqrt() * data.values(q);
  const auto& inner = sp.interior_vertices(side);
  if (!inner.empty()) {
    std::vector<int> pos(mesh.num_vertices(), -1);
    for (int i = 0; i < static_cast<int>(inner.size()); ++i) pos[inner[i]] = i;
    const RSparse& k = forms.stiffness(side);
    const RSparse& m = forms.mass(side);
    std::vector<Eigen::Triplet<Complex>> trips;
    CVector rhs = CVector::Zero(inner.size());
    auto visit = [&](const RSparse& a, Complex factor) {
      for (int col = 0; col < a.outerSize(); ++col)
        for (RSparse::InnerIterator it(a, col); it; ++it) {
          const int r = pos[it.row()];
          if (r < 0) continue;
          if (pos[col] >= 0)
            trips.emplace_back(r, pos[col], factor * it.value());
          else
            rhs(r) -= factor * it.value() * vals(col);
        }
    };
    visit(k, 1.0);
    visit(m, s.square());
    CSparse a(inner.size(), inner.size());
    a.setFromTriplets(trips.begin(), trips.end());
    const CVector x = LinearSolver(a, s.rotation()).solve(rhs);
    for (int i = 0; i < static_cast<int>(inner.size()); ++i) vals(inner[i]) = x(i);
  }
  const CVector zero = CVector::Zero(mesh.num_vertices());
  return side == Side::Minus ? from_side_values(sp, vals, zero, s)
                             : from_side_values(sp, zero, vals, s);
}

Real dual_norm(const BrokenSpace& space, const CVector& load, Frequency s) {
  const ConformingSpace& cs = space.conforming();
  if (load.size() != cs.size()) throw SpaceError("load has wrong length");
  const Real w = s.abs() * s.abs();
  RSparse vertex = space.reference_stiffness(Side::Minus) + space.reference_stiffness(Side::Plus) +
                   w * (space.reference_mass(Side::Minus) + space.reference_mass(Side::Plus));
  std::vector<Eigen::Triplet<Real>> trips;
  for (int col = 0; col < vertex.outerSize(); ++col)
    for (RSparse::InnerIterator it(vertex, col); it; ++it) {
      const int r = cs.dof(static_cast<int>(it.row())), c = cs.dof(col);
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  RSparse g(cs.size(), cs.size());
  g.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<RSparse> ldlt(g);
  const RVector re = ldlt.solve(load.real().eval());
  const RVector im = ldlt.solve(load.imag().eval());
  return std::sqrt(std::max(0.0, load.real().dot(re) + load.imag().dot(im)));
}

PartialJump partial_jump(const TraceSpace& trace_j, const CauchyData& data_j,
                         const TraceSpace& trace_k, const CauchyData& data_k) {
  check_trace(trace_j, data_j.dirichlet);
  check_trace(trace_j, data_j.neumann);
  check_trace(trace_k, data_k.dirichlet);
  check_trace(trace_k, data_k.neumann);
  PartialJump out;
  const std::vector<int> local = trace_j.interface_nodes(trace_k.subdomain());
  out.dirichlet.resize(local.size());
  out.neumann.resize(local.size());
  for (int i = 0; i < static_cast<int>(local.size()); ++i) {
    const int v = trace_j.nodes()[local[i]];
    const int qk = trace_k.local(v);
    if (qk < 0) throw InternalError("interface node missing from the neighbouring trace space");
    out.vertices.push_back(v);
    out.dirichlet(i) = data_j.dirichlet.values(local[i]) - data_k.dirichlet.values(qk);
    out.neumann(i) = -data_j.neumann.values(local[i]) - data_k.neumann.values(qk);
  }
  return out;
}

}  // namespace skelpot
