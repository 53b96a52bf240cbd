#include "skelpot/femspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "skelpot/element.hpp"

namespace skelpot {

namespace {

int side_index(Side s) { return s == Side::Minus ? 0 : 1; }

// Energy of one cell for identity coefficients: |grad v|^2 + w |v|^2.
Real cell_energy(const PartitionedMesh& mesh, int cell, const CVector& local, Real mass_weight) {
  const int d = mesh.dim();
  const RMatrix grads = barycentric_gradients(mesh, cell);
  const Real vol = mesh.cell_volume(cell);
  const Eigen::VectorXcd grad = grads.transpose().cast<Complex>() * local;
  const RMatrix m = local_mass(d + 1, vol);
  const Real l2 = (local.adjoint() * m.cast<Complex>() * local)(0, 0).real();
  return vol * grad.squaredNorm() + mass_weight * l2;
}

CVector gather(const PartitionedMesh& mesh, int cell, const CVector& vertex_values) {
  CVector local(mesh.dim() + 1);
  for (int i = 0; i <= mesh.dim(); ++i) local(i) = vertex_values(mesh.cells()(cell, i));
  return local;
}

}  // namespace

ConformingSpace::ConformingSpace(const PartitionedMesh& mesh) : mesh_(&mesh) {
  dof_.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_pinned(v)) continue;
    dof_[v] = static_cast<int>(free_.size());
    free_.push_back(v);
  }
}

CVector ConformingSpace::to_vertices(const CVector& dofs) const {
  if (dofs.size() != size()) throw SpaceError("field does not belong to the conforming space");
  CVector out = CVector::Zero(mesh_->num_vertices());
  for (int i = 0; i < size(); ++i) out(free_[i]) = dofs(i);
  return out;
}

CVector ConformingSpace::from_vertices(const CVector& values) const {
  if (values.size() != mesh_->num_vertices()) throw SpaceError("expected one value per vertex");
  CVector out(size());
  for (int i = 0; i < size(); ++i) out(i) = values(free_[i]);
  return out;
}

TraceSpace::TraceSpace(const PartitionedMesh& mesh, const SkeletonIndex& skeleton, int j)
    : mesh_(&mesh), skeleton_(&skeleton), j_(j), facets_(skeleton.boundary_of(j)) {
  std::set<int> nodes;
  for (int sf : facets_)
    for (int v : mesh.facets()[skeleton.facets()[sf].facet].vertices)
      if (!mesh.is_pinned(v)) nodes.insert(v);
  nodes_.assign(nodes.begin(), nodes.end());
  local_.assign(mesh.num_vertices(), -1);
  for (int i = 0; i < size(); ++i) local_[nodes_[i]] = i;

  on_dirichlet_.assign(size(), 0);
  on_neumann_.assign(size(), 0);
  std::vector<Eigen::Triplet<Real>> trips;
  for (int sf : facets_) {
    const SkeletonFacet& s = skeleton.facets()[sf];
    const Facet& f = mesh.facets()[s.facet];
    const int nv = static_cast<int>(f.vertices.size());
    const RMatrix m = local_mass(nv, mesh.facet_measure(s.facet));
    for (int a = 0; a < nv; ++a) {
      const int la = local_[f.vertices[a]];
      if (la < 0) continue;
      if (s.k == 0) {
        auto& mask = f.boundary == BoundaryKind::Dirichlet ? on_dirichlet_ : on_neumann_;
        mask[la] = 1;
      }
      for (int b = 0; b < nv; ++b) {
        const int lb = local_[f.vertices[b]];
        if (lb >= 0) trips.emplace_back(la, lb, m(a, b));
      }
    }
  }
  mass_.resize(size(), size());
  mass_.setFromTriplets(trips.begin(), trips.end());
  if (size() > 0) {
    mass_solver_.compute(mass_);
    if (mass_solver_.info() != Eigen::Success)
      throw InternalError("facet mass matrix of Gamma_" + std::to_string(j) + " is singular");
  }
}

int TraceSpace::local(int vertex) const { return local_.at(vertex); }

CVector TraceSpace::solve_mass(const CVector& rhs) const {
  if (rhs.size() != size()) throw SpaceError("trace vector has wrong length");
  if (size() == 0) return rhs;
  CVector out(size());
  out.real() = mass_solver_.solve(rhs.real().eval());
  out.imag() = mass_solver_.solve(rhs.imag().eval());
  return out;
}

Complex TraceSpace::pair(const CVector& a, const CVector& b) const {
  if (a.size() != size() || b.size() != size()) throw SpaceError("trace vector has wrong length");
  return a.transpose() * (mass_.cast<Complex>() * b);
}

std::vector<int> TraceSpace::interface_nodes(int k) const {
  std::set<int> out;
  for (int sf : facets_) {
    const SkeletonFacet& s = skeleton_->facets()[sf];
    const int other = s.j == j_ ? s.k : s.j;
    if (other != k) continue;
    for (int v : mesh_->facets()[s.facet].vertices)
      if (local_[v] >= 0) out.insert(local_[v]);
  }
  return {out.begin(), out.end()};
}

BrokenSpace::BrokenSpace(const ConformingSpace& conforming, const TraceSpace& trace)
    : conforming_(&conforming), trace_(&trace) {
  const PartitionedMesh& m = mesh();
  const int d = m.dim();
  std::vector<char> touches[2];
  touches[0].assign(m.num_vertices(), 0);
  touches[1].assign(m.num_vertices(), 0);
  std::vector<Eigen::Triplet<Real>> tk[2], tm[2];
  const RMatrix eye = RMatrix::Identity(d, d);
  for (int c = 0; c < m.num_cells(); ++c) {
    const int s = side_index(side_of_cell(c));
    const Real vol = m.cell_volume(c);
    const RMatrix k = local_stiffness(barycentric_gradients(m, c), vol, eye);
    const RMatrix ms = local_mass(d + 1, vol);
    for (int a = 0; a <= d; ++a) {
      const int va = m.cells()(c, a);
      touches[s][va] = 1;
      for (int b = 0; b <= d; ++b) {
        tk[s].emplace_back(va, m.cells()(c, b), k(a, b));
        tm[s].emplace_back(va, m.cells()(c, b), ms(a, b));
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    ref_k_[s].resize(m.num_vertices(), m.num_vertices());
    ref_k_[s].setFromTriplets(tk[s].begin(), tk[s].end());
    ref_m_[s].resize(m.num_vertices(), m.num_vertices());
    ref_m_[s].setFromTriplets(tm[s].begin(), tm[s].end());
    for (int v = 0; v < m.num_vertices(); ++v)
      if (touches[s][v] && !m.is_pinned(v) && trace.local(v) < 0) interior_[s].push_back(v);
  }
}

Discretization::Discretization(PartitionedMesh mesh)
    : mesh_(std::make_unique<PartitionedMesh>(std::move(mesh))),
      skeleton_(std::make_unique<SkeletonIndex>(*mesh_)),
      conforming_(std::make_unique<ConformingSpace>(*mesh_)) {
  for (int j : mesh_->subdomains()) {
    traces_.push_back(std::make_unique<TraceSpace>(*mesh_, *skeleton_, j));
    broken_.push_back(std::make_unique<BrokenSpace>(*conforming_, *traces_.back()));
  }
}

int Discretization::slot(int j) const {
  const auto& subs = mesh_->subdomains();
  auto it = std::lower_bound(subs.begin(), subs.end(), j);
  if (it == subs.end() || *it != j) throw DomainError("unknown subdomain tag " + std::to_string(j));
  return static_cast<int>(it - subs.begin());
}

const TraceSpace& Discretization::trace(int j) const { return *traces_[slot(j)]; }
const BrokenSpace& Discretization::broken(int j) const { return *broken_[slot(j)]; }

namespace {

void check_broken(const BrokenSpace& space, const BrokenField& u) {
  if (u.j != space.subdomain() || u.base.size() != space.conforming().size() ||
      u.scaled_jump.size() != space.trace().size())
    throw SpaceError("field does not belong to the broken space of Gamma_" +
                     std::to_string(space.subdomain()));
}

}  // namespace

BrokenField as_broken(const BrokenSpace& space, const ConformingField& u, Frequency s) {
  if (u.values.size() != space.conforming().size())
    throw SpaceError("field does not belong to the conforming space");
  return {space.subdomain(), s, u.values, CVector::Zero(space.trace().size())};
}

CVector side_values(const BrokenSpace& space, const BrokenField& u, Side side) {
  check_broken(space, u);
  CVector v = space.conforming().to_vertices(u.base);
  if (side == Side::Plus) {
    const auto& nodes = space.trace().nodes();
    for (int q = 0; q < static_cast<int>(nodes.size()); ++q)
      v(nodes[q]) += u.scaled_jump(q) * u.s.inv_sqrt();
  }
  for (int w : space.interior_vertices(side == Side::Minus ? Side::Plus : Side::Minus)) v(w) = 0.0;
  return v;
}

BrokenField from_side_values(const BrokenSpace& space, const CVector& minus, const CVector& plus,
                             Frequency s) {
  const PartitionedMesh& m = space.mesh();
  if (minus.size() != m.num_vertices() || plus.size() != m.num_vertices())
    throw SpaceError("expected one value per vertex on each side");
  CVector merged = minus;
  for (int w : space.interior_vertices(Side::Plus)) merged(w) = plus(w);
  BrokenField out{space.subdomain(), s, space.conforming().from_vertices(merged),
                  CVector(space.trace().size())};
  const auto& nodes = space.trace().nodes();
  for (int q = 0; q < static_cast<int>(nodes.size()); ++q)
    out.scaled_jump(q) = s.sqrt() * (plus(nodes[q]) - minus(nodes[q]));
  return out;
}

BrokenField restrict_to_side(const BrokenSpace& space, const ConformingField& u, Side side,
                             Frequency s) {
  const CVector v = space.conforming().to_vertices(u.values);
  const CVector zero = CVector::Zero(v.size());
  return side == Side::Minus ? from_side_values(space, v, zero, s)
                             : from_side_values(space, zero, v, s);
}

Real freq_norm(const ConformingSpace& space, const ConformingField& v, Frequency s,
               const CellFilter& cells) {
  const PartitionedMesh& m = space.mesh();
  const CVector vals = space.to_vertices(v.values);
  const Real w = s.abs() * s.abs();
  Real total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c)
    if (!cells || cells(c)) total += cell_energy(m, c, gather(m, c, vals), w);
  return std::sqrt(total);
}

Real freq_norm(const BrokenSpace& space, const BrokenField& v, const CellFilter& cells) {
  const PartitionedMesh& m = space.mesh();
  const CVector minus = side_values(space, v, Side::Minus);
  const CVector plus = side_values(space, v, Side::Plus);
  const Real w = v.s.abs() * v.s.abs();
  Real total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    if (cells && !cells(c)) continue;
    const CVector& vals = space.side_of_cell(c) == Side::Minus ? minus : plus;
    total += cell_energy(m, c, gather(m, c, vals), w);
  }
  return std::sqrt(total);
}

Real l2_norm(const PartitionedMesh& mesh, const CVector& vertex_values, const CellFilter& cells) {
  if (vertex_values.size() != mesh.num_vertices()) throw SpaceError("expected one value per vertex");
  Real total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (cells && !cells(c)) continue;
    const CVector local = gather(mesh, c, vertex_values);
    const RMatrix m = local_mass(mesh.dim() + 1, mesh.cell_volume(c));
    total += (local.adjoint() * m.cast<Complex>() * local)(0, 0).real();
  }
  return std::sqrt(total);
}

DirichletTrace dirichlet_trace(const BrokenSpace& space, const BrokenField& u, Side side) {
  const CVector v = side_values(space, u, side);
  const auto& nodes = space.trace().nodes();
  DirichletTrace t{space.subdomain(), CVector(nodes.size())};
  for (int q = 0; q < static_cast<int>(nodes.size()); ++q) t.values(q) = u.s.sqrt() * v(nodes[q]);
  return t;
}

DirichletTrace dirichlet_trace(const BrokenSpace& space, const ConformingField& u, Frequency s) {
  const CVector v = space.conforming().to_vertices(u.values);
  const auto& nodes = space.trace().nodes();
  DirichletTrace t{space.subdomain(), CVector(nodes.size())};
  for (int q = 0; q < static_cast<int>(nodes.size()); ++q) t.values(q) = s.sqrt() * v(nodes[q]);
  return t;
}

BrokenField nodal_zero_extension(const BrokenSpace& space, const CVector& nodal, Side side,
                                 Frequency s) {
  const TraceSpace& tr = space.trace();
  if (nodal.size() != tr.size()) throw SpaceError("trace vector has wrong length");
  BrokenField out{space.subdomain(), s, CVector::Zero(space.conforming().size()),
                  CVector::Zero(tr.size())};
  if (side == Side::Plus) {
    out.scaled_jump = s.sqrt() * nodal;
    return out;
  }
  for (int q = 0; q < tr.size(); ++q) out.base(space.conforming().dof(tr.nodes()[q])) = nodal(q);
  out.scaled_jump = -s.sqrt() * nodal;
  return out;
}

ConformingField lifting_E(const BrokenSpace& space, const DirichletTrace& psi, Frequency s) {
  check_trace(space.trace(), psi);
  const PartitionedMesh& m = space.mesh();
  const TraceSpace& tr = space.trace();
  CVector vals = CVector::Zero(m.num_vertices());
  for (int q = 0; q < tr.size(); ++q) vals(tr.nodes()[q]) = s.inv_sqrt() * psi.values(q);
  const Real w = s.abs() * s.abs();
  for (Side side : {Side::Minus, Side::Plus}) {
    const auto& inner = space.interior_vertices(side);
    if (inner.empty()) continue;
    std::vector<int> pos(m.num_vertices(), -1);
    for (int i = 0; i < static_cast<int>(inner.size()); ++i) pos[inner[i]] = i;
    const RSparse a = space.reference_stiffness(side) + w * space.reference_mass(side);
    std::vector<Eigen::Triplet<Real>> trips;
    CVector rhs = CVector::Zero(inner.size());
    for (int col = 0; col < a.outerSize(); ++col)
      for (RSparse::InnerIterator it(a, col); it; ++it) {
        const int r = pos[it.row()];
        if (r < 0) continue;
        if (pos[col] >= 0)
          trips.emplace_back(r, pos[col], it.value());
        else
          rhs(r) -= it.value() * vals(col);
      }
    RSparse inner_a(inner.size(), inner.size());
    inner_a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<RSparse> solver(inner_a);
    if (solver.info() != Eigen::Success) throw InternalError("screened lifting matrix is singular");
    RVector re = solver.solve(rhs.real().eval());
    RVector im = solver.solve(rhs.imag().eval());
    for (int i = 0; i < static_cast<int>(inner.size()); ++i) vals(inner[i]) = Complex(re(i), im(i));
  }
  return {space.conforming().from_vertices(vals)};
}

void check_trace(const TraceSpace& space, const DirichletTrace& t) {
  if (t.j != space.subdomain() || t.values.size() != space.size())
    throw SpaceError("Dirichlet trace does not belong to Gamma_" + std::to_string(space.subdomain()));
}

void check_trace(const TraceSpace& space, const NeumannTrace& t) {
  if (t.j != space.subdomain() || t.values.size() != space.size())
    throw SpaceError("Neumann trace does not belong to Gamma_" + std::to_string(space.subdomain()));
}

void export_trace_csv(const TraceSpace& space, const CVector& values, const std::string& path) {
  if (values.size() != space.size()) throw SpaceError("trace vector has wrong length");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  const PartitionedMesh& m = space.mesh();
  out << "node_index,x,y" << (m.dim() == 3 ? ",z" : "") << ",re,im\n";
  for (int q = 0; q < space.size(); ++q) {
    const int v = space.nodes()[q];
    out << v;
    for (int i = 0; i < m.dim(); ++i) out << ',' << m.vertices()(v, i);
    out << ',' << values(q).real() << ',' << values(q).imag() << '\n';
  }
}

void export_vtk(const PartitionedMesh& mesh, const CVector& vertex_values, const std::string& path,
                const CellFilter& cells) {
  if (vertex_values.size() != mesh.num_vertices()) throw SpaceError("expected one value per vertex");
  std::vector<int> keep;
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (!cells || cells(c)) keep.push_back(c);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  const int d = mesh.dim();
  out << "# vtk DataFile Version 3.0\nskelpot field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << mesh.vertices()(v, 0) << ' ' << mesh.vertices()(v, 1) << ' '
        << (d == 3 ? mesh.vertices()(v, 2) : 0.0) << '\n';
  out << "CELLS " << keep.size() << ' ' << keep.size() * (d + 2) << '\n';
  for (int c : keep) {
    out << d + 1;
    for (int i = 0; i <= d; ++i) out << ' ' << mesh.cells()(c, i);
    out << '\n';
  }
  out << "CELL_TYPES " << keep.size() << '\n';
  for (std::size_t i = 0; i < keep.size(); ++i) out << (d == 2 ? 5 : 10) << '\n';
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "SCALARS re double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << vertex_values(v).real() << '\n';
  out << "SCALARS im double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << vertex_values(v).imag() << '\n';
}

}  // namespace skelpot
