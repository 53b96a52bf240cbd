#include "skelpot/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "skelpot/quadrature.hpp"

namespace skelpot {

MultiTraceLayout::MultiTraceLayout(const Discretization& disc) : subdomains_(disc.subdomains()) {
  for (int j : subdomains_) {
    offsets_.push_back(size_);
    sizes_.push_back(disc.trace(j).size());
    size_ += 2 * sizes_.back();
  }
}

int MultiTraceLayout::slot(int j) const {
  auto it = std::lower_bound(subdomains_.begin(), subdomains_.end(), j);
  if (it == subdomains_.end() || *it != j) throw DomainError("unknown subdomain tag " + std::to_string(j));
  return static_cast<int>(it - subdomains_.begin());
}

CVector MultiTraceLayout::pack(const MultiTrace& m) const {
  if (static_cast<int>(m.parts.size()) != num_subdomains())
    throw SpaceError("multi-trace has the wrong number of subdomains");
  CVector v(size_);
  for (int i = 0; i < num_subdomains(); ++i) {
    const CauchyData& c = m.parts[i];
    if (c.dirichlet.j != subdomains_[i] || c.neumann.j != subdomains_[i] ||
        c.dirichlet.values.size() != sizes_[i] || c.neumann.values.size() != sizes_[i])
      throw SpaceError("multi-trace component does not match Gamma_" + std::to_string(subdomains_[i]));
    v.segment(dirichlet_offset(i), sizes_[i]) = c.dirichlet.values;
    v.segment(neumann_offset(i), sizes_[i]) = c.neumann.values;
  }
  return v;
}

MultiTrace MultiTraceLayout::unpack(const CVector& v) const {
  if (v.size() != size_) throw SpaceError("packed multi-trace has wrong length");
  MultiTrace m;
  for (int i = 0; i < num_subdomains(); ++i) {
    const int j = subdomains_[i];
    m.parts.push_back({{j, v.segment(dirichlet_offset(i), sizes_[i])},
                       {j, v.segment(neumann_offset(i), sizes_[i])}});
  }
  return m;
}

MultiTrace MultiTraceLayout::zeros() const { return unpack(CVector::Zero(size_)); }

CMatrix MultiTraceLayout::x_pairing(const Discretization& disc) const {
  CMatrix j = CMatrix::Zero(size_, size_);
  for (int i = 0; i < num_subdomains(); ++i) {
    const int n = sizes_[i];
    j.block(dirichlet_offset(i), dirichlet_offset(i), 2 * n, 2 * n) =
        x_pairing_matrix(disc.trace(subdomains_[i]));
  }
  return j;
}

Complex x_pairing(const Discretization& disc, const MultiTrace& a, const MultiTrace& b) {
  if (a.parts.size() != b.parts.size()) throw SpaceError("multi-traces do not match");
  Complex total = 0.0;
  for (std::size_t i = 0; i < a.parts.size(); ++i) {
    const TraceSpace& tr = disc.trace(a.parts[i].dirichlet.j);
    total += tr.pair(a.parts[i].dirichlet.values, b.parts[i].neumann.values) +
             tr.pair(b.parts[i].dirichlet.values, a.parts[i].neumann.values);
  }
  return total;
}

SingleTraceBasis::SingleTraceBasis(const Discretization& disc, bool with_boundary_conditions)
    : layout_(disc) {
  // Subdomain slots containing each skeleton node.
  std::map<int, std::vector<int>> owners;
  for (int i = 0; i < layout_.num_subdomains(); ++i)
    for (int v : disc.trace(layout_.subdomain(i)).nodes()) owners[v].push_back(i);
  // Interface adjacency at each node: (vertex, slot) -> neighbouring slots.
  std::map<std::pair<int, int>, std::vector<int>> neighbours;
  for (int i = 0; i < layout_.num_subdomains(); ++i) {
    const TraceSpace& tr = disc.trace(layout_.subdomain(i));
    for (int k = i + 1; k < layout_.num_subdomains(); ++k)
      for (int q : tr.interface_nodes(layout_.subdomain(k))) {
        neighbours[{tr.nodes()[q], i}].push_back(k);
        neighbours[{tr.nodes()[q], k}].push_back(i);
      }
  }

  std::vector<Eigen::Triplet<Real>> dir, neu;
  for (const auto& [v, slots] : owners) {
    bool on_d = false;
    for (int i : slots) {
      const TraceSpace& tr = disc.trace(layout_.subdomain(i));
      on_d = on_d || tr.on_dirichlet(tr.local(v));
    }
    if (!(with_boundary_conditions && on_d)) {
      for (int i : slots) {
        const TraceSpace& tr = disc.trace(layout_.subdomain(i));
        dir.emplace_back(layout_.dirichlet_offset(i) + tr.local(v), num_dirichlet_, 1.0);
      }
      ++num_dirichlet_;
    }

    std::map<int, int> sign;
    for (int start : slots) {
      if (sign.count(start)) continue;
      std::vector<int> members;
      bool consistent = true;
      std::queue<int> todo;
      sign[start] = 1;
      todo.push(start);
      while (!todo.empty()) {
        const int a = todo.front();
        todo.pop();
        members.push_back(a);
        auto it = neighbours.find({v, a});
        if (it == neighbours.end()) continue;
        for (int b : it->second) {
          auto sb = sign.find(b);
          if (sb == sign.end()) {
            sign[b] = -sign[a];
            todo.push(b);
          } else if (sb->second != -sign[a]) {
            consistent = false;
          }
        }
      }
      bool on_n = false;
      for (int i : members) {
        const TraceSpace& tr = disc.trace(layout_.subdomain(i));
        on_n = on_n || tr.on_neumann(tr.local(v));
      }
      if (!consistent || (with_boundary_conditions && on_n)) continue;
      std::sort(members.begin(), members.end());
      for (int i : members) {
        const TraceSpace& tr = disc.trace(layout_.subdomain(i));
        neu.emplace_back(layout_.neumann_offset(i) + tr.local(v), num_neumann_, sign[i]);
      }
      ++num_neumann_;
    }
  }
  for (auto& t : neu) t = Eigen::Triplet<Real>(t.row(), t.col() + num_dirichlet_, t.value());
  dir.insert(dir.end(), neu.begin(), neu.end());
  embedding_.resize(layout_.size(), num_dirichlet_ + num_neumann_);
  embedding_.setFromTriplets(dir.begin(), dir.end());
}

MultiTrace SingleTraceBasis::expand(const CVector& coefficients) const {
  if (coefficients.size() != size()) throw SpaceError("single-trace coefficients have wrong length");
  return layout_.unpack(embedding_.cast<Complex>() * coefficients);
}

CVector SingleTraceBasis::coordinates(const MultiTrace& m) const {
  const CVector packed = layout_.pack(m);
  // Columns have disjoint supports, so the normal equations are diagonal.
  CVector out = embedding_.transpose().cast<Complex>() * packed;
  for (int c = 0; c < size(); ++c) {
    Real count = 0.0;
    for (RSparse::InnerIterator it(embedding_, c); it; ++it) count += it.value() * it.value();
    out(c) /= count;
  }
  return out;
}

MultiTrace beta_from_incident_wave(const Discretization& disc, const RVector& direction,
                                   Frequency s) {
  const PartitionedMesh& mesh = disc.mesh();
  if (direction.size() != mesh.dim()) throw DomainError("direction has wrong dimension");
  if (std::abs(direction.norm() - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
  const Complex sv = s.value();
  auto wave = [&](const RVector& x) { return std::exp(-sv * direction.dot(x)); };
  const QuadratureRule rule = simplex_rule(mesh.dim() - 1, 6);
  MultiTrace out;
  for (int j : disc.subdomains()) {
    const TraceSpace& tr = disc.trace(j);
    CVector d(tr.size()), load = CVector::Zero(tr.size());
    for (int q = 0; q < tr.size(); ++q) d(q) = s.sqrt() * wave(mesh.vertex(tr.nodes()[q]));
    for (int sf : tr.facets()) {
      const SkeletonFacet& f = disc.skeleton().facets()[sf];
      const RVector n = disc.skeleton().outward_normal(sf, j);
      const auto& verts = mesh.facets()[f.facet].vertices;
      const Real measure = mesh.facet_measure(f.facet);
      for (int p = 0; p < rule.size(); ++p) {
        RVector x = RVector::Zero(mesh.dim());
        for (std::size_t a = 0; a < verts.size(); ++a) x += rule.points(p, a) * mesh.vertex(verts[a]);
        // Scaled conormal s^{-1/2} <grad u, n> with grad u = -s d u.
        const Complex g = s.inv_sqrt() * (-sv * direction.dot(n)) * wave(x);
        for (std::size_t a = 0; a < verts.size(); ++a) {
          const int q = tr.local(verts[a]);
          if (q >= 0) load(q) += rule.weights(p) * measure * rule.points(p, a) * g;
        }
      }
    }
    out.parts.push_back({{j, d}, {j, tr.solve_mass(load)}});
  }
  return out;
}

MultiTrace random_multitrace(const Discretization& disc, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  const PartitionedMesh& mesh = disc.mesh();
  const Real scale = std::max(mesh.box_half_width(), 1e-12);
  auto smooth = [&]() {
    struct Mode {
      RVector k;
      Real phase;
      Complex amp;
    };
    std::vector<Mode> modes;
    for (int m = 0; m < 4; ++m) {
      RVector k(mesh.dim());
      for (int i = 0; i < mesh.dim(); ++i) k(i) = 3.0 * u(rng) / scale;
      modes.push_back({k, 3.0 * u(rng), Complex(u(rng), u(rng))});
    }
    return [modes](const RVector& x) {
      Complex v = 0.0;
      for (const Mode& m : modes) v += m.amp * std::cos(m.k.dot(x) + m.phase);
      return v;
    };
  };
  MultiTrace out;
  for (int j : disc.subdomains()) {
    const TraceSpace& tr = disc.trace(j);
    auto fd = smooth();
    auto fn = smooth();
    CVector d(tr.size()), n(tr.size());
    for (int q = 0; q < tr.size(); ++q) {
      const RVector x = mesh.vertex(tr.nodes()[q]);
      d(q) = fd(x);
      n(q) = fn(x);
    }
    out.parts.push_back({{j, d}, {j, n}});
  }
  return out;
}

struct SkeletonProblem::Parts {
  std::vector<std::unique_ptr<SubdomainForms>> forms;
  std::vector<std::unique_ptr<SubdomainPotentials>> potentials;
  std::vector<OperatorMatrices> operators;
};

SkeletonProblem::SkeletonProblem(const Discretization& disc,
                                 const std::vector<CoefficientField>& extended, Frequency s,
                                 SkeletonOptions options)
    : disc_(&disc),
      s_(s),
      options_(options),
      basis_(disc, options.with_boundary_conditions),
      parts_(std::make_unique<Parts>()) {
  const MultiTraceLayout& layout = basis_.layout();
  if (static_cast<int>(extended.size()) != layout.num_subdomains())
    throw DomainError("one extended coefficient field per subdomain required");
  calderon_ = CMatrix::Zero(layout.size(), layout.size());
  for (int i = 0; i < layout.num_subdomains(); ++i) {
    const int j = layout.subdomain(i);
    parts_->forms.push_back(std::make_unique<SubdomainForms>(disc.broken(j), extended[i]));
    parts_->potentials.push_back(
        std::make_unique<SubdomainPotentials>(*parts_->forms.back(), s, options.solver));
    parts_->operators.push_back(
        materialize(BoundaryOperators(*parts_->potentials.back(), options.calderon)));
    const int n = layout.trace_size(i);
    calderon_.block(layout.dirichlet_offset(i), layout.dirichlet_offset(i), 2 * n, 2 * n) =
        parts_->operators.back().calderon();
  }
  const CMatrix b = RMatrix(basis_.embedding()).cast<Complex>();
  const CMatrix shifted = calderon_ - 0.5 * CMatrix::Identity(layout.size(), layout.size());
  galerkin_ = b.transpose() * (layout.x_pairing(disc) * shifted) * b;
}

SkeletonProblem::~SkeletonProblem() = default;

const SubdomainForms& SkeletonProblem::forms(int j) const {
  return *parts_->forms[basis_.layout().slot(j)];
}

const SubdomainPotentials& SkeletonProblem::potentials(int j) const {
  return *parts_->potentials[basis_.layout().slot(j)];
}

const OperatorMatrices& SkeletonProblem::operators(int j) const {
  return parts_->operators[basis_.layout().slot(j)];
}

Real SkeletonProblem::coercivity_estimate() const {
  if (galerkin_.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (galerkin_ + galerkin_.adjoint()),
                                             Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

CVector SkeletonProblem::load(const MultiTrace& beta) const {
  const MultiTraceLayout& layout = basis_.layout();
  const CVector packed = layout.pack(beta);
  const CVector shifted = calderon_ * packed - 0.5 * packed;
  return -(basis_.embedding().transpose().cast<Complex>() * (layout.x_pairing(*disc_) * shifted));
}

SkeletonSolution SkeletonProblem::solve(const MultiTrace& beta) const {
  SkeletonSolution sol;
  const CVector rhs = load(beta);
  if (galerkin_.size() == 0) {
    sol.coefficients = CVector::Zero(0);
  } else {
    Eigen::PartialPivLU<CMatrix> lu(galerkin_);
    sol.coefficients = lu.solve(rhs);
    const Real r = (galerkin_ * sol.coefficients - rhs).norm();
    if (r > 1e-10 * std::max(rhs.norm(), 1e-300))
      throw Error("skeleton Galerkin solve lost accuracy: residual " + std::to_string(r));
  }
  sol.single = basis_.expand(sol.coefficients);
  const MultiTraceLayout& layout = basis_.layout();
  sol.multi = layout.unpack(layout.pack(sol.single) + layout.pack(beta));
  return sol;
}

std::vector<SubdomainSolution> SkeletonProblem::reconstruct(const MultiTrace& multi) const {
  std::vector<SubdomainSolution> out;
  for (const CauchyData& c : multi.parts) {
    const SubdomainPotentials& pot = potentials(c.dirichlet.j);
    const BrokenField u = pot.green(c);
    out.push_back({c.dirichlet.j, side_values(pot.space(), u, Side::Minus)});
  }
  return out;
}

std::vector<SubdomainSolution> direct_solve(const Discretization& disc,
                                            const CoefficientField& global, const MultiTrace& beta,
                                            Frequency s, SolverOptions options) {
  const PartitionedMesh& mesh = disc.mesh();
  const MultiTraceLayout layout(disc);
  layout.pack(beta);  // validates shape
  const int nv = mesh.num_vertices();

  // Unknowns: vertices of Omega that are neither pinned nor on Gamma_D.
  std::vector<char> in_omega(nv, 0), fixed(nv, 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.tag(c) > 0)
      for (int i = 0; i <= mesh.dim(); ++i) in_omega[mesh.cells()(c, i)] = 1;
  for (int j : disc.subdomains()) {
    const TraceSpace& tr = disc.trace(j);
    for (int q = 0; q < tr.size(); ++q)
      if (tr.on_dirichlet(q)) fixed[tr.nodes()[q]] = 1;
  }
  std::vector<int> dof(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
    if (in_omega[v] && !mesh.is_pinned(v) && !fixed[v]) dof[v] = n++;

  std::vector<CVector> lifts;
  CVector vertex_rhs = CVector::Zero(nv);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int i = 0; i < layout.num_subdomains(); ++i) {
    const int j = layout.subdomain(i);
    const TraceSpace& tr = disc.trace(j);
    auto on_j = [&](int c) { return mesh.tag(c) == j; };
    const RSparse k = assemble_stiffness(mesh, global, on_j);
    const RSparse m = assemble_mass(mesh, global, on_j);
    // Subdomain j sees the shared unknown plus s^{-1/2} beta_D on Gamma_j.
    CVector lift = CVector::Zero(nv);
    for (int q = 0; q < tr.size(); ++q)
      lift(tr.nodes()[q]) = s.inv_sqrt() * beta.parts[i].dirichlet.values(q);
    const CVector neumann = tr.mass().cast<Complex>() * beta.parts[i].neumann.values;
    for (int q = 0; q < tr.size(); ++q) vertex_rhs(tr.nodes()[q]) += s.sqrt() * neumann(q);
    vertex_rhs -= k.cast<Complex>() * lift + s.square() * (m.cast<Complex>() * lift);
    for (const RSparse* a : {&k, &m}) {
      const Complex factor = a == &k ? Complex(1.0) : s.square();
      for (int col = 0; col < a->outerSize(); ++col)
        for (RSparse::InnerIterator it(*a, col); it; ++it) {
          const int r = dof[it.row()], cc = dof[col];
          if (r >= 0 && cc >= 0) trips.emplace_back(r, cc, factor * it.value());
        }
    }
    lifts.push_back(std::move(lift));
  }
  CSparse a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  CVector rhs(n);
  for (int v = 0; v < nv; ++v)
    if (dof[v] >= 0) rhs(dof[v]) = vertex_rhs(v);
  const CVector w = LinearSolver(a, s.rotation(), options).solve(rhs);

  std::vector<SubdomainSolution> out;
  for (int i = 0; i < layout.num_subdomains(); ++i) {
    CVector values = lifts[i];
    for (int v = 0; v < nv; ++v)
      if (dof[v] >= 0) values(v) += w(dof[v]);
    out.push_back({layout.subdomain(i), std::move(values)});
  }
  return out;
}

MultiTrace cauchy_data(const SkeletonProblem& problem,
                       const std::vector<SubdomainSolution>& solution) {
  MultiTrace out;
  const Frequency s = problem.frequency();
  for (const SubdomainSolution& u : solution) {
    const SubdomainForms& forms = problem.forms(u.j);
    const CVector zero = CVector::Zero(u.values.size());
    CVector minus = u.values;
    for (int v : forms.space().interior_vertices(Side::Plus)) minus(v) = 0.0;
    const BrokenField field = from_side_values(forms.space(), minus, zero, s);
    out.parts.push_back(interior_cauchy_data(forms, field));
  }
  return out;
}

Real relative_l2_difference(const PartitionedMesh& mesh, const std::vector<SubdomainSolution>& u,
                            const std::vector<SubdomainSolution>& v) {
  if (u.size() != v.size()) throw SpaceError("solutions cover different subdomains");
  Real num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].j != v[i].j) throw SpaceError("solutions cover different subdomains");
    const int j = u[i].j;
    auto on_j = [&](int c) { return mesh.tag(c) == j; };
    num += std::pow(l2_norm(mesh, u[i].values - v[i].values, on_j), 2);
    den += std::pow(l2_norm(mesh, v[i].values, on_j), 2);
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace skelpot
