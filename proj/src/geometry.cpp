#include "skelpot/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace skelpot {

namespace {

Real factorial(int n) {
  Real f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

RMatrix edge_matrix(const PartitionedMesh& mesh, const std::vector<int>& verts) {
  const int d = mesh.dim();
  RMatrix e(d, static_cast<int>(verts.size()) - 1);
  for (int i = 1; i < static_cast<int>(verts.size()); ++i)
    e.col(i - 1) = (mesh.vertices().row(verts[i]) - mesh.vertices().row(verts[0])).transpose();
  return e;
}

std::vector<int> cell_vertices(const IMatrix& cells, int c) {
  std::vector<int> v(cells.cols());
  for (int i = 0; i < cells.cols(); ++i) v[i] = cells(c, i);
  return v;
}

}  // namespace

PartitionedMesh::PartitionedMesh(RMatrix vertices, IMatrix cells, Eigen::VectorXi tags)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), tags_(std::move(tags)) {
  const int d = dim();
  if (d < 2 || d > 3) throw DomainError("mesh dimension must be 2 or 3, got " + std::to_string(d));
  if (cells_.cols() != d + 1)
    throw DomainError("cells must have d+1 = " + std::to_string(d + 1) + " vertices");
  if (tags_.size() != cells_.rows()) throw DomainError("one region tag per cell required");
  std::set<std::vector<int>> seen;
  for (int c = 0; c < num_cells(); ++c) {
    if (tags_(c) < 0) throw DomainError("negative region tag on cell " + std::to_string(c));
    auto v = cell_vertices(cells_, c);
    for (int i : v)
      if (i < 0 || i >= num_vertices())
        throw DomainError("cell " + std::to_string(c) + " references missing vertex " +
                          std::to_string(i));
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
      throw DomainError("cell " + std::to_string(c) + " repeats a vertex");
    if (!seen.insert(v).second) throw DomainError("duplicate cell " + std::to_string(c));
  }
  orient_cells();
  std::set<int> positive;
  for (int c = 0; c < num_cells(); ++c)
    if (tags_(c) > 0) positive.insert(tags_(c));
  subdomains_.assign(positive.begin(), positive.end());
  build_facets();
}

void PartitionedMesh::orient_cells() {
  const int d = dim();
  Real scale = 0.0;
  for (int c = 0; c < num_cells(); ++c) {
    RMatrix e = edge_matrix(*this, cell_vertices(cells_, c));
    scale = std::max(scale, e.cwiseAbs().maxCoeff());
  }
  const Real tiny = 1e-13 * std::pow(scale, d);
  for (int c = 0; c < num_cells(); ++c) {
    const Real det = edge_matrix(*this, cell_vertices(cells_, c)).determinant();
    if (std::abs(det) <= tiny) throw DomainError("degenerate cell " + std::to_string(c));
    if (det < 0) std::swap(cells_(c, 0), cells_(c, 1));
  }
}

void PartitionedMesh::build_facets() {
  const int d = dim();
  std::map<std::vector<int>, std::vector<int>> adjacency;
  for (int c = 0; c < num_cells(); ++c) {
    for (int skip = 0; skip <= d; ++skip) {
      std::vector<int> f;
      for (int i = 0; i <= d; ++i)
        if (i != skip) f.push_back(cells_(c, i));
      std::sort(f.begin(), f.end());
      adjacency[f].push_back(c);
    }
  }
  pinned_.assign(num_vertices(), 0);
  for (auto& [verts, adj] : adjacency) {
    if (adj.size() > 2) throw DomainError("non-manifold facet shared by more than two cells");
    Facet f;
    f.vertices = verts;
    f.cell_a = adj[0];
    if (adj.size() == 2) {
      f.cell_a = std::min(adj[0], adj[1]);
      f.cell_b = std::max(adj[0], adj[1]);
      f.kind = tags_(f.cell_a) == tags_(f.cell_b) ? FacetKind::Interior : FacetKind::Skeleton;
    } else {
      f.kind = FacetKind::Truncation;
      for (int v : verts) pinned_[v] = 1;
    }
    facet_lookup_[verts] = static_cast<int>(facets_.size());
    facets_.push_back(std::move(f));
  }
}

int PartitionedMesh::find_facet(std::vector<int> verts) const {
  std::sort(verts.begin(), verts.end());
  auto it = facet_lookup_.find(verts);
  return it == facet_lookup_.end() ? -1 : it->second;
}

Real PartitionedMesh::cell_volume(int cell) const {
  return edge_matrix(*this, cell_vertices(cells_, cell)).determinant() / factorial(dim());
}

RVector PartitionedMesh::cell_barycenter(int cell) const {
  RVector b = RVector::Zero(dim());
  for (int i = 0; i <= dim(); ++i) b += vertex(cells_(cell, i));
  return b / (dim() + 1);
}

Real PartitionedMesh::facet_measure(int facet) const {
  RMatrix e = edge_matrix(*this, facets_[facet].vertices);
  return std::sqrt((e.transpose() * e).determinant()) / factorial(dim() - 1);
}

RVector PartitionedMesh::facet_barycenter(int facet) const {
  RVector b = RVector::Zero(dim());
  for (int v : facets_[facet].vertices) b += vertex(v);
  return b / static_cast<Real>(facets_[facet].vertices.size());
}

RVector PartitionedMesh::facet_normal(int facet, int from_cell) const {
  const auto& fv = facets_[facet].vertices;
  int opposite = -1;
  for (int i = 0; i <= dim(); ++i)
    if (!std::binary_search(fv.begin(), fv.end(), cells_(from_cell, i))) opposite = i;
  if (opposite < 0) throw InternalError("facet is not a face of the given cell");
  // The gradient of the opposite barycentric coordinate points into the cell.
  RMatrix grads = barycentric_gradients(*this, from_cell);
  RVector n = -grads.row(opposite).transpose();
  return n / n.norm();
}

Real PartitionedMesh::omega_diameter() const {
  RVector lo = RVector::Constant(dim(), std::numeric_limits<Real>::max());
  RVector hi = RVector::Constant(dim(), std::numeric_limits<Real>::lowest());
  bool any = false;
  for (int c = 0; c < num_cells(); ++c) {
    if (tags_(c) == 0) continue;
    any = true;
    for (int i = 0; i <= dim(); ++i) {
      lo = lo.cwiseMin(vertex(cells_(c, i)));
      hi = hi.cwiseMax(vertex(cells_(c, i)));
    }
  }
  return any ? (hi - lo).norm() : 0.0;
}

Real PartitionedMesh::box_half_width() const { return vertices_.cwiseAbs().maxCoeff(); }

void PartitionedMesh::assign_boundary(const std::function<BoundaryKind(const RVector&)>& rule) {
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
    const Facet& fc = facets_[f];
    if (fc.kind == FacetKind::Skeleton && (tags_(fc.cell_a) == 0 || tags_(fc.cell_b) == 0))
      facets_[f].boundary = rule(facet_barycenter(f));
  }
}

void PartitionedMesh::set_boundary(int facet, BoundaryKind kind) {
  const Facet& fc = facets_.at(facet);
  if (fc.kind != FacetKind::Skeleton || (tags_(fc.cell_a) != 0 && tags_(fc.cell_b) != 0))
    throw DomainError("boundary condition on a facet that does not bound Omega");
  facets_[facet].boundary = kind;
}

RMatrix barycentric_gradients(const PartitionedMesh& mesh, int cell) {
  const int d = mesh.dim();
  RMatrix jac(d, d);
  for (int i = 1; i <= d; ++i)
    jac.col(i - 1) = (mesh.vertices().row(mesh.cells()(cell, i)) -
                      mesh.vertices().row(mesh.cells()(cell, 0)))
                         .transpose();
  RMatrix inv = jac.inverse();
  RMatrix g(d + 1, d);
  g.bottomRows(d) = inv;
  g.row(0) = -inv.colwise().sum();
  return g;
}

namespace partitions {

PartitionSpec single() {
  return {[](const RVector&) { return 1; }, {1}};
}

PartitionSpec half_split() {
  return {[](const RVector& x) { return x(0) < 0.0 ? 1 : 2; }, {1, 2}};
}

PartitionSpec quadrant() {
  return {[](const RVector& x) {
            if (x(0) >= 0.0) return x(1) >= 0.0 ? 1 : 4;
            return x(1) >= 0.0 ? 2 : 3;
          },
          {1, 2, 3, 4}};
}

PartitionSpec strips(int n, Real half_width) {
  if (n < 1) throw DomainError("strip count must be positive");
  std::vector<int> tags(n);
  std::iota(tags.begin(), tags.end(), 1);
  return {[n, half_width](const RVector& x) {
            int t = static_cast<int>(std::floor((x(0) + half_width) / (2.0 * half_width) * n));
            return std::clamp(t, 0, n - 1) + 1;
          },
          tags};
}

namespace {
bool inside_box(const RVector& x, Real a) { return x.cwiseAbs().maxCoeff() < a; }
}  // namespace

PartitionSpec inner_split(Real a) {
  return {[a](const RVector& x) {
            if (!inside_box(x, a)) return 0;
            return x(0) < 0.0 ? 1 : 2;
          },
          {1, 2}};
}

PartitionSpec inner_single(Real a) {
  return {[a](const RVector& x) { return inside_box(x, a) ? 1 : 0; }, {1}};
}

PartitionSpec inner_quadrant(Real a) {
  PartitionSpec q = quadrant();
  return {[a, tag = q.tag_of](const RVector& x) { return inside_box(x, a) ? tag(x) : 0; },
          {1, 2, 3, 4}};
}

PartitionSpec ball(Real radius) {
  return {[radius](const RVector& x) { return x.norm() < radius ? 1 : 0; }, {1}};
}

}  // namespace partitions

PartitionedMesh build_box_mesh(int dim, Real half_width, int resolution,
                               const PartitionSpec& partition) {
  if (dim < 2 || dim > 3) throw DomainError("box mesh dimension must be 2 or 3");
  if (resolution < 1) throw DomainError("resolution must be positive");
  if (!(half_width > 0.0)) throw DomainError("box half-width must be positive");
  const int n = resolution + 1;
  const int nv = dim == 2 ? n * n : n * n * n;
  RMatrix verts(nv, dim);
  auto coord = [&](int i) { return -half_width + 2.0 * half_width * i / resolution; };
  auto index = [&](int i, int j, int k) { return i + n * (j + n * k); };
  for (int k = 0; k < (dim == 3 ? n : 1); ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int v = index(i, j, k);
        verts(v, 0) = coord(i);
        verts(v, 1) = coord(j);
        if (dim == 3) verts(v, 2) = coord(k);
      }

  std::vector<std::vector<int>> cells;
  if (dim == 2) {
    for (int j = 0; j < resolution; ++j)
      for (int i = 0; i < resolution; ++i) {
        const int v00 = index(i, j, 0), v10 = index(i + 1, j, 0);
        const int v01 = index(i, j + 1, 0), v11 = index(i + 1, j + 1, 0);
        cells.push_back({v00, v10, v11});
        cells.push_back({v00, v11, v01});
      }
  } else {
    const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int k = 0; k < resolution; ++k)
      for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> pos = {i, j, k};
            std::vector<int> cell = {index(pos[0], pos[1], pos[2])};
            for (int axis : p) {
              ++pos[axis];
              cell.push_back(index(pos[0], pos[1], pos[2]));
            }
            cells.push_back(cell);
          }
  }

  IMatrix cm(static_cast<int>(cells.size()), dim + 1);
  Eigen::VectorXi tags(static_cast<int>(cells.size()));
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    RVector b = RVector::Zero(dim);
    for (int i = 0; i <= dim; ++i) {
      cm(c, i) = cells[c][i];
      b += verts.row(cells[c][i]).transpose();
    }
    tags(c) = partition.tag_of(b / (dim + 1));
  }
  for (int t : partition.expected_tags)
    if ((tags.array() == t).count() == 0)
      throw DomainError("subdomain tag " + std::to_string(t) + " has no cells");
  return PartitionedMesh(std::move(verts), std::move(cm), std::move(tags));
}

SkeletonIndex::SkeletonIndex(const PartitionedMesh& mesh) : mesh_(&mesh) {
  subdomains_ = mesh.subdomains();
  for (int j : subdomains_) by_subdomain_[j];
  const auto& all = mesh.facets();
  for (int f = 0; f < static_cast<int>(all.size()); ++f) {
    if (all[f].kind != FacetKind::Skeleton) continue;
    int ca = all[f].cell_a, cb = all[f].cell_b;
    int ta = mesh.tag(ca), tb = mesh.tag(cb);
    // The j-side is the lower positive tag; tag 0 is always the k-side.
    bool swap = (ta == 0) || (tb != 0 && tb < ta);
    if (swap) {
      std::swap(ca, cb);
      std::swap(ta, tb);
    }
    SkeletonFacet sf;
    sf.facet = f;
    sf.j = ta;
    sf.k = tb;
    sf.normal = mesh.facet_normal(f, ca);
    const RVector across = mesh.cell_barycenter(cb) - mesh.cell_barycenter(ca);
    if (!(sf.normal.dot(across) > 0.0))
      throw InternalError("inconsistent facet orientation at facet " + std::to_string(f));
    const int idx = static_cast<int>(facets_.size());
    by_subdomain_[sf.j].push_back(idx);
    if (sf.k != 0) by_subdomain_[sf.k].push_back(idx);
    facets_.push_back(std::move(sf));
  }
}

const std::vector<int>& SkeletonIndex::boundary_of(int j) const {
  auto it = by_subdomain_.find(j);
  if (it == by_subdomain_.end()) throw DomainError("unknown subdomain tag " + std::to_string(j));
  return it->second;
}

std::vector<int> SkeletonIndex::interface(int j, int k) const {
  int a = j, b = k;
  if (a == 0 || (b != 0 && b < a)) std::swap(a, b);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(facets_.size()); ++i)
    if (facets_[i].j == a && facets_[i].k == b) out.push_back(i);
  return out;
}

RVector SkeletonIndex::outward_normal(int skeleton_facet, int j) const {
  const SkeletonFacet& sf = facets_.at(skeleton_facet);
  if (sf.j == j) return sf.normal;
  if (sf.k == j) return -sf.normal;
  throw DomainError("facet does not belong to Gamma_" + std::to_string(j));
}

Real SkeletonIndex::measure(int j, int k) const {
  Real m = 0.0;
  for (int i : interface(j, k)) m += mesh_->facet_measure(facets_[i].facet);
  return m;
}

SkeletonIndex extract_skeleton(const PartitionedMesh& mesh) { return SkeletonIndex(mesh); }

namespace {

// Reads non-empty, non-comment lines while tracking 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}
  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.clear();
      out.str(line);
      return true;
    }
    return false;
  }
  int number() const { return number_; }

 private:
  std::istream& in_;
  int number_ = 0;
};

template <typename T>
T take(std::istringstream& ss, int line, const char* what) {
  T value;
  if (!(ss >> value)) throw ParseError(line, std::string("expected ") + what);
  return value;
}

void expect_end(std::istringstream& ss, int line) {
  std::string extra;
  if (ss >> extra) throw ParseError(line, "unexpected token '" + extra + "'");
}

}  // namespace

PartitionedMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  std::istringstream ss;
  if (!reader.next(ss)) throw ParseError(reader.number() + 1, "missing skelmesh header");
  if (take<std::string>(ss, reader.number(), "header keyword") != "skelmesh")
    throw ParseError(reader.number(), "header must start with 'skelmesh'");
  const int d = take<int>(ss, reader.number(), "dimension");
  const int nv = take<int>(ss, reader.number(), "vertex count");
  const int nc = take<int>(ss, reader.number(), "cell count");
  expect_end(ss, reader.number());
  if (d < 2 || d > 3) throw ParseError(reader.number(), "dimension must be 2 or 3");
  if (nv <= 0 || nc <= 0) throw ParseError(reader.number(), "counts must be positive");

  RMatrix verts(nv, d);
  for (int v = 0; v < nv; ++v) {
    if (!reader.next(ss)) throw ParseError(reader.number() + 1, "missing vertex line");
    for (int i = 0; i < d; ++i) verts(v, i) = take<Real>(ss, reader.number(), "coordinate");
    expect_end(ss, reader.number());
  }

  IMatrix cells(nc, d + 1);
  Eigen::VectorXi tags(nc);
  std::set<std::vector<int>> seen;
  for (int c = 0; c < nc; ++c) {
    if (!reader.next(ss)) throw ParseError(reader.number() + 1, "missing cell line");
    std::vector<int> key;
    for (int i = 0; i <= d; ++i) {
      const int v = take<int>(ss, reader.number(), "vertex index");
      if (v < 0 || v >= nv) throw ParseError(reader.number(), "vertex index out of range");
      cells(c, i) = v;
      key.push_back(v);
    }
    tags(c) = take<int>(ss, reader.number(), "region tag");
    if (tags(c) < 0) throw ParseError(reader.number(), "region tag must be non-negative");
    expect_end(ss, reader.number());
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw ParseError(reader.number(), "duplicate cell");
  }

  PartitionedMesh mesh = [&] {
    try {
      return PartitionedMesh(std::move(verts), std::move(cells), std::move(tags));
    } catch (const DomainError& e) {
      throw ParseError(reader.number(), e.what());
    }
  }();

  if (!reader.next(ss)) return mesh;
  if (take<std::string>(ss, reader.number(), "'facets'") != "facets")
    throw ParseError(reader.number(), "expected 'facets' section");
  const int nf = take<int>(ss, reader.number(), "facet count");
  expect_end(ss, reader.number());
  for (int i = 0; i < nf; ++i) {
    if (!reader.next(ss)) throw ParseError(reader.number() + 1, "missing facet line");
    std::vector<int> fv;
    for (int k = 0; k < d; ++k) fv.push_back(take<int>(ss, reader.number(), "vertex index"));
    const std::string label = take<std::string>(ss, reader.number(), "facet label");
    expect_end(ss, reader.number());
    const int f = mesh.find_facet(fv);
    if (f < 0) throw ParseError(reader.number(), "facet is not a face of any cell");
    if (label == "TRUNCATION") {
      if (mesh.facets()[f].kind != FacetKind::Truncation)
        throw ParseError(reader.number(), "TRUNCATION label on a facet inside the box");
    } else if (label == "D" || label == "N") {
      try {
        mesh.set_boundary(f, label == "D" ? BoundaryKind::Dirichlet : BoundaryKind::Neumann);
      } catch (const DomainError& e) {
        throw ParseError(reader.number(), e.what());
      }
    } else {
      throw ParseError(reader.number(), "facet label must be D, N or TRUNCATION");
    }
  }
  if (reader.next(ss)) throw ParseError(reader.number(), "trailing content after facets");
  return mesh;
}

PartitionedMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PartitionedMesh& mesh) {
  const int d = mesh.dim();
  out << "skelmesh " << d << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  out.precision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int i = 0; i < d; ++i) out << (i ? " " : "") << mesh.vertices()(v, i);
    out << '\n';
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i <= d; ++i) out << mesh.cells()(c, i) << ' ';
    out << mesh.tag(c) << '\n';
  }
  std::vector<int> labelled;
  for (int f = 0; f < static_cast<int>(mesh.facets().size()); ++f) {
    const Facet& fc = mesh.facets()[f];
    if (fc.kind == FacetKind::Skeleton && (mesh.tag(fc.cell_a) == 0 || mesh.tag(fc.cell_b) == 0))
      labelled.push_back(f);
  }
  if (labelled.empty()) return;
  out << "facets " << labelled.size() << '\n';
  for (int f : labelled) {
    for (int v : mesh.facets()[f].vertices) out << v << ' ';
    out << (mesh.facets()[f].boundary == BoundaryKind::Dirichlet ? "D" : "N") << '\n';
  }
}

}  // namespace skelpot
