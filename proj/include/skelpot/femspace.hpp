#ifndef SKELPOT_FEMSPACE_HPP
#define SKELPOT_FEMSPACE_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "skelpot/geometry.hpp"
#include "skelpot/types.hpp"

namespace skelpot {

// P1 functions on the box vanishing on truncation vertices.
class ConformingSpace {
 public:
  explicit ConformingSpace(const PartitionedMesh& mesh);

  const PartitionedMesh& mesh() const { return *mesh_; }
  int size() const { return static_cast<int>(free_.size()); }
  int dof(int vertex) const { return dof_[vertex]; }  // -1 when pinned
  int vertex(int dof) const { return free_[dof]; }
  // Expands dof values to all vertices with zeros on pinned vertices.
  CVector to_vertices(const CVector& dofs) const;
  CVector from_vertices(const CVector& values) const;

 private:
  const PartitionedMesh* mesh_;
  std::vector<int> dof_;
  std::vector<int> free_;
};

// P1 trace space on Gamma_j. Nodes are the unpinned vertices of Gamma_j
// facets. Dirichlet data are nodal values; Neumann data are nodal
// coefficients of a P1 function and both are paired through the facet mass
// matrix without conjugation.
class TraceSpace {
 public:
  TraceSpace(const PartitionedMesh& mesh, const SkeletonIndex& skeleton, int j);

  int subdomain() const { return j_; }
  const PartitionedMesh& mesh() const { return *mesh_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<int>& nodes() const { return nodes_; }
  int local(int vertex) const;  // -1 when the vertex is not a node
  const RSparse& mass() const { return mass_; }
  CVector solve_mass(const CVector& rhs) const;
  // Bilinear pairing a^T M b.
  Complex pair(const CVector& a, const CVector& b) const;

  // Skeleton facet indices forming Gamma_j.
  const std::vector<int>& facets() const { return facets_; }
  // Local indices of nodes on Gamma_{j,k}, ascending by vertex id.
  std::vector<int> interface_nodes(int k) const;
  // Node lies in the closure of a Dirichlet (resp. Neumann) facet of dOmega.
  bool on_dirichlet(int local) const { return on_dirichlet_[local] != 0; }
  bool on_neumann(int local) const { return on_neumann_[local] != 0; }

 private:
  const PartitionedMesh* mesh_;
  const SkeletonIndex* skeleton_;
  int j_;
  std::vector<int> facets_;
  std::vector<int> nodes_;
  std::vector<int> local_;
  std::vector<char> on_dirichlet_;
  std::vector<char> on_neumann_;
  RSparse mass_;
  Eigen::SimplicialLDLT<RSparse> mass_solver_;
};

// Functions on the box that are P1 on each side of Gamma_j and may jump
// across it. Cells tagged j form the minus side.
class BrokenSpace {
 public:
  BrokenSpace(const ConformingSpace& conforming, const TraceSpace& trace);

  int subdomain() const { return trace_->subdomain(); }
  const ConformingSpace& conforming() const { return *conforming_; }
  const TraceSpace& trace() const { return *trace_; }
  const PartitionedMesh& mesh() const { return conforming_->mesh(); }
  Side side_of_cell(int cell) const {
    return mesh().tag(cell) == subdomain() ? Side::Minus : Side::Plus;
  }
  // Unpinned vertices touching only side-sigma cells.
  const std::vector<int>& interior_vertices(Side side) const {
    return interior_[side == Side::Minus ? 0 : 1];
  }
  // Dimension counting one copy per side on Gamma_j.
  int size() const { return conforming_->size() + trace_->size(); }

  // Identity-coefficient stiffness and unit-weight mass of one side, indexed
  // by mesh vertex.
  const RSparse& reference_stiffness(Side side) const { return ref_k_[side == Side::Minus ? 0 : 1]; }
  const RSparse& reference_mass(Side side) const { return ref_m_[side == Side::Minus ? 0 : 1]; }

 private:
  const ConformingSpace* conforming_;
  const TraceSpace* trace_;
  std::vector<int> interior_[2];
  RSparse ref_k_[2];
  RSparse ref_m_[2];
};

// Owns a mesh together with every space built on it.
class Discretization {
 public:
  explicit Discretization(PartitionedMesh mesh);

  const PartitionedMesh& mesh() const { return *mesh_; }
  const SkeletonIndex& skeleton() const { return *skeleton_; }
  const ConformingSpace& conforming() const { return *conforming_; }
  const std::vector<int>& subdomains() const { return mesh_->subdomains(); }
  const TraceSpace& trace(int j) const;
  const BrokenSpace& broken(int j) const;

 private:
  int slot(int j) const;

  std::unique_ptr<PartitionedMesh> mesh_;
  std::unique_ptr<SkeletonIndex> skeleton_;
  std::unique_ptr<ConformingSpace> conforming_;
  std::vector<std::unique_ptr<TraceSpace>> traces_;
  std::vector<std::unique_ptr<BrokenSpace>> broken_;
};

struct ConformingField {
  CVector values;  // one entry per conforming dof
};

// Broken field stored as a conforming part plus the frequency-scaled
// Dirichlet jump. On Gamma_j the minus copy equals the conforming part and
// the plus copy adds jump / sqrt(s).
struct BrokenField {
  int j = 0;
  Frequency s{1.0};
  CVector base;
  CVector scaled_jump;
};

// Frequency-scaled Dirichlet data on Gamma_j (H^{1/2} role).
struct DirichletTrace {
  int j = 0;
  CVector values;
};

// Frequency-scaled Neumann data on Gamma_j (H^{-1/2} role).
struct NeumannTrace {
  int j = 0;
  CVector values;
};

BrokenField as_broken(const BrokenSpace& space, const ConformingField& u, Frequency s);

// Vertex values seen from one side; other-side and pinned vertices are 0
// except on Gamma_j where the requested copy is returned.
CVector side_values(const BrokenSpace& space, const BrokenField& u, Side side);

// Builds a broken field from per-side vertex values. Non-Gamma vertices take
// the value of the side they belong to.
BrokenField from_side_values(const BrokenSpace& space, const CVector& minus, const CVector& plus,
                             Frequency s);

// Restriction of a conforming field to one side, zero on the other.
BrokenField restrict_to_side(const BrokenSpace& space, const ConformingField& u, Side side,
                             Frequency s);

using CellFilter = std::function<bool(int)>;

// sqrt(|grad v|^2 + |s|^2 |v|^2) integrated over the selected cells.
Real freq_norm(const ConformingSpace& space, const ConformingField& v, Frequency s,
               const CellFilter& cells = nullptr);
Real freq_norm(const BrokenSpace& space, const BrokenField& v, const CellFilter& cells = nullptr);
// L2 norm of vertex values over the selected cells.
Real l2_norm(const PartitionedMesh& mesh, const CVector& vertex_values,
             const CellFilter& cells = nullptr);

DirichletTrace dirichlet_trace(const BrokenSpace& space, const BrokenField& u, Side side);
DirichletTrace dirichlet_trace(const BrokenSpace& space, const ConformingField& u, Frequency s);

// Broken field whose side-sigma copies on Gamma_j equal the given nodal
// values and which vanishes elsewhere.
BrokenField nodal_zero_extension(const BrokenSpace& space, const CVector& nodal, Side side,
                                 Frequency s);

// Screened-harmonic extension with scaled Dirichlet trace psi on both sides.
ConformingField lifting_E(const BrokenSpace& space, const DirichletTrace& psi, Frequency s);

void check_trace(const TraceSpace& space, const DirichletTrace& t);
void check_trace(const TraceSpace& space, const NeumannTrace& t);

// CSV with columns node_index,x,y[,z],re,im.
void export_trace_csv(const TraceSpace& space, const CVector& values, const std::string& path);
// Legacy ASCII VTK with point data "re" and "im". Only selected cells are written.
void export_vtk(const PartitionedMesh& mesh, const CVector& vertex_values, const std::string& path,
                const CellFilter& cells = nullptr);

}  // namespace skelpot

#endif
