#ifndef SKELPOT_GEOMETRY_HPP
#define SKELPOT_GEOMETRY_HPP

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "skelpot/types.hpp"

namespace skelpot {

enum class FacetKind { Interior, Skeleton, Truncation };
enum class BoundaryKind { Dirichlet, Neumann };

struct Facet {
  std::vector<int> vertices;  // sorted ascending
  int cell_a = -1;            // smaller adjacent cell index
  int cell_b = -1;            // -1 on the box boundary
  FacetKind kind = FacetKind::Interior;
  // Only meaningful for skeleton facets between a subdomain and tag 0.
  BoundaryKind boundary = BoundaryKind::Dirichlet;
};

// Simplicial mesh of the box [-R,R]^d with a region tag per cell.
// Tag 0 is the complement of Omega; positive tags are subdomains.
// Cells are stored positively oriented. Facets on the mesh boundary are
// truncation facets and their vertices are pinned to zero.
class PartitionedMesh {
 public:
  PartitionedMesh(RMatrix vertices, IMatrix cells, Eigen::VectorXi tags);

  int dim() const { return static_cast<int>(vertices_.cols()); }
  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_cells() const { return static_cast<int>(cells_.rows()); }
  const RMatrix& vertices() const { return vertices_; }
  const IMatrix& cells() const { return cells_; }
  int tag(int cell) const { return tags_(cell); }
  const Eigen::VectorXi& tags() const { return tags_; }
  // Positive tags carrying at least one cell, ascending.
  const std::vector<int>& subdomains() const { return subdomains_; }

  const std::vector<Facet>& facets() const { return facets_; }
  int find_facet(std::vector<int> vertices) const;
  bool is_pinned(int vertex) const { return pinned_[vertex] != 0; }

  RVector vertex(int v) const { return vertices_.row(v).transpose(); }
  Real cell_volume(int cell) const;
  RVector cell_barycenter(int cell) const;
  Real facet_measure(int facet) const;
  RVector facet_barycenter(int facet) const;
  // Unit normal of a facet pointing away from the given adjacent cell.
  RVector facet_normal(int facet, int from_cell) const;

  // Largest distance between two vertices of cells carrying a positive tag.
  Real omega_diameter() const;
  Real box_half_width() const;

  // Assigns Dirichlet or Neumann to every facet between Omega and tag 0.
  void assign_boundary(const std::function<BoundaryKind(const RVector&)>& rule);
  void set_boundary(int facet, BoundaryKind kind);

 private:
  void orient_cells();
  void build_facets();

  RMatrix vertices_;
  IMatrix cells_;
  Eigen::VectorXi tags_;
  std::vector<int> subdomains_;
  std::vector<Facet> facets_;
  std::map<std::vector<int>, int> facet_lookup_;
  std::vector<char> pinned_;
};

// Gradients of the barycentric coordinates of a cell, one row per vertex.
RMatrix barycentric_gradients(const PartitionedMesh& mesh, int cell);

// Tagging rule evaluated at cell barycenters, plus tags it must produce.
struct PartitionSpec {
  std::function<int(const RVector&)> tag_of;
  std::vector<int> expected_tags;
};

namespace partitions {
PartitionSpec single();
// Tag 1 for x < 0, tag 2 otherwise.
PartitionSpec half_split();
// Tags 1..4 counter-clockwise starting in the quadrant x>0, y>0.
PartitionSpec quadrant();
// n vertical strips of equal width across [-R,R], tags 1..n from left.
PartitionSpec strips(int n, Real half_width);
// Omega = [-a,a]^d split at x = 0 into tags 1, 2; tag 0 outside.
PartitionSpec inner_split(Real a);
// Omega = [-a,a]^d as a single subdomain; tag 0 outside.
PartitionSpec inner_single(Real a);
// Omega = [-a,a]^2 split into four quadrants; tag 0 outside.
PartitionSpec inner_quadrant(Real a);
// Tag 1 inside the ball of the given radius, tag 0 outside.
PartitionSpec ball(Real radius);
}  // namespace partitions

// Structured simplicial mesh of [-R,R]^d with `resolution` cubes per axis.
// Squares split into two triangles, cubes into six Kuhn tetrahedra.
PartitionedMesh build_box_mesh(int dim, Real half_width, int resolution,
                               const PartitionSpec& partition);

struct SkeletonFacet {
  int facet = -1;
  int j = 0;       // lower subdomain tag, or the subdomain when k == 0
  int k = 0;       // higher tag, or 0 for the complement
  RVector normal;  // unit normal pointing from the j-side into the k-side
};

// Interface structure: facets separating cells of different tags.
class SkeletonIndex {
 public:
  explicit SkeletonIndex(const PartitionedMesh& mesh);

  const std::vector<SkeletonFacet>& facets() const { return facets_; }
  bool empty() const { return facets_.empty(); }
  const std::vector<int>& subdomains() const { return subdomains_; }

  // Skeleton facet indices forming Gamma_j.
  const std::vector<int>& boundary_of(int j) const;
  // Skeleton facet indices forming Gamma_{j,k}; k may be 0.
  std::vector<int> interface(int j, int k) const;
  // Normal of a skeleton facet pointing out of subdomain j.
  RVector outward_normal(int skeleton_facet, int j) const;
  Real measure(int j, int k) const;

 private:
  const PartitionedMesh* mesh_;
  std::vector<SkeletonFacet> facets_;
  std::vector<int> subdomains_;
  std::map<int, std::vector<int>> by_subdomain_;
};

SkeletonIndex extract_skeleton(const PartitionedMesh& mesh);

// ASCII mesh format:
//   skelmesh <d> <n_vertices> <n_cells>
//   <d coordinates per vertex line>
//   <d+1 vertex indices and a region tag per cell line>
//   optional: facets <n>, then <d vertex indices> <D|N|TRUNCATION> lines
PartitionedMesh read_mesh(std::istream& in);
PartitionedMesh load_mesh(const std::string& path);
void write_mesh(std::ostream& out, const PartitionedMesh& mesh);

}  // namespace skelpot

#endif
