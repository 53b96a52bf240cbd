#ifndef SKELPOT_SKELETON_HPP
#define SKELPOT_SKELETON_HPP

#include <memory>
#include <random>
#include <vector>

#include "skelpot/calderon.hpp"

namespace skelpot {

// Frequency-scaled Cauchy data on every Gamma_j, ascending subdomain order.
struct MultiTrace {
  std::vector<CauchyData> parts;
};

// Packs a multi-trace as [D_j1, N_j1, D_j2, N_j2, ...].
class MultiTraceLayout {
 public:
  explicit MultiTraceLayout(const Discretization& disc);

  int size() const { return size_; }
  int num_subdomains() const { return static_cast<int>(subdomains_.size()); }
  int subdomain(int slot) const { return subdomains_[slot]; }
  int slot(int j) const;
  int trace_size(int slot) const { return sizes_[slot]; }
  int dirichlet_offset(int slot) const { return offsets_[slot]; }
  int neumann_offset(int slot) const { return offsets_[slot] + sizes_[slot]; }

  CVector pack(const MultiTrace& m) const;
  MultiTrace unpack(const CVector& v) const;
  MultiTrace zeros() const;
  // Block-diagonal matrix of the X-pairing sum_j <a_D, b_N> + <b_D, a_N>.
  CMatrix x_pairing(const Discretization& disc) const;

 private:
  std::vector<int> subdomains_;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int size_ = 0;
};

Complex x_pairing(const Discretization& disc, const MultiTrace& a, const MultiTrace& b);

// Discrete single-trace space: Dirichlet values agree across interfaces and
// Neumann values are opposite. A Neumann unknown exists for each connected
// group of subdomains around a node whose sign pattern is consistent; odd
// cycles at cross points force the value to zero. With boundary conditions
// Dirichlet unknowns on Gamma_D and Neumann unknowns on Gamma_N are removed.
class SingleTraceBasis {
 public:
  SingleTraceBasis(const Discretization& disc, bool with_boundary_conditions);

  const MultiTraceLayout& layout() const { return layout_; }
  // Columns embed single-trace coordinates into the packed multi-trace.
  const RSparse& embedding() const { return embedding_; }
  int size() const { return static_cast<int>(embedding_.cols()); }
  int num_dirichlet() const { return num_dirichlet_; }
  int num_neumann() const { return num_neumann_; }

  MultiTrace expand(const CVector& coefficients) const;
  // Least-squares coordinates; exact for members of the space.
  CVector coordinates(const MultiTrace& m) const;

 private:
  MultiTraceLayout layout_;
  RSparse embedding_;
  int num_dirichlet_ = 0;
  int num_neumann_ = 0;
};

// Nodal interpolant of the scaled Dirichlet trace and L2 projection of the
// scaled conormal derivative of exp(-s <d, x>) on every Gamma_j.
MultiTrace beta_from_incident_wave(const Discretization& disc, const RVector& direction,
                                   Frequency s);

// Smooth pseudo-random multi-trace; identical for identical seeds.
MultiTrace random_multitrace(const Discretization& disc, std::uint64_t seed);

struct SubdomainSolution {
  int j = 0;
  CVector values;  // vertex values; meaningful on vertices of subdomain j
};

struct SkeletonOptions {
  SolverOptions solver;
  CalderonOptions calderon;
  bool with_boundary_conditions = true;
};

struct SkeletonSolution {
  CVector coefficients;
  MultiTrace single;
  MultiTrace multi;  // single + beta
};

// Galerkin discretization of the single-trace skeleton equation
//   <(C - I/2) u, conj(w)>_X = -<(C - I/2) beta, conj(w)>_X
// over the single-trace space with boundary conditions.
class SkeletonProblem {
 public:
  SkeletonProblem(const Discretization& disc, const std::vector<CoefficientField>& extended,
                  Frequency s, SkeletonOptions options = {});
  ~SkeletonProblem();

  const Discretization& discretization() const { return *disc_; }
  const SingleTraceBasis& basis() const { return basis_; }
  Frequency frequency() const { return s_; }
  const CMatrix& galerkin() const { return galerkin_; }
  // Block-diagonal Calderon matrix on the packed multi-trace.
  const CMatrix& calderon() const { return calderon_; }
  const SubdomainForms& forms(int j) const;
  const SubdomainPotentials& potentials(int j) const;
  const OperatorMatrices& operators(int j) const;

  // Smallest eigenvalue of the Hermitian part of the Galerkin matrix.
  Real coercivity_estimate() const;
  CVector load(const MultiTrace& beta) const;
  SkeletonSolution solve(const MultiTrace& beta) const;
  // u_j = (S_j u_N - D_j u_D) restricted to subdomain j.
  std::vector<SubdomainSolution> reconstruct(const MultiTrace& multi) const;

 private:
  struct Parts;
  const Discretization* disc_;
  Frequency s_;
  SkeletonOptions options_;
  SingleTraceBasis basis_;
  std::unique_ptr<Parts> parts_;
  CMatrix calderon_;
  CMatrix galerkin_;
};

// Broken finite element solution of the transmission problem with global
// coefficients: jumps across interfaces and data on Gamma_D, Gamma_N from beta.
std::vector<SubdomainSolution> direct_solve(const Discretization& disc,
                                            const CoefficientField& global, const MultiTrace& beta,
                                            Frequency s, SolverOptions options = {});

// Frequency-scaled Cauchy data of per-subdomain volume solutions.
MultiTrace cauchy_data(const SkeletonProblem& problem,
                       const std::vector<SubdomainSolution>& solution);

// sqrt(sum_j ||u_j - v_j||^2 / sum_j ||v_j||^2) in L2 over each subdomain.
Real relative_l2_difference(const PartitionedMesh& mesh, const std::vector<SubdomainSolution>& u,
                            const std::vector<SubdomainSolution>& v);

}  // namespace skelpot

#endif
