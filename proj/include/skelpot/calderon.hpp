#ifndef SKELPOT_CALDERON_HPP
#define SKELPOT_CALDERON_HPP

#include <string>
#include <vector>

#include "skelpot/potentials.hpp"

namespace skelpot {

struct CalderonOptions {
  // Fault-injection hook for the verification suite: flips the sign of the
  // Neumann mean, which must make the projection check fail.
  bool corrupt_neumann_mean_sign = false;
};

// Boundary integral operators of subdomain j at frequency s:
//   V = {{S}}_D(s), K = {{D}}_D(s), K' = {{S}}_N(s), W = -{{D}}_N(s),
// and the Calderon operator C = [[-K, V], [W, K']] acting on (psi_D, psi_N).
class BoundaryOperators {
 public:
  explicit BoundaryOperators(const SubdomainPotentials& potentials, CalderonOptions options = {});

  const SubdomainPotentials& potentials() const { return *potentials_; }
  const TraceSpace& trace() const { return potentials_->space().trace(); }
  int subdomain() const { return potentials_->subdomain(); }
  Frequency frequency() const { return potentials_->frequency(); }
  int size() const { return trace().size(); }

  DirichletTrace V(const NeumannTrace& phi) const;
  DirichletTrace K(const DirichletTrace& psi) const;
  NeumannTrace Kp(const NeumannTrace& phi) const;
  NeumannTrace W(const DirichletTrace& psi) const;
  CauchyData apply(const CauchyData& psi) const;

 private:
  JumpsAndMeans means_of(const BrokenField& u) const;

  const SubdomainPotentials* potentials_;
  CalderonOptions options_;
};

// Dense nodal matrices of the four operators, built column by column.
struct OperatorMatrices {
  CMatrix V, K, Kp, W;
  // [[-K, V], [W, Kp]] on the (Dirichlet, Neumann) ordering.
  CMatrix calderon() const;
};

OperatorMatrices materialize(const BoundaryOperators& ops);

// ||(C - I/2) x|| / ||x|| in the Euclidean norm of nodal coefficients.
// Throws DomainError("degenerate input") for x = 0.
Real projection_residual(const BoundaryOperators& ops, const CauchyData& x);

// Discrete Sobolev Grams of Gamma_j: Hermitian parts of the pairing
// matrices of V and W for s = 1, A = I, p = 1.
struct SobolevGrams {
  CMatrix half;        // H^{1/2}, Dirichlet data
  CMatrix minus_half;  // H^{-1/2}, Neumann data
};

SobolevGrams sobolev_grams(const BrokenSpace& space, SolverOptions options = {});

// Pairing matrices: entry (a, b) is the pairing of the image of basis b
// with basis a, so Re(x^H P x) is the coercivity quadratic form.
CMatrix pairing_matrix_V(const TraceSpace& trace, const OperatorMatrices& ops);
CMatrix pairing_matrix_W(const TraceSpace& trace, const OperatorMatrices& ops);
CMatrix pairing_matrix_C(const TraceSpace& trace, const OperatorMatrices& ops);
// Matrix of the bilinear X-pairing on (D, N) ordering: [[0, M], [M, 0]].
CMatrix x_pairing_matrix(const TraceSpace& trace);
CMatrix x_gram(const SobolevGrams& grams);

// Smallest eigenvalue of Herm(P) relative to the Gram G.
Real coercivity_constant(const CMatrix& pairing, const CMatrix& gram);
// sup |y^H P x| / (||x||_{G_x} ||y||_{G_y}).
Real continuity_constant(const CMatrix& pairing, const CMatrix& gram_x, const CMatrix& gram_y);
// sup ||A x||_{G_range} / ||x||_{G_domain}.
Real operator_norm(const CMatrix& op, const CMatrix& gram_domain, const CMatrix& gram_range);

struct SubdomainConstants {
  int j = 0;
  Real v_coercivity = 0, v_continuity = 0;
  Real w_coercivity = 0, w_continuity = 0;
  Real k_norm = 0, kp_norm = 0;
  Real c_coercivity = 0, c_continuity = 0;
};

SubdomainConstants estimate_constants(const BoundaryOperators& ops, const SobolevGrams& grams);
// Same from already materialized operator matrices of Gamma_j.
SubdomainConstants estimate_constants(const TraceSpace& trace, const OperatorMatrices& m,
                                      const SobolevGrams& grams);

// Operator norm of the Dirichlet trace H^1 -> H^{1/2}(Gamma_j) at s = 1.
Real dirichlet_trace_constant(const BrokenSpace& space, const SobolevGrams& grams);

}  // namespace skelpot

#endif
