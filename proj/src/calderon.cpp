#include "skelpot/calderon.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace skelpot {

BoundaryOperators::BoundaryOperators(const SubdomainPotentials& potentials, CalderonOptions options)
    : potentials_(&potentials), options_(options) {}

JumpsAndMeans BoundaryOperators::means_of(const BrokenField& u) const {
  JumpsAndMeans m = jump_and_mean(potentials_->forms(), u);
  if (options_.corrupt_neumann_mean_sign) m.mean_neumann.values = -m.mean_neumann.values;
  return m;
}

DirichletTrace BoundaryOperators::V(const NeumannTrace& phi) const {
  const ConformingField u = potentials_->single_layer(phi);
  return dirichlet_trace(potentials_->space(), u, frequency());
}

DirichletTrace BoundaryOperators::K(const DirichletTrace& psi) const {
  return means_of(potentials_->double_layer(psi)).mean_dirichlet;
}

NeumannTrace BoundaryOperators::Kp(const NeumannTrace& phi) const {
  const ConformingField u = potentials_->single_layer(phi);
  return means_of(as_broken(potentials_->space(), u, frequency())).mean_neumann;
}

NeumannTrace BoundaryOperators::W(const DirichletTrace& psi) const {
  NeumannTrace t = means_of(potentials_->double_layer(psi)).mean_neumann;
  t.values = -t.values;
  return t;
}

CauchyData BoundaryOperators::apply(const CauchyData& psi) const {
  const JumpsAndMeans m = means_of(potentials_->green(psi));
  return {m.mean_dirichlet, m.mean_neumann};
}

CMatrix OperatorMatrices::calderon() const {
  const Eigen::Index n = V.rows();
  CMatrix c(2 * n, 2 * n);
  c << -K, V, W, Kp;
  return c;
}

OperatorMatrices materialize(const BoundaryOperators& ops) {
  const int n = ops.size();
  const int j = ops.subdomain();
  OperatorMatrices out{CMatrix(n, n), CMatrix(n, n), CMatrix(n, n), CMatrix(n, n)};
  for (int b = 0; b < n; ++b) {
    const CVector e = CVector::Unit(n, b);
    const CVector zero = CVector::Zero(n);
    const CauchyData from_neumann = ops.apply({{j, zero}, {j, e}});
    out.V.col(b) = from_neumann.dirichlet.values;
    out.Kp.col(b) = from_neumann.neumann.values;
    const CauchyData from_dirichlet = ops.apply({{j, e}, {j, zero}});
    out.K.col(b) = -from_dirichlet.dirichlet.values;
    out.W.col(b) = from_dirichlet.neumann.values;
  }
  return out;
}

Real projection_residual(const BoundaryOperators& ops, const CauchyData& x) {
  const Real norm = std::sqrt(x.dirichlet.values.squaredNorm() + x.neumann.values.squaredNorm());
  if (norm == 0.0) throw DomainError("degenerate input: zero Cauchy data");
  const CauchyData cx = ops.apply(x);
  const Real r = std::sqrt((cx.dirichlet.values - 0.5 * x.dirichlet.values).squaredNorm() +
                           (cx.neumann.values - 0.5 * x.neumann.values).squaredNorm());
  return r / norm;
}

namespace {

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

SobolevGrams sobolev_grams(const BrokenSpace& space, SolverOptions options) {
  const SubdomainForms forms(space, CoefficientField::identity(space.mesh()));
  const SubdomainPotentials pot(forms, Frequency(1.0), options);
  const OperatorMatrices ops = materialize(BoundaryOperators(pot));
  const TraceSpace& tr = space.trace();
  return {hermitian_part(pairing_matrix_W(tr, ops)), hermitian_part(pairing_matrix_V(tr, ops))};
}

CMatrix pairing_matrix_V(const TraceSpace& trace, const OperatorMatrices& ops) {
  return RMatrix(trace.mass()).cast<Complex>() * ops.V;
}

CMatrix pairing_matrix_W(const TraceSpace& trace, const OperatorMatrices& ops) {
  return RMatrix(trace.mass()).cast<Complex>() * ops.W;
}

CMatrix x_pairing_matrix(const TraceSpace& trace) {
  const int n = trace.size();
  const RMatrix m(trace.mass());
  CMatrix j = CMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = m.cast<Complex>();
  j.bottomLeftCorner(n, n) = m.cast<Complex>();
  return j;
}

CMatrix pairing_matrix_C(const TraceSpace& trace, const OperatorMatrices& ops) {
  return x_pairing_matrix(trace) * ops.calderon();
}

CMatrix x_gram(const SobolevGrams& grams) {
  const Eigen::Index n = grams.half.rows();
  CMatrix g = CMatrix::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = grams.half;
  g.bottomRightCorner(n, n) = grams.minus_half;
  return g;
}

Real coercivity_constant(const CMatrix& pairing, const CMatrix& gram) {
  if (pairing.size() == 0) return 0.0;
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> eig(hermitian_part(pairing),
                                                        hermitian_part(gram), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("generalized eigenproblem failed");
  return eig.eigenvalues().minCoeff();
}

namespace {

// L^{-1} X for the Cholesky factor of G = L L^H.
CMatrix left_whiten(const CMatrix& gram, const CMatrix& x) {
  Eigen::LLT<CMatrix> llt(hermitian_part(gram));
  if (llt.info() != Eigen::Success) throw Error("Gram matrix is not positive definite");
  return llt.matrixL().solve(x);
}

Real largest_singular_value(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

Real continuity_constant(const CMatrix& pairing, const CMatrix& gram_x, const CMatrix& gram_y) {
  if (pairing.size() == 0) return 0.0;
  // sigma_max(Ly^{-1} P Lx^{-H}) = sigma_max(Lx^{-1} (Ly^{-1} P)^H).
  const CMatrix left = left_whiten(gram_y, pairing);
  return largest_singular_value(left_whiten(gram_x, left.adjoint()));
}

Real operator_norm(const CMatrix& op, const CMatrix& gram_domain, const CMatrix& gram_range) {
  if (op.size() == 0) return 0.0;
  Eigen::LLT<CMatrix> range(hermitian_part(gram_range));
  if (range.info() != Eigen::Success) throw Error("Gram matrix is not positive definite");
  const CMatrix lifted = CMatrix(range.matrixL()).adjoint() * op;
  return largest_singular_value(left_whiten(gram_domain, lifted.adjoint()));
}

SubdomainConstants estimate_constants(const BoundaryOperators& ops, const SobolevGrams& grams) {
  if (ops.size() == 0) {
    SubdomainConstants c;
    c.j = ops.subdomain();
    return c;
  }
  return estimate_constants(ops.trace(), materialize(ops), grams);
}

SubdomainConstants estimate_constants(const TraceSpace& tr, const OperatorMatrices& m,
                                      const SobolevGrams& grams) {
  SubdomainConstants c;
  c.j = tr.subdomain();
  if (tr.size() == 0) return c;
  const CMatrix pv = pairing_matrix_V(tr, m);
  const CMatrix pw = pairing_matrix_W(tr, m);
  const CMatrix pc = pairing_matrix_C(tr, m);
  const CMatrix gx = x_gram(grams);
  c.v_coercivity = coercivity_constant(pv, grams.minus_half);
  c.v_continuity = continuity_constant(pv, grams.minus_half, grams.minus_half);
  c.w_coercivity = coercivity_constant(pw, grams.half);
  c.w_continuity = continuity_constant(pw, grams.half, grams.half);
  c.k_norm = operator_norm(m.K, grams.half, grams.half);
  c.kp_norm = operator_norm(m.Kp, grams.minus_half, grams.minus_half);
  c.c_coercivity = coercivity_constant(pc, gx);
  c.c_continuity = continuity_constant(pc, gx, gx);
  return c;
}

Real dirichlet_trace_constant(const BrokenSpace& space, const SobolevGrams& grams) {
  const TraceSpace& tr = space.trace();
  const int n = tr.size();
  if (n == 0) return 0.0;
  const ConformingSpace& cs = space.conforming();
  const Frequency one(1.0);
  const RSparse g = space.reference_stiffness(Side::Minus) + space.reference_stiffness(Side::Plus) +
                    space.reference_mass(Side::Minus) + space.reference_mass(Side::Plus);
  CMatrix ext(space.mesh().num_vertices(), n);
  for (int b = 0; b < n; ++b)
    ext.col(b) = cs.to_vertices(lifting_E(space, {tr.subdomain(), CVector::Unit(n, b)}, one).values);
  // Minimal-energy extension of each trace basis vector.
  const CMatrix energy = ext.adjoint() * (g.cast<Complex>() * ext);
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> eig(hermitian_part(grams.half),
                                                        hermitian_part(energy), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("generalized eigenproblem failed");
  return std::sqrt(eig.eigenvalues().maxCoeff());
}

}  // namespace skelpot
