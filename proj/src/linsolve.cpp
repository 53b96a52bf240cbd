#include "skelpot/linsolve.hpp"

#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace skelpot {

struct LinearSolver::Impl {
  CSparse matrix;
  Complex rotation;
  SolverOptions options;
  std::string backend;
  Eigen::SparseLU<CSparse, Eigen::COLAMDOrdering<int>> lu;
  CSparse rotated;
  Eigen::GMRES<CSparse, Eigen::DiagonalPreconditioner<Complex>> gmres;
};

LinearSolver::LinearSolver(const CSparse& matrix, Complex rotation, SolverOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols()) throw DomainError("linear system matrix is not square");
  impl_->matrix = matrix;
  impl_->matrix.makeCompressed();
  impl_->rotation = rotation;
  impl_->options = options;
  const bool direct = options.kind == SolverKind::Direct ||
                      (options.kind == SolverKind::Auto && matrix.rows() <= options.direct_limit);
  if (matrix.rows() == 0) {
    impl_->backend = "empty";
    return;
  }
  if (direct) {
    impl_->backend = "sparse-lu";
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
      throw Error("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
  } else {
    impl_->backend = "gmres";
    impl_->rotated = std::conj(rotation) * impl_->matrix;
    impl_->gmres.set_restart(options.restart);
    impl_->gmres.setMaxIterations(options.max_iterations);
    impl_->gmres.setTolerance(options.tolerance);
    impl_->gmres.compute(impl_->rotated);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::Index LinearSolver::size() const { return impl_->matrix.rows(); }
const std::string& LinearSolver::backend() const { return impl_->backend; }

CVector LinearSolver::solve(const CVector& rhs, SolveReport* report) const {
  if (rhs.size() != size()) throw SpaceError("right-hand side has wrong length");
  const Impl& m = *impl_;
  SolveReport rep{m.backend, 0.0, 0};
  CVector x;
  const Real bnorm = rhs.norm();
  if (size() == 0 || bnorm == 0.0) {
    x = CVector::Zero(size());
  } else if (m.backend == "sparse-lu") {
    x = m.lu.solve(rhs);
    // A few refinement steps recover accuracy lost to pivoting.
    for (int step = 0; step < 3; ++step) {
      const CVector r = rhs - m.matrix * x;
      rep.relative_residual = r.norm() / bnorm;
      if (rep.relative_residual <= m.options.tolerance) break;
      x += m.lu.solve(r);
      ++rep.iterations;
    }
  } else {
    x = m.gmres.solve(std::conj(m.rotation) * rhs);
    rep.iterations = static_cast<int>(m.gmres.iterations());
  }
  if (size() > 0 && bnorm > 0.0) rep.relative_residual = (rhs - m.matrix * x).norm() / bnorm;
  if (!(rep.relative_residual <= m.options.tolerance)) {
    std::ostringstream msg;
    msg << m.backend << " did not converge: relative residual " << rep.relative_residual
        << " after " << rep.iterations << " iterations (tolerance " << m.options.tolerance << ")";
    throw Error(msg.str());
  }
  if (report) *report = rep;
  return x;
}

CMatrix LinearSolver::solve(const CMatrix& rhs) const {
  CMatrix out(size(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(CVector(rhs.col(c)));
  return out;
}

}  // namespace skelpot
