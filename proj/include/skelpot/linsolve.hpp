#ifndef SKELPOT_LINSOLVE_HPP
#define SKELPOT_LINSOLVE_HPP

#include <memory>
#include <string>

#include "skelpot/types.hpp"

namespace skelpot {

enum class SolverKind { Auto, Direct, Iterative };

struct SolverOptions {
  SolverKind kind = SolverKind::Auto;
  Real tolerance = 1e-12;        // relative residual
  int max_iterations = 5000;
  int restart = 300;
  Eigen::Index direct_limit = 200000;  // Auto switches to GMRES above this size
};

struct SolveReport {
  std::string backend;
  Real relative_residual = 0.0;
  int iterations = 0;
};

// Factorization of a complex sparse system. The iterative backend solves
// the system multiplied by conj(rotation), which for the sesquilinear form
// at frequency s with rotation s/|s| has positive definite Hermitian part.
class LinearSolver {
 public:
  explicit LinearSolver(const CSparse& matrix, Complex rotation = 1.0, SolverOptions options = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Eigen::Index size() const;
  const std::string& backend() const;
  // Throws Error when the residual tolerance is not reached.
  CVector solve(const CVector& rhs, SolveReport* report = nullptr) const;
  CMatrix solve(const CMatrix& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace skelpot

#endif
