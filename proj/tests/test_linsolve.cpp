#include <gtest/gtest.h>

#include <random>

#include "skelpot/assembly.hpp"
#include "skelpot/linsolve.hpp"
#include "support.hpp"

using namespace skelpot;
using skelpot::testing::random_complex;

namespace {

FormMatrix model_system(const Discretization& disc, Frequency s) {
  const SubdomainForms forms(disc.broken(1), CoefficientField::identity(disc.mesh()));
  return assemble_ell(forms, s);
}

}  // namespace

TEST(LinearSolver, DirectAndIterativeAgree) {
  const Discretization disc(build_box_mesh(2, 1.0, 16, partitions::half_split()));
  const Frequency s = Frequency::polar(3.0, 1.2);
  const FormMatrix l = model_system(disc, s);
  std::mt19937_64 rng(21);
  const CVector b = random_complex(rng, static_cast<int>(l.matrix.rows()));
  SolverOptions direct{SolverKind::Direct};
  SolverOptions iterative{SolverKind::Iterative};
  iterative.tolerance = 1e-13;
  const LinearSolver a(l.matrix, s.rotation(), direct);
  const LinearSolver g(l.matrix, s.rotation(), iterative);
  SolveReport report;
  const CVector xa = a.solve(b);
  const CVector xg = g.solve(b, &report);
  EXPECT_NE(a.backend(), g.backend());
  EXPECT_GT(report.iterations, 0);
  EXPECT_LT((xa - xg).norm(), 1e-10 * xa.norm());
  EXPECT_LT((l.matrix * xa - b).norm(), 1e-12 * b.norm());
}

TEST(LinearSolver, AutoSwitchesOnSize) {
  const Discretization disc(build_box_mesh(2, 1.0, 8, partitions::half_split()));
  const FormMatrix l = model_system(disc, Frequency(1.0));
  SolverOptions small;
  small.direct_limit = 10;
  EXPECT_EQ(LinearSolver(l.matrix, 1.0, small).backend(),
            LinearSolver(l.matrix, 1.0, {SolverKind::Iterative}).backend());
  EXPECT_EQ(LinearSolver(l.matrix).backend(), LinearSolver(l.matrix, 1.0, {SolverKind::Direct}).backend());
}

TEST(LinearSolver, MatrixRightHandSide) {
  const Discretization disc(build_box_mesh(2, 1.0, 6, partitions::half_split()));
  const FormMatrix l = model_system(disc, Frequency::polar(1.0, 0.3));
  const LinearSolver solver(l.matrix);
  std::mt19937_64 rng(22);
  const int n = static_cast<int>(l.matrix.rows());
  CMatrix b(n, 3);
  for (int c = 0; c < 3; ++c) b.col(c) = random_complex(rng, n);
  const CMatrix x = solver.solve(b);
  for (int c = 0; c < 3; ++c) EXPECT_LT((x.col(c) - solver.solve(CVector(b.col(c)))).norm(), 1e-13 * x.norm());
}

TEST(LinearSolver, ZeroRhsGivesZero) {
  const Discretization disc(build_box_mesh(2, 1.0, 4, partitions::half_split()));
  const FormMatrix l = model_system(disc, Frequency(2.0));
  for (SolverKind kind : {SolverKind::Direct, SolverKind::Iterative}) {
    const LinearSolver solver(l.matrix, 1.0, {kind});
    EXPECT_EQ(solver.solve(CVector(CVector::Zero(l.matrix.rows()))).norm(), 0.0);
  }
}

TEST(LinearSolver, RejectsBadShapes) {
  CSparse rect(3, 4);
  EXPECT_THROW(LinearSolver{rect}, DomainError);
  const Discretization disc(build_box_mesh(2, 1.0, 4, partitions::half_split()));
  const LinearSolver solver(model_system(disc, Frequency(1.0)).matrix);
  EXPECT_THROW(solver.solve(CVector(CVector::Zero(solver.size() + 1))), SpaceError);
}
