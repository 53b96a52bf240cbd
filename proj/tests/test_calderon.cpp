#include <gtest/gtest.h>

#include <random>

#include "skelpot/calderon.hpp"
#include "support.hpp"

using namespace skelpot;
using skelpot::testing::random_complex;

namespace {

struct Fixture {
  Discretization disc;
  CoefficientField coeffs;
  SubdomainForms forms;
  SubdomainPotentials pot;
  BoundaryOperators ops;
  OperatorMatrices m;

  Fixture(PartitionSpec partition, int j, Frequency s, CalderonOptions options = {})
      : disc(build_box_mesh(2, 1.0, 8, partition)),
        coeffs(skelpot::testing::checkerboard_field(disc.mesh(), 1.0, 3.0, 4)),
        forms(disc.broken(j), extend(disc.mesh(), coeffs, j, ExtensionMode::Global)),
        pot(forms, s),
        ops(pot, options),
        m(materialize(ops)) {}

  CMatrix mass() const { return RMatrix(disc.trace(ops.subdomain()).mass()).cast<Complex>(); }
};

class CalderonIdentities : public ::testing::TestWithParam<int> {};

PartitionSpec partition_for(int i) {
  switch (i) {
    case 0: return partitions::half_split();
    case 1: return partitions::inner_split(0.5);
    default: return partitions::quadrant();
  }
}

}  // namespace

TEST_P(CalderonIdentities, ProjectionAndSymmetry) {
  const Fixture f(partition_for(GetParam()), 1, Frequency::polar(3.0, 0.7));
  const int n = f.ops.size();
  const CMatrix c = f.m.calderon();
  EXPECT_LT((c * c - 0.25 * CMatrix::Identity(2 * n, 2 * n)).norm(), 1e-9);
  const CMatrix mass = f.mass();
  const CMatrix mv = mass * f.m.V, mw = mass * f.m.W;
  EXPECT_LT((mv - mv.transpose()).norm(), 1e-10 * mv.norm());
  EXPECT_LT((mw - mw.transpose()).norm(), 1e-10 * mw.norm());
  EXPECT_LT((mass * f.m.K - (mass * f.m.Kp).transpose()).norm(), 1e-10 * (mass * f.m.K).norm());
}

INSTANTIATE_TEST_SUITE_P(Partitions, CalderonIdentities, ::testing::Range(0, 3));

TEST(Calderon, MaterializedMatricesAgreeWithApply) {
  const Fixture f(partitions::quadrant(), 3, Frequency::polar(1.5, -0.4));
  std::mt19937_64 rng(31);
  const int n = f.ops.size();
  const CVector d = random_complex(rng, n), nn = random_complex(rng, n);
  const CauchyData out = f.ops.apply({{3, d}, {3, nn}});
  CVector x(2 * n);
  x << d, nn;
  const CVector y = f.m.calderon() * x;
  EXPECT_LT((y.head(n) - out.dirichlet.values).norm(), 1e-12 * y.norm());
  EXPECT_LT((y.tail(n) - out.neumann.values).norm(), 1e-12 * y.norm());
  EXPECT_LT((f.ops.V({3, nn}).values - f.m.V * nn).norm(), 1e-12 * y.norm());
  EXPECT_LT((f.ops.W({3, d}).values - f.m.W * d).norm(), 1e-12 * y.norm());
}

TEST(Calderon, InteriorCauchyDataAreFixedPoints) {
  const Fixture f(partitions::inner_split(0.5), 2, Frequency::polar(2.0, 1.0));
  std::mt19937_64 rng(32);
  const DirichletTrace data{2, random_complex(rng, f.ops.size())};
  const BrokenField u = side_solution(f.forms, Side::Minus, data, f.pot.frequency());
  EXPECT_LT(projection_residual(f.ops, interior_cauchy_data(f.forms, u)), 1e-8);
  EXPECT_THROW(projection_residual(f.ops, {{2, CVector::Zero(f.ops.size())},
                                           {2, CVector::Zero(f.ops.size())}}),
               DomainError);
}

TEST(Calderon, FaultInjectionBreaksTheProjection) {
  CalderonOptions bad;
  bad.corrupt_neumann_mean_sign = true;
  const Fixture f(partitions::half_split(), 1, Frequency(1.0), bad);
  const int n = f.ops.size();
  const CMatrix c = f.m.calderon();
  EXPECT_GT((c * c - 0.25 * CMatrix::Identity(2 * n, 2 * n)).norm(), 0.1);
}

TEST(Calderon, GramsAreTheOperatorsAtUnitFrequency) {
  const Discretization disc(build_box_mesh(2, 1.0, 8, partitions::half_split()));
  const BrokenSpace& sp = disc.broken(1);
  const SobolevGrams g = sobolev_grams(sp);
  const SubdomainForms forms(sp, CoefficientField::identity(disc.mesh()));
  const SubdomainPotentials pot(forms, Frequency(1.0));
  const SubdomainConstants c = estimate_constants(BoundaryOperators(pot), g);
  // At s = 1 with unit coefficients V and W are their own Grams.
  EXPECT_NEAR(c.v_coercivity, 1.0, 1e-8);
  EXPECT_NEAR(c.w_coercivity, 1.0, 1e-8);
  EXPECT_NEAR(c.v_continuity, 1.0, 1e-8);
  EXPECT_NEAR(c.w_continuity, 1.0, 1e-8);
  EXPECT_GT(c.c_coercivity, 0.0);
  EXPECT_GT(dirichlet_trace_constant(sp, g), 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(g.half);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(Calderon, CoercivityPersistsAcrossFrequencies) {
  const Discretization disc(build_box_mesh(2, 1.0, 8, partitions::inner_split(0.5)));
  const BrokenSpace& sp = disc.broken(1);
  const SobolevGrams g = sobolev_grams(sp);
  const CoefficientField cf = skelpot::testing::checkerboard_field(disc.mesh(), 1.0, 5.0, 4);
  const SubdomainForms forms(sp, extend(disc.mesh(), cf, 1, ExtensionMode::Global));
  for (Real arg : {0.0, 0.5, 1.2})
    for (Real mod : {0.5, 2.0, 8.0}) {
      const SubdomainPotentials pot(forms, Frequency::polar(mod, arg));
      const SubdomainConstants c = estimate_constants(BoundaryOperators(pot), g);
      EXPECT_GT(c.v_coercivity, 0.0) << mod << ' ' << arg;
      EXPECT_GT(c.w_coercivity, 0.0) << mod << ' ' << arg;
      EXPECT_GT(c.c_coercivity, 0.0) << mod << ' ' << arg;
      EXPECT_GE(c.v_continuity, c.v_coercivity);
    }
}

TEST(Calderon, ConstantsOfGenericMatrices) {
  // Diagonal pairing against the identity Gram.
  CMatrix p = CMatrix::Zero(3, 3);
  p.diagonal() << Complex(2, 1), Complex(0.5, -3), Complex(1, 0);
  const CMatrix id = CMatrix::Identity(3, 3);
  EXPECT_NEAR(coercivity_constant(p, id), 0.5, 1e-14);
  EXPECT_NEAR(continuity_constant(p, id, id), std::abs(Complex(0.5, -3)), 1e-13);
  const CMatrix g = 4.0 * id;
  EXPECT_NEAR(coercivity_constant(p, g), 0.125, 1e-14);
  EXPECT_NEAR(operator_norm(p, g, g), std::abs(Complex(0.5, -3)), 1e-13);
  EXPECT_EQ(coercivity_constant(CMatrix(), CMatrix()), 0.0);
}
