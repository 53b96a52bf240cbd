#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "skelpot/assembly.hpp"
#include "skelpot/element.hpp"
#include "support.hpp"

using namespace skelpot;
using skelpot::testing::random_complex;

TEST(Element, UnitTriangleStiffnessAndMass) {
  RMatrix v(3, 2);
  v << 0, 0, 1, 0, 0, 1;
  IMatrix c(1, 3);
  c << 0, 1, 2;
  const PartitionedMesh mesh(v, c, Eigen::VectorXi::Ones(1));
  const RMatrix k = local_stiffness(barycentric_gradients(mesh, 0), mesh.cell_volume(0),
                                    RMatrix::Identity(2, 2));
  EXPECT_NEAR(k(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(k(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(k(2, 2), 0.5, 1e-15);
  EXPECT_NEAR(k(1, 2), 0.0, 1e-15);
  EXPECT_NEAR(k(0, 1), -0.5, 1e-15);
  const RMatrix m = local_mass(3, 0.5);
  EXPECT_NEAR(m(0, 0), 1.0 / 12.0, 1e-16);
  EXPECT_NEAR(m(0, 1), 1.0 / 24.0, 1e-16);
  EXPECT_EQ(k, k.transpose());
}

TEST(Element, MassIntegratesProductsOfHatFunctionsExactly) {
  // Mean of lambda_a * lambda_b over a d-simplex is (1 + delta_ab) / ((d+1)(d+2)).
  for (int n : {2, 3, 4}) {
    const RMatrix m = local_mass(n, 1.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        EXPECT_NEAR(m(a, b), (a == b ? 2.0 : 1.0) / (n * (n + 1.0)), 1e-16);
  }
}

TEST(ConformingSpace, ExcludesPinnedVertices) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 4, partitions::single());
  const ConformingSpace space(mesh);
  EXPECT_EQ(space.size(), 9);
  std::mt19937_64 rng(1);
  const CVector x = random_complex(rng, space.size());
  EXPECT_EQ(space.from_vertices(space.to_vertices(x)), x);
}

TEST(TraceSpace, HalfSplitNodesAndMass) {
  const Discretization disc(build_box_mesh(2, 1.0, 4, partitions::half_split()));
  const TraceSpace& tr = disc.trace(1);
  ASSERT_EQ(tr.size(), 3);  // five vertices on x = 0, two pinned
  for (int v : tr.nodes()) EXPECT_EQ(disc.mesh().vertex(v)(0), 0.0);
  // Exact P1 mass on four edges of length 1/2 restricted to interior nodes.
  const RMatrix m(tr.mass());
  EXPECT_NEAR(m(0, 0), 2.0 * 0.5 / 3.0, 1e-15);
  EXPECT_NEAR(m(0, 1), 0.5 / 6.0, 1e-15);
  EXPECT_NEAR(m(0, 2), 0.0, 1e-15);
  std::mt19937_64 rng(2);
  const CVector a = random_complex(rng, 3), b = random_complex(rng, 3);
  EXPECT_NEAR(std::abs(tr.pair(a, b) - tr.pair(b, a)), 0.0, 1e-14);
  EXPECT_NEAR((tr.mass().cast<Complex>() * tr.solve_mass(a) - a).norm(), 0.0, 1e-13);
}

TEST(TraceSpace, DirichletAndNeumannFlags) {
  PartitionedMesh mesh = build_box_mesh(2, 1.0, 8, partitions::inner_single(0.5));
  mesh.assign_boundary([](const RVector& x) {
    return x(0) > 0 ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;
  });
  const Discretization disc(std::move(mesh));
  const TraceSpace& tr = disc.trace(1);
  for (int q = 0; q < tr.size(); ++q) {
    const Real x = disc.mesh().vertex(tr.nodes()[q])(0);
    EXPECT_EQ(tr.on_neumann(q), x >= 0.0);
    EXPECT_EQ(tr.on_dirichlet(q), x <= 0.0);
  }
}

TEST(Norms, L2NormOfLinearFunctionIsExact) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 6, partitions::single());
  CVector x(mesh.num_vertices());
  for (int v = 0; v < x.size(); ++v) x(v) = mesh.vertex(v)(0);
  EXPECT_NEAR(l2_norm(mesh, x), std::sqrt(4.0 / 3.0), 1e-13);
  // Half of the box by symmetry.
  auto left = [&](int c) { return mesh.cell_barycenter(c)(0) < 0; };
  EXPECT_NEAR(l2_norm(mesh, x, left), std::sqrt(2.0 / 3.0), 1e-13);
}

TEST(Norms, FrequencyNormMatchesAssembledQuadraticForm) {
  const Discretization disc(build_box_mesh(2, 1.0, 6, partitions::half_split()));
  const ConformingSpace& cs = disc.conforming();
  const CoefficientField id = CoefficientField::identity(disc.mesh());
  const RSparse k = assemble_stiffness(disc.mesh(), id), m = assemble_mass(disc.mesh(), id);
  std::mt19937_64 rng(3);
  const Frequency s = Frequency::polar(3.0, 0.4);
  const CVector u = random_complex(rng, cs.size());
  const CVector uv = cs.to_vertices(u);
  const Real expected = std::sqrt(std::real(uv.dot(k.cast<Complex>() * uv)) +
                                  9.0 * std::real(uv.dot(m.cast<Complex>() * uv)));
  EXPECT_NEAR(freq_norm(cs, {u}, s), expected, 1e-12 * expected);
}

TEST(BrokenSpace, SideValuesRoundTrip) {
  const Discretization disc(build_box_mesh(2, 1.0, 6, partitions::quadrant()));
  const BrokenSpace& sp = disc.broken(2);
  std::mt19937_64 rng(4);
  const Frequency s = Frequency::polar(2.0, 0.5);
  const BrokenField u{2, s, random_complex(rng, sp.conforming().size()),
                      random_complex(rng, sp.trace().size())};
  const CVector minus = side_values(sp, u, Side::Minus), plus = side_values(sp, u, Side::Plus);
  const BrokenField back = from_side_values(sp, minus, plus, s);
  EXPECT_NEAR((back.base - u.base).norm(), 0.0, 1e-13);
  EXPECT_NEAR((back.scaled_jump - u.scaled_jump).norm(), 0.0, 1e-13);
  // Scaled Dirichlet traces differ by exactly the stored jump.
  const CVector jump = dirichlet_trace(sp, u, Side::Plus).values - dirichlet_trace(sp, u, Side::Minus).values;
  EXPECT_NEAR((jump - u.scaled_jump).norm(), 0.0, 1e-13);
}

TEST(BrokenSpace, LiftingReproducesTheTrace) {
  const Discretization disc(build_box_mesh(2, 1.0, 8, partitions::inner_split(0.5)));
  const BrokenSpace& sp = disc.broken(1);
  std::mt19937_64 rng(5);
  const Frequency s = Frequency::polar(1.5, -0.3);
  const DirichletTrace psi{1, random_complex(rng, sp.trace().size())};
  const ConformingField e = lifting_E(sp, psi, s);
  EXPECT_NEAR((dirichlet_trace(sp, e, s).values - psi.values).norm(), 0.0, 1e-12 * psi.values.norm());
  const BrokenField z = nodal_zero_extension(sp, psi.values, Side::Plus, s);
  EXPECT_NEAR((side_values(sp, z, Side::Minus)).norm(), 0.0, 0.0);
}

TEST(Export, TraceCsvHasHeaderAndOneRowPerNode) {
  const Discretization disc(build_box_mesh(2, 1.0, 4, partitions::half_split()));
  const std::string path = ::testing::TempDir() + "trace.csv";
  export_trace_csv(disc.trace(1), CVector::Ones(3), path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "node_index,x,y,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_THROW(export_trace_csv(disc.trace(1), CVector::Ones(2), path), SpaceError);
}

TEST(Export, VtkWritesPointData) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 2, partitions::single());
  const std::string path = ::testing::TempDir() + "field.vtk";
  export_vtk(mesh, CVector::Ones(mesh.num_vertices()), path);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("# vtk DataFile Version"), std::string::npos);
  EXPECT_NE(text.find("POINT_DATA 9"), std::string::npos);
  EXPECT_NE(text.find("SCALARS re"), std::string::npos);
}
