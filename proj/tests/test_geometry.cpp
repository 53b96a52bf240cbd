#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "skelpot/geometry.hpp"

using namespace skelpot;

TEST(BoxMesh, SingleRegionSquareAtResolutionTwo) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 2, partitions::single());
  EXPECT_EQ(mesh.num_cells(), 8);
  EXPECT_EQ(mesh.num_vertices(), 9);
  EXPECT_TRUE(extract_skeleton(mesh).empty());
}

TEST(BoxMesh, CellsArePositivelyOrientedAndTileTheBox) {
  for (int dim : {2, 3}) {
    const PartitionedMesh mesh = build_box_mesh(dim, 1.5, 3, partitions::single());
    Real total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      EXPECT_GT(mesh.cell_volume(c), 0.0);
      total += mesh.cell_volume(c);
    }
    EXPECT_NEAR(total, std::pow(3.0, dim), 1e-12);
  }
}

TEST(Skeleton, HalfSplitInterfaceIsTheFourEdgesOnXZero) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 4, partitions::half_split());
  const SkeletonIndex sk = extract_skeleton(mesh);
  ASSERT_EQ(sk.facets().size(), 4u);
  for (const SkeletonFacet& f : sk.facets()) {
    EXPECT_EQ(f.j, 1);
    EXPECT_EQ(f.k, 2);
    for (int v : mesh.facets()[f.facet].vertices) EXPECT_EQ(mesh.vertex(v)(0), 0.0);
    EXPECT_NEAR(f.normal(0), 1.0, 1e-15);  // from x < 0 into x > 0
  }
  EXPECT_NEAR(sk.measure(1, 2), 2.0, 1e-14);
  EXPECT_EQ(sk.interface(1, 2), sk.interface(2, 1));
}

TEST(Skeleton, NormalsAreUnitAndPointFromJIntoK) {
  for (const PartitionSpec& spec : {partitions::quadrant(), partitions::inner_split(0.5),
                                    partitions::inner_quadrant(0.5), partitions::strips(3, 1.0)}) {
    const PartitionedMesh mesh = build_box_mesh(2, 1.0, 6, spec);
    const SkeletonIndex sk = extract_skeleton(mesh);
    for (const SkeletonFacet& f : sk.facets()) {
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
      const Facet& facet = mesh.facets()[f.facet];
      const int cj = mesh.tag(facet.cell_a) == f.j ? facet.cell_a : facet.cell_b;
      const int ck = cj == facet.cell_a ? facet.cell_b : facet.cell_a;
      EXPECT_EQ(mesh.tag(ck), f.k);
      EXPECT_GT(f.normal.dot(mesh.cell_barycenter(ck) - mesh.cell_barycenter(cj)), 0.0);
      EXPECT_TRUE(f.k == 0 || f.j < f.k);
    }
  }
}

TEST(Skeleton, UnionOfBoundariesIsTheSkeleton) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 8, partitions::inner_quadrant(0.5));
  const SkeletonIndex sk = extract_skeleton(mesh);
  std::map<int, int> count;
  for (int j : sk.subdomains())
    for (int f : sk.boundary_of(j)) count[f]++;
  ASSERT_EQ(count.size(), sk.facets().size());
  for (const auto& [f, n] : count) EXPECT_EQ(n, sk.facets()[f].k == 0 ? 1 : 2);
}

TEST(Skeleton, ZeroMeasureInterfacesAreEmpty) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 4, partitions::quadrant());
  const SkeletonIndex sk = extract_skeleton(mesh);
  EXPECT_TRUE(sk.interface(1, 3).empty());  // diagonal quadrants meet in a point
  EXPECT_EQ(sk.measure(1, 3), 0.0);
  EXPECT_FALSE(sk.interface(1, 2).empty());
}

TEST(Skeleton, BallInTheCubeHasANonemptyClosedBoundary) {
  const PartitionedMesh coarse = build_box_mesh(3, 1.0, 3, partitions::ball(0.6));
  EXPECT_FALSE(extract_skeleton(coarse).boundary_of(1).empty());
  // On a finer mesh the ball is inside the box, so every edge of Gamma_1 is
  // shared by an even number of its faces.
  const PartitionedMesh mesh = build_box_mesh(3, 1.0, 4, partitions::ball(0.6));
  const SkeletonIndex sk = extract_skeleton(mesh);
  std::map<std::pair<int, int>, int> edges;
  for (int f : sk.boundary_of(1)) {
    const auto& v = mesh.facets()[sk.facets()[f].facet].vertices;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) edges[{v[a], v[b]}]++;
  }
  ASSERT_FALSE(edges.empty());
  for (const auto& [e, n] : edges) EXPECT_EQ(n % 2, 0);
}

TEST(Skeleton, ExtractionIsDeterministic) {
  const PartitionedMesh a = build_box_mesh(2, 1.0, 8, partitions::quadrant());
  const PartitionedMesh b = build_box_mesh(2, 1.0, 8, partitions::quadrant());
  const SkeletonIndex sa(a), sb(b);
  ASSERT_EQ(sa.facets().size(), sb.facets().size());
  for (std::size_t i = 0; i < sa.facets().size(); ++i) {
    EXPECT_EQ(sa.facets()[i].facet, sb.facets()[i].facet);
    EXPECT_EQ(sa.facets()[i].normal, sb.facets()[i].normal);
  }
}

TEST(BoxMesh, TruncationVerticesArePinned) {
  const PartitionedMesh mesh = build_box_mesh(2, 1.0, 4, partitions::single());
  int pinned = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const bool on_box = std::abs(mesh.vertex(v).cwiseAbs().maxCoeff() - 1.0) < 1e-14;
    EXPECT_EQ(mesh.is_pinned(v), on_box);
    pinned += on_box;
  }
  EXPECT_EQ(pinned, 16);
}

TEST(BoxMesh, MissingTagIsReported) {
  EXPECT_THROW(build_box_mesh(2, 1.0, 2, partitions::strips(5, 1.0)), DomainError);
}

TEST(MeshValidation, RejectsDegenerateAndDuplicateCells) {
  RMatrix v(4, 2);
  v << 0, 0, 1, 0, 0, 1, 2, 0;
  IMatrix flat(1, 3);
  flat << 0, 1, 3;
  EXPECT_THROW(PartitionedMesh(v, flat, Eigen::VectorXi::Ones(1)), DomainError);
  IMatrix dup(2, 3);
  dup << 0, 1, 2, 2, 1, 0;
  EXPECT_THROW(PartitionedMesh(v, dup, Eigen::VectorXi::Ones(2)), DomainError);
}

TEST(MeshFormat, RoundTripPreservesMeshAndBoundaryLabels) {
  PartitionedMesh mesh = build_box_mesh(2, 1.0, 6, partitions::inner_single(0.5));
  mesh.assign_boundary([](const RVector& x) {
    return x(1) > 0 ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;
  });
  std::stringstream io;
  write_mesh(io, mesh);
  const PartitionedMesh back = read_mesh(io);
  EXPECT_EQ(back.vertices(), mesh.vertices());
  EXPECT_EQ(back.cells(), mesh.cells());
  EXPECT_EQ(back.tags(), mesh.tags());
  for (std::size_t f = 0; f < mesh.facets().size(); ++f)
    if (mesh.facets()[f].kind == FacetKind::Skeleton)
      EXPECT_EQ(back.facets()[f].boundary, mesh.facets()[f].boundary);
}

TEST(MeshFormat, ParseErrorsCarryLineNumbers) {
  std::istringstream in(
      "skelmesh 2 3 1\n"
      "# comment line\n"
      "0 0\n"
      "1 0\n"
      "0 oops\n"
      "0 1 2 1\n");
  try {
    read_mesh(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
  std::istringstream dup("skelmesh 2 3 2\n0 0\n1 0\n0 1\n0 1 2 1\n2 1 0 1\n");
  try {
    read_mesh(dup);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
  }
}
