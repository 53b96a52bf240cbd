#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "skelpot/config.hpp"

using namespace skelpot;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse("");
  EXPECT_EQ(c.dimension, 2);
  EXPECT_EQ(c.resolution, 32);
  EXPECT_EQ(c.partition, "half_split");
  EXPECT_EQ(c.s.size(), 2u);
}

TEST(Config, ParsesKeysCommentsAndRegions) {
  const RunConfig c = parse(
      "# comment\n"
      "resolution = 8   # trailing\n"
      "partition = inner_quadrant\n"
      "A = tensor 2 0.5 0.5 1\n"
      "subdomain.3.p = 4\n"
      "extension_mode = constant_freeze\n"
      "s = 1+2i, polar 2 45\n"
      "seed = 42\n");
  EXPECT_EQ(c.resolution, 8);
  EXPECT_EQ(c.partition, "inner_quadrant");
  EXPECT_EQ(c.A.kind, "tensor");
  EXPECT_EQ(c.region_p.at(3).values[0], 4.0);
  EXPECT_EQ(c.extension_mode, ExtensionMode::ConstantFreeze);
  ASSERT_EQ(c.s.size(), 2u);
  EXPECT_EQ(c.s[0], Complex(1.0, 2.0));
  EXPECT_NEAR(std::abs(c.s[1] - std::polar(2.0, M_PI / 4)), 0.0, 1e-15);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("resolution = 4\nbogus = 1\n"), 2);
  EXPECT_EQ(error_line("\n\nresolution\n"), 3);
  EXPECT_EQ(error_line("seed = 1\nseed = 2\n"), 2);
  EXPECT_EQ(error_line("s = -1\n"), 1);
  EXPECT_EQ(error_line("p = tensor 1 0 0 1\n"), 1);
  EXPECT_EQ(error_line("resolution = 4.5\n"), 1);
}

TEST(Config, ValidatesSweepFrequencies) {
  EXPECT_THROW(parse("sweep_arg_deg = 95\n"), DomainError);
  EXPECT_THROW(parse("s0 = 2\n"), DomainError);  // default s = 1 is below the floor
}

TEST(Config, ParsesComplexForms) {
  EXPECT_EQ(parse_complex("2"), Complex(2.0, 0.0));
  EXPECT_EQ(parse_complex("1.5-0.25i"), Complex(1.5, -0.25));
  EXPECT_EQ(parse_complex("-3i"), Complex(0.0, -3.0));
  EXPECT_EQ(parse_complex("i"), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex("1e-1+2e+0i"), Complex(0.1, 2.0));
  EXPECT_THROW(parse_complex("abc"), DomainError);
}

TEST(Config, HashIsStableAndSensitive) {
  const RunConfig a = parse("resolution = 8\n");
  const RunConfig b = parse("resolution   =   8   # same\n");
  const RunConfig c = parse("resolution = 9\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
  RunConfig d = a;
  override_seed(d, 5);
  EXPECT_NE(config_hash(a), config_hash(d));
  EXPECT_EQ(d.seed, 5u);
}

TEST(Config, BuildsEveryGeneratedPartition) {
  for (const char* p : {"single", "half_split", "quadrant", "strips", "inner_split", "inner_single",
                        "inner_quadrant", "ball"}) {
    const RunConfig c = parse(std::string("resolution = 8\npartition = ") + p + "\n");
    EXPECT_NO_THROW(build_mesh(c)) << p;
  }
}

TEST(Config, MixedBoundarySplitsAtXZero) {
  const RunConfig c = parse("resolution = 8\npartition = inner_single\nboundary = mixed\n");
  const PartitionedMesh mesh = build_mesh(c);
  const SkeletonIndex sk(mesh);
  int dirichlet = 0, neumann = 0;
  for (const SkeletonFacet& f : sk.facets()) {
    ASSERT_EQ(f.k, 0);
    const bool right = mesh.facet_barycenter(f.facet)(0) > 0;
    EXPECT_EQ(mesh.facets()[f.facet].boundary,
              right ? BoundaryKind::Neumann : BoundaryKind::Dirichlet);
    (right ? neumann : dirichlet)++;
  }
  EXPECT_GT(dirichlet, 0);
  EXPECT_GT(neumann, 0);
}

TEST(Config, RegionCoefficientsOverrideFallback) {
  const RunConfig c = parse("resolution = 4\npartition = half_split\nA = 2\nsubdomain.1.A = 5\n");
  const PartitionedMesh mesh = build_mesh(c);
  const CoefficientField f = build_coefficients(c, mesh);
  for (int cell = 0; cell < mesh.num_cells(); ++cell)
    EXPECT_DOUBLE_EQ(f.A(cell)(0, 0), mesh.tag(cell) == 1 ? 5.0 : 2.0);
}

TEST(Config, BetaCsvRoundTrip) {
  const RunConfig c = parse("resolution = 4\npartition = quadrant\n");
  const Discretization disc(build_mesh(c));
  const MultiTrace beta = random_multitrace(disc, 3);
  std::stringstream io;
  write_beta_csv(io, beta);
  const MultiTrace back = read_beta_csv(io, disc);
  const MultiTraceLayout layout(disc);
  EXPECT_EQ((layout.pack(beta) - layout.pack(back)).norm(), 0.0);
}

TEST(Config, BetaCsvReportsBadLines) {
  const RunConfig c = parse("resolution = 4\n");
  const Discretization disc(build_mesh(c));
  std::istringstream bad("j,node_index,component,re,im\n1,0,D,1,0\n1,0,X,1,0\n");
  try {
    read_beta_csv(bad, disc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream range("1,999,D,1,0\n");
  EXPECT_THROW(read_beta_csv(range, disc), ParseError);
}

TEST(Config, RelativePathsFollowTheConfigFile) {
  RunConfig c;
  EXPECT_EQ(resolve_path(c, "beta.csv"), "beta.csv");
  c.base_dir = "/data/run";
  EXPECT_EQ(resolve_path(c, "beta.csv"), "/data/run/beta.csv");
  EXPECT_EQ(resolve_path(c, "/abs/beta.csv"), "/abs/beta.csv");
  const std::string path = ::testing::TempDir() + "relative.cfg";
  std::ofstream(path) << "resolution = 4\n";
  EXPECT_EQ(load_config(path).base_dir, std::filesystem::path(path).parent_path().string());
}
