#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skelpot/bench.hpp"
#include "support.hpp"

using namespace skelpot;

namespace {

RunConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kSmallSweep =
    "resolution = 8\n"
    "partition = inner_split\n"
    "sweep_abs = 1, 2, 4, 8\n"
    "sweep_arg_deg = 30\n"
    "seed = 3\n";

std::string sweep_text(const RunConfig& c, int threads) {
  const SweepResult r = run_sweep(c, threads);
  std::ostringstream out;
  write_sweep_csv(out, r, c);
  write_fits_csv(out, r, c);
  r.checks.write_csv(out);
  return out.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(SKELPOT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(FitExponent, ExactOnPowerLaw) {
  const std::vector<Real> x{1, 2, 4, 8, 16};
  std::vector<Real> y;
  for (Real v : x) y.push_back(3.0 * std::pow(v, -1.5));
  const ExponentFit f = fit_exponent(x, y);
  EXPECT_NEAR(f.exponent, -1.5, 1e-13);
  EXPECT_NEAR(f.residual, 0.0, 1e-13);
  EXPECT_EQ(f.points, 5);
  EXPECT_THROW(fit_exponent({1, 2, 3}, {1, 2, 3}), Error);
  EXPECT_THROW(fit_exponent({1, 2, 3, 4}, {1, 0, 3, 4}), Error);
}

TEST(Report, CsvRowsAndStatus) {
  Report r("0123456789abcdef", "0.1.0");
  r.at_most("a[s=1]", 0.5, 1.0);
  r.above("b", 0.0, 0.0);
  r.skip("c");
  r.info("d", 2.0);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.find("b")->status, CheckStatus::Fail);
  EXPECT_EQ(r.find("missing"), nullptr);
  std::ostringstream out;
  r.write_csv(out);
  EXPECT_EQ(out.str(),
            "check,value,threshold,pass,config_hash,version\n"
            "\"a[s=1]\",5.000000000e-01,1.000000000e+00,pass,0123456789abcdef,0.1.0\n"
            "\"b\",0.000000000e+00,0.000000000e+00,fail,0123456789abcdef,0.1.0\n"
            "\"c\",,,skipped,0123456789abcdef,0.1.0\n"
            "\"d\",2.000000000e+00,,info,0123456789abcdef,0.1.0\n");
  Report nan("h", "v");
  nan.at_most("x", std::nan(""), 1.0);
  EXPECT_FALSE(nan.passed());
}

TEST(Verify, PassesOnCleanConfiguration) {
  skelpot::testing::QuietWarnings quiet;
  const Report r = run_verify(config_from("resolution = 8\npartition = quadrant\nsamples = 2\n"));
  EXPECT_TRUE(r.passed());
  // Four subdomains, two frequencies, eleven per-subdomain checks, one polarity check.
  EXPECT_EQ(r.rows().size(), 4u * 2u * 11u + 1u);
}

TEST(Verify, FaultInjectionIsDetected) {
  skelpot::testing::QuietWarnings quiet;
  const Report r = run_verify(config_from(
      "resolution = 8\nsamples = 2\ns = 1\nfault_injection = neumann_mean_sign\n"));
  EXPECT_FALSE(r.passed());
  const CheckRow* p = r.find("calderon_projection[s=1+0i,j=1]");
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->status, CheckStatus::Fail);
}

TEST(Verify, EmptySkeletonIsSkipped) {
  const Report r = run_verify(config_from("resolution = 4\npartition = single\n"));
  EXPECT_TRUE(r.passed());
  for (const CheckRow& row : r.rows()) EXPECT_EQ(row.status, CheckStatus::Skipped);
}

TEST(Sweep, DeterministicAcrossRepeatsAndThreads) {
  skelpot::testing::QuietWarnings quiet;
  const RunConfig c = config_from(kSmallSweep);
  const std::string one = sweep_text(c, 1);
  EXPECT_EQ(one, sweep_text(c, 1));
  EXPECT_EQ(one, sweep_text(c, 2));
}

TEST(Sweep, ChecksPassOnSmallGrid) {
  skelpot::testing::QuietWarnings quiet;
  const SweepResult r = run_sweep(config_from(kSmallSweep), 1);
  for (const CheckRow& row : r.checks.rows())
    EXPECT_NE(row.status, CheckStatus::Fail) << row.check << ' ' << row.value;
  EXPECT_FALSE(r.fits.empty());
  EXPECT_FALSE(r.points.empty());
}

TEST(Solve, SkeletonMatchesTransmissionConditions) {
  skelpot::testing::QuietWarnings quiet;
  const std::string dir = ::testing::TempDir() + "solve_out";
  const Report r = run_solve(
      config_from("resolution = 8\npartition = inner_split\ns = polar 2 30\n"), dir);
  EXPECT_TRUE(r.passed());
  ASSERT_NE(r.find("skeleton_vs_direct"), nullptr);
  EXPECT_LT(r.find("skeleton_vs_direct")->value, 1e-3);
  EXPECT_LT(r.find("skeleton_vs_incident")->value, 0.05);
  EXPECT_TRUE(std::filesystem::exists(dir + "/skeleton_1.vtk"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/trace_neumann_2.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/beta.csv"));
}

TEST(Truncation, RequiresBoundedOmega) {
  EXPECT_THROW(run_truncation(config_from("resolution = 4\npartition = half_split\n")), Error);
}

TEST(Truncation, SmallChangeForLargeDecay) {
  skelpot::testing::QuietWarnings quiet;
  const Report r = run_truncation(config_from(
      "box_half_width = 2\nresolution = 16\npartition = inner_single\ns = 4, 0.2+0.05i\n"));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.find("truncation_change[s=4+0i]")->status, CheckStatus::Pass);
  // Weak damping is reported, not judged.
  EXPECT_EQ(r.find("truncation_change[s=0.2+0.05i]")->status, CheckStatus::Info);
  EXPECT_NE(r.find("insufficient_decay[s=0.2+0.05i]"), nullptr);
}

TEST(Uwvp, ResidualDecreasesUnderRefinement) {
  const Frequency s = Frequency::polar(2.0, M_PI / 6.0);
  const Real r8 = uwvp_residual(8, s), r16 = uwvp_residual(16, s);
  EXPECT_LT(r16, 0.5 * r8);
  EXPECT_LT(r16, 0.1);
}

TEST(Cli, ExitCodes) {
  const std::string fixtures = SKELPOT_FIXTURES;
  const std::string out = ::testing::TempDir() + "cli_out";
  EXPECT_EQ(run_cli("verify --config " + fixtures + "/verify_half_split.cfg --out " + out), 0);
  EXPECT_TRUE(std::filesystem::exists(out + "/verify.csv"));
  const std::string bad = write_temp("bad.cfg", "resolution = 8\nbogus = 1\n");
  EXPECT_EQ(run_cli("verify --config " + bad), 2);
  const std::string fault =
      write_temp("fault.cfg", "resolution = 8\ns = 1\nsamples = 1\nfault_injection = neumann_mean_sign\n");
  EXPECT_EQ(run_cli("verify --config " + fault), 1);
  EXPECT_NE(run_cli("verify"), 0);
  EXPECT_NE(run_cli("unknown --config " + bad), 0);
}

TEST(Solve, ShippedFixturesPass) {
  skelpot::testing::QuietWarnings quiet;
  const std::string fixtures = SKELPOT_FIXTURES;
  for (const char* name : {"solve_incident", "solve_checkerboard", "solve_neumann"}) {
    // The checkerboard fixture reads its jump data relative to the config file.
    const Report r = run_solve(load_config(fixtures + "/" + name + ".cfg"), "");
    EXPECT_TRUE(r.passed()) << name;
    EXPECT_LT(r.find("skeleton_vs_direct")->value, 0.02) << name;
  }
  const Report inc = run_solve(load_config(fixtures + "/solve_incident.cfg"), "");
  EXPECT_LT(inc.find("skeleton_vs_incident")->value, 0.05);
  EXPECT_LT(inc.find("direct_dirichlet_jump_residual[1,2]")->value, 1e-14);
}
