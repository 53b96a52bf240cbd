#ifndef SKELPOT_CONFIG_HPP
#define SKELPOT_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "skelpot/linsolve.hpp"
#include "skelpot/skeleton.hpp"

namespace skelpot {

// Coefficient description: a constant, "tensor a11 a12 ...", "checkerboard a b n"
// or "radial_ramp a0 a1 r0". Tensor forms are allowed only for A.
struct CoefficientSpec {
  std::string kind = "constant";
  std::vector<Real> values{1.0};
};

// Flat key = value run configuration. Every field has a default, so an empty
// file is a valid configuration.
struct RunConfig {
  std::string source;    // normalized text used for hashing
  std::string base_dir;  // directory of the config file; anchors relative paths

  int dimension = 2;
  Real box_half_width = 1.0;
  int resolution = 32;
  std::string partition = "half_split";
  Real inner_half_width = 0.5;
  int strips = 3;
  Real ball_radius = 0.5;
  std::string mesh_path;
  std::string boundary = "dirichlet";

  CoefficientSpec A;
  CoefficientSpec p;
  std::map<int, CoefficientSpec> region_A;
  std::map<int, CoefficientSpec> region_p;
  ExtensionMode extension_mode = ExtensionMode::Global;

  std::vector<Complex> s{Complex(1.0), std::polar(2.0, 3.14159265358979323846 / 6.0)};
  std::vector<Real> sweep_abs{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<Real> sweep_arg_deg{15.0, 30.0, 60.0};
  Real s0 = 0.0;
  std::uint64_t seed = 1;
  int samples = 5;
  SolverOptions solver;

  std::string beta = "incident";
  std::vector<Real> incident_direction{1.0, 0.0};
  bool corrupt_neumann_mean_sign = false;
  Real truncation_factor = 2.0;
};

RunConfig parse_config(std::istream& in);
// Relative mesh and beta paths are then taken relative to the file.
RunConfig load_config(const std::string& path);
std::string resolve_path(const RunConfig& config, const std::string& path);
// Applies a seed override and records it in the hashed source.
void override_seed(RunConfig& config, std::uint64_t seed);

// FNV-1a 64 of the normalized configuration text, as 16 hex digits.
std::string config_hash(const RunConfig& config);
// Artifact version: project version plus the git revision when known.
std::string artifact_version();

// "2", "1+0.5i", "-3i" or "polar <modulus> <degrees>".
Complex parse_complex(const std::string& text);

PartitionedMesh build_mesh(const RunConfig& config);
PartitionedMesh build_mesh(const RunConfig& config, Real half_width, int resolution);
CoefficientField build_coefficients(const RunConfig& config, const PartitionedMesh& mesh);
// Extended coefficients of every subdomain, ascending by tag.
std::vector<CoefficientField> build_extensions(const RunConfig& config,
                                               const Discretization& disc,
                                               const CoefficientField& global);
MultiTrace build_beta(const RunConfig& config, const Discretization& disc, Frequency s);

// CSV with columns j,node_index,component,re,im; node_index is the local
// trace node and component is D or N.
MultiTrace read_beta_csv(std::istream& in, const Discretization& disc);
void write_beta_csv(std::ostream& out, const MultiTrace& beta);

}  // namespace skelpot

#endif
