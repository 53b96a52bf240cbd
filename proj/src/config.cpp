#include "skelpot/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#ifndef SKELPOT_VERSION
#define SKELPOT_VERSION "unknown"
#endif

namespace skelpot {

namespace {

constexpr Real kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Real to_real(const std::string& s) {
  std::size_t used = 0;
  Real v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw DomainError("not a number: '" + s + "'");
  return v;
}

long to_integer(const std::string& s) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not an integer: '" + s + "'");
  return v;
}

std::vector<Real> real_list(const std::string& s) {
  std::vector<Real> out;
  for (const std::string& w : split(s, ',')) out.push_back(to_real(w));
  if (out.empty()) throw DomainError("empty list");
  return out;
}

CoefficientSpec coefficient_spec(const std::string& value, bool tensor_allowed) {
  const std::vector<std::string> w = words(value);
  if (w.empty()) throw DomainError("empty coefficient");
  CoefficientSpec spec;
  spec.values.clear();
  const bool named = w[0] == "tensor" || w[0] == "checkerboard" || w[0] == "radial_ramp";
  spec.kind = named ? w[0] : "constant";
  for (std::size_t i = named ? 1 : 0; i < w.size(); ++i) spec.values.push_back(to_real(w[i]));
  if (spec.kind == "constant" && spec.values.size() != 1)
    throw DomainError("constant coefficient takes one value");
  if (spec.kind == "tensor" && !tensor_allowed) throw DomainError("p must be scalar");
  if (spec.kind == "tensor" && spec.values.size() != 4 && spec.values.size() != 9)
    throw DomainError("tensor takes 4 or 9 entries");
  if (spec.kind == "checkerboard" && spec.values.size() != 3)
    throw DomainError("checkerboard takes a b n");
  if (spec.kind == "radial_ramp" && spec.values.size() != 3)
    throw DomainError("radial_ramp takes a0 a1 r0");
  return spec;
}

ScalarFunction scalar_field(const CoefficientSpec& spec, Real half_width) {
  if (spec.kind == "constant") return fields::constant(spec.values[0]);
  if (spec.kind == "checkerboard")
    return fields::checkerboard(spec.values[0], spec.values[1], static_cast<int>(spec.values[2]),
                                half_width);
  if (spec.kind == "radial_ramp")
    return fields::radial_ramp(spec.values[0], spec.values[1], spec.values[2]);
  throw DomainError("coefficient kind '" + spec.kind + "' is not scalar");
}

TensorFunction tensor_field(const CoefficientSpec& spec, int dim, Real half_width) {
  if (spec.kind != "tensor") return fields::isotropic(scalar_field(spec, half_width), dim);
  const int n = spec.values.size() == 4 ? 2 : 3;
  if (n != dim) throw DomainError("tensor size does not match the dimension");
  RMatrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = spec.values[r * n + c];
  return fields::constant_tensor(a);
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "dimension") {
    c.dimension = static_cast<int>(to_integer(value));
    if (c.dimension != 2 && c.dimension != 3) throw DomainError("dimension must be 2 or 3");
  } else if (key == "box_half_width") {
    c.box_half_width = to_real(value);
    if (c.box_half_width <= 0) throw DomainError("box_half_width must be positive");
  } else if (key == "resolution") {
    c.resolution = static_cast<int>(to_integer(value));
    if (c.resolution < 1) throw DomainError("resolution must be positive");
  } else if (key == "partition") {
    static const std::set<std::string> known{"single",      "half_split",   "quadrant",
                                             "strips",      "inner_split",  "inner_single",
                                             "inner_quadrant", "ball",      "file"};
    if (!known.count(value)) throw DomainError("unknown partition '" + value + "'");
    c.partition = value;
  } else if (key == "inner_half_width") {
    c.inner_half_width = to_real(value);
  } else if (key == "strips") {
    c.strips = static_cast<int>(to_integer(value));
  } else if (key == "ball_radius") {
    c.ball_radius = to_real(value);
  } else if (key == "mesh_path") {
    c.mesh_path = value;
  } else if (key == "boundary") {
    if (value != "dirichlet" && value != "neumann" && value != "mixed")
      throw DomainError("boundary must be dirichlet, neumann or mixed");
    c.boundary = value;
  } else if (key == "A") {
    c.A = coefficient_spec(value, true);
  } else if (key == "p") {
    c.p = coefficient_spec(value, false);
  } else if (key.rfind("subdomain.", 0) == 0) {
    const auto parts = split(key, '.');
    if (parts.size() != 3 || (parts[2] != "A" && parts[2] != "p"))
      throw DomainError("expected subdomain.<tag>.A or subdomain.<tag>.p");
    const int tag = static_cast<int>(to_integer(parts[1]));
    if (tag < 0) throw DomainError("subdomain tags are non-negative");
    if (parts[2] == "A")
      c.region_A[tag] = coefficient_spec(value, true);
    else
      c.region_p[tag] = coefficient_spec(value, false);
  } else if (key == "extension_mode") {
    if (value == "global")
      c.extension_mode = ExtensionMode::Global;
    else if (value == "constant_freeze")
      c.extension_mode = ExtensionMode::ConstantFreeze;
    else
      throw DomainError("extension_mode must be global or constant_freeze");
  } else if (key == "s") {
    c.s.clear();
    for (const std::string& item : split(value, ',')) {
      c.s.push_back(parse_complex(item));
      Frequency(c.s.back());  // rejects Re s <= 0 at the offending line
    }
  } else if (key == "sweep_abs") {
    c.sweep_abs = real_list(value);
  } else if (key == "sweep_arg_deg") {
    c.sweep_arg_deg = real_list(value);
  } else if (key == "s0") {
    c.s0 = to_real(value);
  } else if (key == "seed") {
    const long v = to_integer(value);
    if (v < 0) throw DomainError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "samples") {
    c.samples = static_cast<int>(to_integer(value));
    if (c.samples < 1) throw DomainError("samples must be positive");
  } else if (key == "solver") {
    if (value == "auto")
      c.solver.kind = SolverKind::Auto;
    else if (value == "direct")
      c.solver.kind = SolverKind::Direct;
    else if (value == "iterative")
      c.solver.kind = SolverKind::Iterative;
    else
      throw DomainError("solver must be auto, direct or iterative");
  } else if (key == "solver_tolerance") {
    c.solver.tolerance = to_real(value);
  } else if (key == "beta") {
    if (value != "incident" && value != "random" && value.rfind("file:", 0) != 0)
      throw DomainError("beta must be incident, random or file:<path>");
    c.beta = value;
  } else if (key == "incident_direction") {
    c.incident_direction = real_list(value);
  } else if (key == "fault_injection") {
    if (value == "none")
      c.corrupt_neumann_mean_sign = false;
    else if (value == "neumann_mean_sign")
      c.corrupt_neumann_mean_sign = true;
    else
      throw DomainError("fault_injection must be none or neumann_mean_sign");
  } else if (key == "truncation_factor") {
    c.truncation_factor = to_real(value);
    if (c.truncation_factor <= 1.0) throw DomainError("truncation_factor must exceed 1");
  } else {
    throw DomainError("unknown key '" + key + "'");
  }
}

void validate(const RunConfig& c) {
  for (Complex s : c.s) Frequency(s, c.s0);
  for (Real a : c.sweep_abs)
    for (Real deg : c.sweep_arg_deg) Frequency::polar(a, deg * kPi / 180.0, c.s0);
  if (static_cast<int>(c.incident_direction.size()) != c.dimension)
    throw DomainError("incident_direction must have one entry per dimension");
  if (c.partition == "file" && c.mesh_path.empty())
    throw DomainError("partition = file needs mesh_path");
}

}  // namespace

Complex parse_complex(const std::string& text) {
  const std::vector<std::string> w = words(text);
  if (w.size() == 3 && w[0] == "polar") return std::polar(to_real(w[1]), to_real(w[2]) * kPi / 180.0);
  std::string t;
  for (const std::string& part : w) t += part;
  if (t.empty()) throw DomainError("empty complex number");
  if (t.back() != 'i') return to_real(t);
  t.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;)
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      cut = i;
      break;
    }
  auto imag_of = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return to_real(s);
  };
  if (cut == std::string::npos) return Complex(0.0, imag_of(t));
  return Complex(to_real(t.substr(0, cut)), imag_of(t.substr(cut)));
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  std::ostringstream normalized;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(number, "missing key");
    if (value.empty()) throw ParseError(number, "missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(number, "duplicate key '" + key + "'");
    try {
      apply(c, key, value);
    } catch (const DomainError& e) {
      throw ParseError(number, e.what());
    }
    normalized << key << '=' << value << '\n';
  }
  c.source = normalized.str();
  validate(c);
  return c;
}

std::string resolve_path(const RunConfig& config, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || config.base_dir.empty()) return path;
  return (std::filesystem::path(config.base_dir) / p).string();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  RunConfig c = parse_config(in);
  c.base_dir = std::filesystem::path(path).parent_path().string();
  return c;
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.source += "seed_override=" + std::to_string(seed) + '\n';
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.source) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string artifact_version() { return SKELPOT_VERSION; }

PartitionedMesh build_mesh(const RunConfig& config) {
  return build_mesh(config, config.box_half_width, config.resolution);
}

PartitionedMesh build_mesh(const RunConfig& c, Real half_width, int resolution) {
  if (c.partition == "file") return load_mesh(resolve_path(c, c.mesh_path));
  PartitionSpec spec;
  if (c.partition == "single")
    spec = partitions::single();
  else if (c.partition == "half_split")
    spec = partitions::half_split();
  else if (c.partition == "quadrant")
    spec = partitions::quadrant();
  else if (c.partition == "strips")
    spec = partitions::strips(c.strips, half_width);
  else if (c.partition == "inner_split")
    spec = partitions::inner_split(c.inner_half_width);
  else if (c.partition == "inner_single")
    spec = partitions::inner_single(c.inner_half_width);
  else if (c.partition == "inner_quadrant")
    spec = partitions::inner_quadrant(c.inner_half_width);
  else
    spec = partitions::ball(c.ball_radius);
  PartitionedMesh mesh = build_box_mesh(c.dimension, half_width, resolution, spec);
  if (c.boundary == "neumann")
    mesh.assign_boundary([](const RVector&) { return BoundaryKind::Neumann; });
  else if (c.boundary == "mixed")
    mesh.assign_boundary(
        [](const RVector& x) { return x(0) > 0 ? BoundaryKind::Neumann : BoundaryKind::Dirichlet; });
  return mesh;
}

CoefficientField build_coefficients(const RunConfig& c, const PartitionedMesh& mesh) {
  const Real r = mesh.box_half_width();
  const RegionCoefficient fallback{tensor_field(c.A, mesh.dim(), r), scalar_field(c.p, r)};
  std::map<int, RegionCoefficient> regions;
  std::set<int> tags;
  for (const auto& [t, _] : c.region_A) tags.insert(t);
  for (const auto& [t, _] : c.region_p) tags.insert(t);
  for (int t : tags) {
    auto a = c.region_A.find(t);
    auto p = c.region_p.find(t);
    regions[t] = {a == c.region_A.end() ? fallback.A : tensor_field(a->second, mesh.dim(), r),
                  p == c.region_p.end() ? fallback.p : scalar_field(p->second, r)};
  }
  return sample_coefficients(mesh, regions, fallback);
}

std::vector<CoefficientField> build_extensions(const RunConfig& config, const Discretization& disc,
                                               const CoefficientField& global) {
  std::vector<CoefficientField> out;
  for (int j : disc.subdomains()) out.push_back(extend(disc.mesh(), global, j, config.extension_mode));
  return out;
}

MultiTrace build_beta(const RunConfig& c, const Discretization& disc, Frequency s) {
  if (c.beta == "random") return random_multitrace(disc, c.seed);
  if (c.beta.rfind("file:", 0) == 0) {
    const std::string path = resolve_path(c, c.beta.substr(5));
    std::ifstream in(path);
    if (!in) throw Error("cannot open beta file '" + path + "'");
    return read_beta_csv(in, disc);
  }
  RVector d(disc.mesh().dim());
  for (int i = 0; i < d.size(); ++i) d(i) = c.incident_direction[i];
  return beta_from_incident_wave(disc, d.normalized(), s);
}

MultiTrace read_beta_csv(std::istream& in, const Discretization& disc) {
  const MultiTraceLayout layout(disc);
  MultiTrace beta = layout.zeros();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::vector<std::string> f = split(body, ',');
    if (number == 1 && !f.empty() && f[0] == "j") continue;  // header
    if (f.size() != 5) throw ParseError(number, "expected j,node_index,component,re,im");
    try {
      const int j = static_cast<int>(to_integer(f[0]));
      const long node = to_integer(f[1]);
      CauchyData& part = beta.parts[layout.slot(j)];
      if (node < 0 || node >= part.dirichlet.values.size())
        throw DomainError("node_index out of range for Gamma_" + std::to_string(j));
      const Complex v(to_real(f[3]), to_real(f[4]));
      if (f[2] == "D")
        part.dirichlet.values(node) = v;
      else if (f[2] == "N")
        part.neumann.values(node) = v;
      else
        throw DomainError("component must be D or N");
    } catch (const DomainError& e) {
      throw ParseError(number, e.what());
    }
  }
  return beta;
}

void write_beta_csv(std::ostream& out, const MultiTrace& beta) {
  out << "j,node_index,component,re,im\n" << std::setprecision(17);
  for (const CauchyData& c : beta.parts) {
    for (Eigen::Index q = 0; q < c.dirichlet.values.size(); ++q)
      out << c.dirichlet.j << ',' << q << ",D," << c.dirichlet.values(q).real() << ','
          << c.dirichlet.values(q).imag() << '\n';
    for (Eigen::Index q = 0; q < c.neumann.values.size(); ++q)
      out << c.neumann.j << ',' << q << ",N," << c.neumann.values(q).real() << ','
          << c.neumann.values(q).imag() << '\n';
  }
}

}  // namespace skelpot
