#include "skelpot/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "skelpot/log.hpp"
#include "skelpot/quadrature.hpp"

namespace skelpot {

namespace {

constexpr Real kPi = 3.14159265358979323846;

std::string format_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

std::string tagged(const std::string& name, Complex s, int j) {
  return name + "[s=" + format_complex(s) + ",j=" + std::to_string(j) + "]";
}

CVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<Real> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

BrokenField difference(const BrokenField& a, const BrokenField& b) {
  return {a.j, a.s, a.base - b.base, a.scaled_jump - b.scaled_jump};
}

CellFilter side_cells(const BrokenSpace& space, Side side) {
  return [&space, side](int c) { return space.side_of_cell(c) == side; };
}

// Minus-side restriction of a broken field, zero on the plus side.
BrokenField minus_part(const BrokenSpace& space, const BrokenField& u) {
  const CVector minus = side_values(space, u, Side::Minus);
  return from_side_values(space, minus, CVector::Zero(minus.size()), u.s);
}

Real safe_ratio(Real num, Real den) { return den > 0.0 ? num / den : num; }

// Norm of a multi-trace in the block-diagonal Sobolev Grams.
Real x_norm(const MultiTrace& m, const std::vector<SobolevGrams>& grams) {
  Real total = 0.0;
  for (std::size_t i = 0; i < m.parts.size(); ++i) {
    const CVector& d = m.parts[i].dirichlet.values;
    const CVector& n = m.parts[i].neumann.values;
    total += std::real(d.dot(grams[i].half * d)) + std::real(n.dot(grams[i].minus_half * n));
  }
  return std::sqrt(std::max(total, 0.0));
}

std::vector<SobolevGrams> all_grams(const Discretization& disc, SolverOptions options) {
  std::vector<SobolevGrams> out;
  for (int j : disc.subdomains()) out.push_back(sobolev_grams(disc.broken(j), options));
  return out;
}

template <class Task>
void parallel_for(int count, int threads, const Task& task) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string format_real(Real value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", value);
  return buf;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Info: return "info";
  }
  return "info";
}

Report::Report(std::string config_hash, std::string version)
    : hash_(std::move(config_hash)), version_(std::move(version)) {}

void Report::at_most(const std::string& check, Real value, Real threshold) {
  const bool ok = std::isfinite(value) && value <= threshold;
  rows_.push_back({check, value, threshold, ok ? CheckStatus::Pass : CheckStatus::Fail});
}

void Report::above(const std::string& check, Real value, Real threshold) {
  const bool ok = std::isfinite(value) && value > threshold;
  rows_.push_back({check, value, threshold, ok ? CheckStatus::Pass : CheckStatus::Fail});
}

void Report::skip(const std::string& check) {
  rows_.push_back({check, std::numeric_limits<Real>::quiet_NaN(),
                   std::numeric_limits<Real>::quiet_NaN(), CheckStatus::Skipped});
}

void Report::info(const std::string& check, Real value) {
  rows_.push_back({check, value, std::numeric_limits<Real>::quiet_NaN(), CheckStatus::Info});
}

const CheckRow* Report::find(const std::string& check) const {
  for (const CheckRow& r : rows_)
    if (r.check == check) return &r;
  return nullptr;
}

bool Report::passed() const {
  return std::none_of(rows_.begin(), rows_.end(),
                      [](const CheckRow& r) { return r.status == CheckStatus::Fail; });
}

void Report::write_csv(std::ostream& out) const {
  out << "check,value,threshold,pass,config_hash,version\n";
  for (const CheckRow& r : rows_) {
    const std::string value = std::isnan(r.value) ? "" : format_real(r.value);
    const std::string threshold = std::isnan(r.threshold) ? "" : format_real(r.threshold);
    out << '"' << r.check << "\"," << value << ',' << threshold << ',' << to_string(r.status) << ','
        << hash_ << ',' << version_ << '\n';
  }
}

Report run_verify(const RunConfig& config) {
  Report report(config_hash(config), artifact_version());
  const Discretization disc(build_mesh(config));
  static const char* interface_checks[] = {
      "slp_dirichlet_jump", "slp_neumann_jump", "dlp_dirichlet_jump",   "dlp_neumann_jump",
      "dlp_lifting_independence", "green_interior", "green_exterior_leak",
      "calderon_projection", "v_coercivity",     "w_coercivity",         "c_coercivity",
      "self_polarity"};
  if (disc.skeleton().empty()) {
    for (const char* c : interface_checks) report.skip(c);
    return report;
  }
  const CoefficientField global = build_coefficients(config, disc.mesh());
  const std::vector<CoefficientField> extended = build_extensions(config, disc, global);
  const std::vector<SobolevGrams> grams = all_grams(disc, config.solver);
  CalderonOptions calderon;
  calderon.corrupt_neumann_mean_sign = config.corrupt_neumann_mean_sign;
  std::mt19937_64 rng(config.seed);

  for (Complex sv : config.s) {
    const Frequency s(sv, config.s0);
    for (std::size_t slot = 0; slot < extended.size(); ++slot) {
      const int j = disc.subdomains()[slot];
      const BrokenSpace& space = disc.broken(j);
      const int n = space.trace().size();
      const SubdomainForms forms(space, extended[slot]);
      const SubdomainPotentials pot(forms, s, config.solver);
      const BoundaryOperators ops(pot, calderon);
      Real slp_d = 0, slp_n = 0, dlp_d = 0, dlp_n = 0, lift = 0;
      Real green_in = 0, green_out = 0, projection = 0;
      for (int k = 0; k < config.samples; ++k) {
        const CVector phi = random_vector(rng, n);
        const CVector psi = random_vector(rng, n);
        const JumpsAndMeans js =
            jump_and_mean(forms, as_broken(space, pot.single_layer({j, phi}), s));
        slp_d = std::max(slp_d, js.jump_dirichlet.values.cwiseAbs().maxCoeff());
        slp_n = std::max(slp_n, (js.jump_neumann.values + phi).norm() / phi.norm());

        const BrokenField d = pot.double_layer(DirichletTrace{j, psi});
        const JumpsAndMeans jd = jump_and_mean(forms, d);
        dlp_d = std::max(dlp_d, (jd.jump_dirichlet.values - psi).cwiseAbs().maxCoeff());
        dlp_n = std::max(dlp_n, jd.jump_neumann.values.norm() / psi.norm());
        const BrokenField other = pot.double_layer(
            restrict_to_side(space, lifting_E(space, {j, psi}, s), Side::Plus, s));
        lift = std::max(lift, safe_ratio(freq_norm(space, difference(other, d)), freq_norm(space, d)));

        const BrokenField u = side_solution(forms, Side::Minus, {j, psi}, s);
        const BrokenField g = pot.green(interior_cauchy_data(forms, u));
        const Real un = freq_norm(space, u, side_cells(space, Side::Minus));
        green_in = std::max(green_in, safe_ratio(freq_norm(space, difference(g, u),
                                                           side_cells(space, Side::Minus)),
                                                 un));
        green_out =
            std::max(green_out, safe_ratio(freq_norm(space, g, side_cells(space, Side::Plus)), un));

        // Interior Cauchy data of the Green's representation of random data.
        const BrokenField r = pot.green({{j, phi}, {j, psi}});
        projection =
            std::max(projection, projection_residual(ops, interior_cauchy_data(forms, minus_part(space, r))));
      }
      report.at_most(tagged("slp_dirichlet_jump", sv, j), slp_d, 0.0);
      report.at_most(tagged("slp_neumann_jump", sv, j), slp_n, 1e-10);
      report.at_most(tagged("dlp_dirichlet_jump", sv, j), dlp_d, 0.0);
      report.at_most(tagged("dlp_neumann_jump", sv, j), dlp_n, 1e-10);
      report.at_most(tagged("dlp_lifting_independence", sv, j), lift, 1e-10);
      report.at_most(tagged("green_interior", sv, j), green_in, 1e-8);
      report.at_most(tagged("green_exterior_leak", sv, j), green_out, 1e-8);
      report.at_most(tagged("calderon_projection", sv, j), projection, 1e-6);
      const SubdomainConstants c = estimate_constants(ops, grams[slot]);
      report.above(tagged("v_coercivity", sv, j), c.v_coercivity, 0.0);
      report.above(tagged("w_coercivity", sv, j), c.w_coercivity, 0.0);
      report.above(tagged("c_coercivity", sv, j), c.c_coercivity, 0.0);
    }
  }

  const SingleTraceBasis basis(disc, true);
  const CMatrix jx = basis.layout().x_pairing(disc);
  const CMatrix b = RMatrix(basis.embedding()).cast<Complex>();
  Real polarity = 0.0;
  for (int k = 0; k < 50 && basis.size() > 0; ++k) {
    const CVector alpha = b * random_vector(rng, basis.size());
    polarity = std::max(polarity, std::abs(alpha.dot(jx.conjugate() * alpha.conjugate())) / alpha.squaredNorm());
  }
  report.at_most("self_polarity", polarity, 1e-12);
  return report;
}

ExponentFit fit_exponent(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size()) throw DomainError("fit needs matching samples");
  if (x.size() < 4) throw DomainError("exponent fit needs at least 4 points");
  const int n = static_cast<int>(x.size());
  RMatrix a(n, 2);
  RVector rhs(n);
  for (int i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw DomainError("exponent fit needs positive samples");
    a(i, 0) = 1.0;
    a(i, 1) = std::log(x[i]);
    rhs(i) = std::log(y[i]);
  }
  const RVector coef = a.colPivHouseholderQr().solve(rhs);
  ExponentFit fit;
  fit.exponent = coef(1);
  fit.residual = std::sqrt((a * coef - rhs).squaredNorm() / n);
  fit.points = n;
  return fit;
}

namespace {

const std::vector<std::string>& sweep_quantities() {
  static const std::vector<std::string> q{
      "v_coercivity", "v_continuity", "w_coercivity",        "w_continuity",
      "k_norm",       "kp_norm",      "c_coercivity",        "c_continuity",
      "skeleton_coercivity", "skeleton_solution_ratio"};
  return q;
}

// Constants at one frequency, aggregated over subdomains: coercivities by
// their minimum, norms by their maximum.
std::map<std::string, Real> sweep_point(const Discretization& disc,
                                        const std::vector<CoefficientField>& extended,
                                        const std::vector<SobolevGrams>& grams,
                                        const MultiTrace& beta, Frequency s, SolverOptions solver) {
  SkeletonOptions options;
  options.solver = solver;
  const SkeletonProblem problem(disc, extended, s, options);
  std::map<std::string, Real> out;
  const Real inf = std::numeric_limits<Real>::infinity();
  for (const char* k : {"v_coercivity", "w_coercivity", "c_coercivity"}) out[k] = inf;
  for (const char* k : {"v_continuity", "w_continuity", "k_norm", "kp_norm", "c_continuity"})
    out[k] = 0.0;
  for (std::size_t slot = 0; slot < grams.size(); ++slot) {
    const int j = disc.subdomains()[slot];
    const SubdomainConstants c = estimate_constants(disc.trace(j), problem.operators(j), grams[slot]);
    out["v_coercivity"] = std::min(out["v_coercivity"], c.v_coercivity);
    out["w_coercivity"] = std::min(out["w_coercivity"], c.w_coercivity);
    out["c_coercivity"] = std::min(out["c_coercivity"], c.c_coercivity);
    out["v_continuity"] = std::max(out["v_continuity"], c.v_continuity);
    out["w_continuity"] = std::max(out["w_continuity"], c.w_continuity);
    out["k_norm"] = std::max(out["k_norm"], c.k_norm);
    out["kp_norm"] = std::max(out["kp_norm"], c.kp_norm);
    out["c_continuity"] = std::max(out["c_continuity"], c.c_continuity);
  }
  out["skeleton_coercivity"] = problem.coercivity_estimate();
  const SkeletonSolution sol = problem.solve(beta);
  out["skeleton_solution_ratio"] = safe_ratio(x_norm(sol.single, grams), x_norm(beta, grams));
  return out;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, int threads) {
  SweepResult result{{}, {}, Report(config_hash(config), artifact_version())};
  const Discretization disc(build_mesh(config));
  if (disc.skeleton().empty()) {
    result.checks.skip("sweep");
    return result;
  }
  const CoefficientField global = build_coefficients(config, disc.mesh());
  const std::vector<CoefficientField> extended = build_extensions(config, disc, global);
  const std::vector<SobolevGrams> grams = all_grams(disc, config.solver);
  const MultiTrace beta = random_multitrace(disc, config.seed);

  // Grid points plus the calibration point s = 1 last.
  std::vector<Complex> freqs;
  for (Real a : config.sweep_abs)
    for (Real deg : config.sweep_arg_deg) freqs.push_back(std::polar(a, deg * kPi / 180.0));
  freqs.push_back(1.0);
  std::vector<std::map<std::string, Real>> values(freqs.size());
  parallel_for(static_cast<int>(freqs.size()), threads, [&](int i) {
    values[i] = sweep_point(disc, extended, grams, beta, Frequency(freqs[i], config.s0), config.solver);
  });

  const std::size_t na = config.sweep_abs.size(), nt = config.sweep_arg_deg.size();
  auto at = [&](std::size_t ia, std::size_t it) -> std::map<std::string, Real>& {
    return values[ia * nt + it];
  };
  for (std::size_t ia = 0; ia < na; ++ia)
    for (std::size_t it = 0; it < nt; ++it)
      for (const std::string& q : sweep_quantities())
        result.points.push_back({q, freqs[ia * nt + it], at(ia, it)[q]});

  for (std::size_t it = 0; it < nt; ++it)
    for (const std::string& q : sweep_quantities()) {
      std::vector<Real> x, y;
      for (std::size_t ia = 0; ia < na; ++ia) {
        x.push_back(config.sweep_abs[ia]);
        y.push_back(std::abs(at(ia, it)[q]));
      }
      if (na < 4) continue;
      ExponentFit fit;
      try {
        fit = fit_exponent(x, y);
      } catch (const DomainError&) {
        fit.exponent = fit.residual = std::numeric_limits<Real>::quiet_NaN();
        fit.points = static_cast<int>(na);
      }
      fit.quantity = q;
      fit.arg_deg = config.sweep_arg_deg[it];
      result.fits.push_back(fit);
    }

  Report& checks = result.checks;
  // Positivity over the whole grid.
  for (const char* q : {"v_coercivity", "w_coercivity", "c_coercivity", "skeleton_coercivity"}) {
    Real lowest = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i + 1 < freqs.size(); ++i) lowest = std::min(lowest, values[i][q]);
    checks.above(std::string(q) + "_min_over_grid", lowest, 0.0);
  }
  // Scaling laws along the argument closest to 30 degrees.
  std::size_t it = 0;
  for (std::size_t k = 1; k < nt; ++k)
    if (std::abs(config.sweep_arg_deg[k] - 30.0) < std::abs(config.sweep_arg_deg[it] - 30.0)) it = k;
  // measured * |s|^2 / Re s is bounded below in theory; report the worst
  // drop relative to the smallest |s|.
  for (const char* q : {"c_coercivity", "w_coercivity"}) {
    Real worst = 0.0;
    auto scaled = [&](std::size_t ia) {
      const Complex s = freqs[ia * nt + it];
      return at(ia, it)[q] * std::norm(s) / s.real();
    };
    Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
    for (std::size_t ia = 0; ia < na; ++ia) {
      worst = std::max(worst, safe_ratio(scaled(0), scaled(ia)));
      lo = std::min(lo, scaled(ia));
      hi = std::max(hi, scaled(ia));
    }
    checks.at_most(std::string(q) + "_scaled_band", worst, 10.0);
    // Two-sided spread; growth is allowed by a one-sided bound, so not judged.
    checks.info(std::string(q) + "_scaled_spread", safe_ratio(hi, lo));
  }
  for (const ExponentFit& f : result.fits)
    if (f.arg_deg == config.sweep_arg_deg[it] &&
        (f.quantity == "c_continuity" || f.quantity == "v_continuity"))
      checks.at_most(f.quantity + "_exponent", f.exponent, 1.3);
  // ||u|| <= 10 K |s|^{9/2} / (Re s)^2 ||beta|| with K calibrated at s = 1.
  {
    const Real k = values.back()["skeleton_solution_ratio"];
    Real worst = 0.0;
    for (std::size_t ia = 0; ia < na; ++ia) {
      const Complex s = freqs[ia * nt + it];
      const Real bound = k * std::pow(std::abs(s), 4.5) / (s.real() * s.real());
      worst = std::max(worst, safe_ratio(at(ia, it)["skeleton_solution_ratio"], bound));
    }
    checks.at_most("skeleton_solution_bound", worst, 10.0);
  }
  // C coercivity / cos(theta) at fixed |s| varies by at most a factor 3.
  for (std::size_t ia = 0; ia < na && nt > 1; ++ia) {
    Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      const Real v = at(ia, k)["c_coercivity"] / std::cos(config.sweep_arg_deg[k] * kPi / 180.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    checks.at_most("c_coercivity_theta_spread[|s|=" + format_real(config.sweep_abs[ia]) + "]",
                   safe_ratio(hi, lo), 3.0);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const RunConfig& config) {
  const std::string hash = config_hash(config), version = artifact_version();
  out << "quantity,abs_s,arg_deg,re_s,im_s,value,config_hash,version\n";
  for (const SweepPoint& p : result.points)
    out << p.quantity << ',' << format_real(std::abs(p.s)) << ','
        << format_real(std::arg(p.s) * 180.0 / kPi) << ',' << format_real(p.s.real()) << ','
        << format_real(p.s.imag()) << ',' << format_real(p.value) << ',' << hash << ',' << version
        << '\n';
}

void write_fits_csv(std::ostream& out, const SweepResult& result, const RunConfig& config) {
  const std::string hash = config_hash(config), version = artifact_version();
  out << "quantity,arg_deg,exponent,fit_residual,points,config_hash,version\n";
  for (const ExponentFit& f : result.fits)
    out << f.quantity << ',' << format_real(f.arg_deg) << ',' << format_real(f.exponent) << ','
        << format_real(f.residual) << ',' << f.points << ',' << hash << ',' << version << '\n';
}

namespace {

bool identity_coefficients(const RunConfig& c) {
  return c.A.kind == "constant" && c.A.values[0] == 1.0 && c.p.kind == "constant" &&
         c.p.values[0] == 1.0 && c.region_A.empty() && c.region_p.empty();
}

std::vector<SubdomainSolution> incident_field(const Discretization& disc, const RunConfig& c,
                                              Frequency s) {
  RVector d(disc.mesh().dim());
  for (int i = 0; i < d.size(); ++i) d(i) = c.incident_direction[i];
  d.normalize();
  CVector v(disc.mesh().num_vertices());
  for (int i = 0; i < v.size(); ++i) v(i) = std::exp(-s.value() * d.dot(disc.mesh().vertex(i)));
  std::vector<SubdomainSolution> out;
  for (int j : disc.subdomains()) out.push_back({j, v});
  return out;
}

}  // namespace

Report run_solve(const RunConfig& config, const std::string& out_dir) {
  Report report(config_hash(config), artifact_version());
  const Discretization disc(build_mesh(config));
  if (disc.skeleton().empty()) {
    report.skip("skeleton_vs_direct");
    return report;
  }
  const Frequency s(config.s.front(), config.s0);
  const CoefficientField global = build_coefficients(config, disc.mesh());
  SkeletonOptions options;
  options.solver = config.solver;
  const SkeletonProblem problem(disc, build_extensions(config, disc, global), s, options);
  const MultiTrace beta = build_beta(config, disc, s);
  const SkeletonSolution sol = problem.solve(beta);
  const std::vector<SubdomainSolution> skeleton = problem.reconstruct(sol.multi);
  const std::vector<SubdomainSolution> direct = direct_solve(disc, global, beta, s, config.solver);

  report.above("skeleton_coercivity", problem.coercivity_estimate(), 0.0);
  report.info("skeleton_vs_direct", relative_l2_difference(disc.mesh(), skeleton, direct));
  if (config.beta == "incident" && identity_coefficients(config)) {
    const auto exact = incident_field(disc, config, s);
    report.info("skeleton_vs_incident", relative_l2_difference(disc.mesh(), skeleton, exact));
    report.info("direct_vs_incident", relative_l2_difference(disc.mesh(), direct, exact));
  }
  // Transmission conditions: partial jumps of the solution traces minus those of beta.
  const MultiTrace direct_traces = cauchy_data(problem, direct);
  const MultiTraceLayout& layout = problem.basis().layout();
  const CVector packed = layout.pack(beta);
  for (int a = 0; a < layout.num_subdomains(); ++a)
    for (int b = a + 1; b < layout.num_subdomains(); ++b) {
      const int j = layout.subdomain(a), k = layout.subdomain(b);
      const PartialJump target =
          partial_jump(disc.trace(j), beta.parts[a], disc.trace(k), beta.parts[b]);
      if (target.vertices.empty()) continue;
      const std::string name = "[" + std::to_string(j) + "," + std::to_string(k) + "]";
      // Relative to the data itself: jumps of beta may vanish.
      const Real x_data_norm =
          std::sqrt(packed.segment(layout.dirichlet_offset(a), 2 * layout.trace_size(a)).squaredNorm() +
                    packed.segment(layout.dirichlet_offset(b), 2 * layout.trace_size(b)).squaredNorm());
      auto residual = [&](const MultiTrace& m, bool dirichlet, bool neumann) {
        const PartialJump got = partial_jump(disc.trace(j), m.parts[a], disc.trace(k), m.parts[b]);
        const Real num = std::hypot(dirichlet ? (got.dirichlet - target.dirichlet).norm() : 0.0,
                                    neumann ? (got.neumann - target.neumann).norm() : 0.0);
        return safe_ratio(num, x_data_norm);
      };
      report.at_most("skeleton_jump_residual" + name, residual(sol.multi, true, true), 1e-10);
      // Conormal traces of the volume solution are recovered by projection on
      // all of Gamma_j, which is not local near cross points; reported apart.
      report.info("direct_dirichlet_jump_residual" + name, residual(direct_traces, true, false));
      report.info("direct_neumann_jump_residual" + name, residual(direct_traces, false, true));
    }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    for (std::size_t i = 0; i < skeleton.size(); ++i) {
      const int j = skeleton[i].j;
      auto on_j = [&](int c) { return disc.mesh().tag(c) == j; };
      const std::string tag = std::to_string(j);
      export_vtk(disc.mesh(), skeleton[i].values, (dir / ("skeleton_" + tag + ".vtk")).string(), on_j);
      export_vtk(disc.mesh(), direct[i].values, (dir / ("direct_" + tag + ".vtk")).string(), on_j);
      export_trace_csv(disc.trace(j), sol.multi.parts[i].dirichlet.values,
                       (dir / ("trace_dirichlet_" + tag + ".csv")).string());
      export_trace_csv(disc.trace(j), sol.multi.parts[i].neumann.values,
                       (dir / ("trace_neumann_" + tag + ".csv")).string());
    }
    std::ofstream beta_out(dir / "beta.csv");
    write_beta_csv(beta_out, beta);
  }
  return report;
}

namespace {

// Smooth deterministic density for the truncation study.
Complex truncation_density(const RVector& x) {
  Complex v(1.0, 0.25);
  for (int i = 0; i < x.size(); ++i) v += 0.5 * std::cos(kPi * (i + 1) * x(i)) * Complex(1.0, -0.5);
  return v;
}

std::vector<long long> coordinate_key(const RVector& x) {
  std::vector<long long> k;
  for (int i = 0; i < x.size(); ++i) k.push_back(std::llround(x(i) * 1e9));
  return k;
}

}  // namespace

Report run_truncation(const RunConfig& config) {
  Report report(config_hash(config), artifact_version());
  static const std::vector<std::string> interior{"inner_split", "inner_single", "inner_quadrant",
                                                 "ball"};
  if (std::find(interior.begin(), interior.end(), config.partition) == interior.end())
    throw DomainError("truncation study needs a partition strictly inside the box");
  const Real r = config.box_half_width;
  const Real r2 = config.truncation_factor * r;
  const int res2 = static_cast<int>(std::lround(config.resolution * config.truncation_factor));
  if (std::abs(r2 / res2 - r / config.resolution) > 1e-12 * r)
    throw DomainError("truncation_factor must keep the mesh size fixed");
  const Discretization small(build_mesh(config, r, config.resolution));
  const Discretization large(build_mesh(config, r2, res2));
  const CoefficientField g_small = build_coefficients(config, small.mesh());
  const CoefficientField g_large = build_coefficients(config, large.mesh());
  const Real diameter = small.mesh().omega_diameter();

  for (Complex sv : config.s) {
    const Frequency s(sv, config.s0);
    Real change = 0.0;
    for (int j : small.subdomains()) {
      const TraceSpace& ts = small.trace(j);
      const TraceSpace& tl = large.trace(j);
      if (ts.size() != tl.size()) throw InternalError("trace spaces differ between boxes");
      std::map<std::vector<long long>, int> index;
      for (int q = 0; q < tl.size(); ++q) index[coordinate_key(large.mesh().vertex(tl.nodes()[q]))] = q;
      std::vector<int> match(ts.size());
      CVector phi_s(ts.size()), phi_l(tl.size());
      for (int q = 0; q < ts.size(); ++q) {
        const RVector x = small.mesh().vertex(ts.nodes()[q]);
        auto it = index.find(coordinate_key(x));
        if (it == index.end()) throw InternalError("trace node has no partner in the larger box");
        match[q] = it->second;
        phi_s(q) = truncation_density(x);
        phi_l(it->second) = phi_s(q);
      }
      const SubdomainForms fs(small.broken(j), extend(small.mesh(), g_small, j, config.extension_mode));
      const SubdomainForms fl(large.broken(j), extend(large.mesh(), g_large, j, config.extension_mode));
      const SubdomainPotentials ps(fs, s, config.solver), pl(fl, s, config.solver);
      const CVector vs = BoundaryOperators(ps).V({j, phi_s}).values;
      const CVector vl = BoundaryOperators(pl).V({j, phi_l}).values;
      CVector diff(ts.size());
      for (int q = 0; q < ts.size(); ++q) diff(q) = vs(q) - vl(match[q]);
      change = std::max(change, safe_ratio(diff.norm(), vl.norm()));
    }
    const Real decay = sv.real() * (r - diameter / 2.0);
    const std::string name = "truncation_change[s=" + format_complex(sv) + "]";
    if (decay < 4.0) {
      report.info(name, change);
      report.info("insufficient_decay[s=" + format_complex(sv) + "]", decay);
    } else {
      report.at_most(name, change, 0.01);
    }
  }
  return report;
}

Real uwvp_residual(int resolution, Frequency s) {
  const Discretization disc(build_box_mesh(2, 1.0, resolution, partitions::half_split()));
  const PartitionedMesh& mesh = disc.mesh();
  const int j = 1;
  const BrokenSpace& space = disc.broken(j);
  const TraceSpace& tr = space.trace();
  const SubdomainForms forms(space, CoefficientField::identity(mesh));
  const SubdomainPotentials pot(forms, s);

  CVector psi(tr.size());
  for (int q = 0; q < tr.size(); ++q) {
    const Real y = mesh.vertex(tr.nodes()[q])(1);
    psi(q) = (1.0 - y * y) * (1.0 - y * y);
  }
  const BrokenField w = pot.double_layer(DirichletTrace{j, psi});

  // Test function v = (1 - |x - c|^2 / rho^2)^4 inside the ball, 0 outside.
  RVector center(2);
  center << 0.1, 0.05;
  const Real rho = 0.6;
  auto lv = [&](const RVector& x) {
    const Real q = (x - center).squaredNorm() / (rho * rho);
    if (q >= 1.0) return Complex(0.0);
    const Real f = std::pow(1.0 - q, 4), df = -4.0 * std::pow(1.0 - q, 3), d2f = 12.0 * std::pow(1.0 - q, 2);
    const Real laplacian = d2f * 4.0 * q / (rho * rho) + df * 2.0 * 2 / (rho * rho);
    return Complex(-laplacian) + s.square() * f;
  };
  auto grad_v = [&](const RVector& x) {
    const Real q = (x - center).squaredNorm() / (rho * rho);
    if (q >= 1.0) return RVector(RVector::Zero(2));
    return RVector(-4.0 * std::pow(1.0 - q, 3) * 2.0 * (x - center) / (rho * rho));
  };

  const CVector minus = side_values(space, w, Side::Minus);
  const CVector plus = side_values(space, w, Side::Plus);
  const QuadratureRule cell_rule = simplex_rule(2, 10);
  Complex volume = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CVector& vals = space.side_of_cell(c) == Side::Minus ? minus : plus;
    const Real vol = mesh.cell_volume(c);
    for (int p = 0; p < cell_rule.size(); ++p) {
      RVector x = RVector::Zero(2);
      Complex wx = 0.0;
      for (int a = 0; a < 3; ++a) {
        x += cell_rule.points(p, a) * mesh.vertex(mesh.cells()(c, a));
        wx += cell_rule.points(p, a) * vals(mesh.cells()(c, a));
      }
      volume += cell_rule.weights(p) * vol * wx * lv(x);
    }
  }
  const QuadratureRule facet_rule = simplex_rule(1, 10);
  Complex boundary = 0.0;
  for (int sf : tr.facets()) {
    const auto& verts = mesh.facets()[disc.skeleton().facets()[sf].facet].vertices;
    const RVector n = disc.skeleton().outward_normal(sf, j);
    const Real len = mesh.facet_measure(disc.skeleton().facets()[sf].facet);
    for (int p = 0; p < facet_rule.size(); ++p) {
      RVector x = RVector::Zero(2);
      Complex px = 0.0;
      for (std::size_t a = 0; a < verts.size(); ++a) {
        x += facet_rule.points(p, a) * mesh.vertex(verts[a]);
        const int q = tr.local(verts[a]);
        if (q >= 0) px += facet_rule.points(p, a) * psi(q);
      }
      boundary += facet_rule.weights(p) * len * px * s.inv_sqrt() * grad_v(x).dot(n);
    }
  }
  if (std::abs(boundary) == 0.0) throw InternalError("test function does not see Gamma_1");
  return std::abs(volume - boundary) / std::abs(boundary);
}

}  // namespace skelpot
