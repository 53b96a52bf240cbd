#ifndef SKELPOT_BENCH_HPP
#define SKELPOT_BENCH_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "skelpot/config.hpp"

namespace skelpot {

enum class CheckStatus { Pass, Fail, Skipped, Info };

struct CheckRow {
  std::string check;
  Real value = 0.0;
  Real threshold = 0.0;
  CheckStatus status = CheckStatus::Info;
};

// Rows of one bench command; every CSV row carries the config hash and the
// artifact version.
class Report {
 public:
  Report(std::string config_hash, std::string version);

  // Passes when value <= threshold.
  void at_most(const std::string& check, Real value, Real threshold);
  // Passes when value > threshold.
  void above(const std::string& check, Real value, Real threshold);
  void skip(const std::string& check);
  void info(const std::string& check, Real value);
  void add(CheckRow row) { rows_.push_back(std::move(row)); }

  const std::vector<CheckRow>& rows() const { return rows_; }
  const CheckRow* find(const std::string& check) const;
  bool passed() const;
  // check,value,threshold,pass,config_hash,version
  void write_csv(std::ostream& out) const;

 private:
  std::string hash_;
  std::string version_;
  std::vector<CheckRow> rows_;
};

std::string format_real(Real value);
std::string to_string(CheckStatus status);

// Jump relations, Green's representation, Calderon projection, coercivity
// positivity and self-polarity on the configured mesh for every s.
Report run_verify(const RunConfig& config);

struct SweepPoint {
  std::string quantity;
  Complex s;
  Real value = 0.0;
};

// Least-squares fit of log(value) = a + exponent * log(x).
struct ExponentFit {
  std::string quantity;
  Real arg_deg = 0.0;
  Real exponent = 0.0;
  Real residual = 0.0;  // root-mean-square of the log residuals
  int points = 0;
};

ExponentFit fit_exponent(const std::vector<Real>& x, const std::vector<Real>& y);

struct SweepResult {
  std::vector<SweepPoint> points;  // ordered by |s|, then arg, then quantity
  std::vector<ExponentFit> fits;
  Report checks;
};

// Constants of V, W, K, K', C and the skeleton problem over the |s| x arg
// grid; sweep points run on `threads` workers.
SweepResult run_sweep(const RunConfig& config, int threads = 1);
void write_sweep_csv(std::ostream& out, const SweepResult& result, const RunConfig& config);
void write_fits_csv(std::ostream& out, const SweepResult& result, const RunConfig& config);

// Skeleton pipeline against the direct solver at the first configured s.
// Writes VTK fields and trace CSVs into `out_dir` when it is non-empty.
Report run_solve(const RunConfig& config, const std::string& out_dir);

// Relative change of V(s) phi between box half-widths R and factor * R at
// equal mesh size, for every configured s.
Report run_truncation(const RunConfig& config);

// Ultra-weak residual of the discrete double layer potential of Gamma_1 on
// the half-split box with A = I, p = 1, for psi = (1 - y^2)^2 and a smooth
// compactly supported test function v:
//   |<D psi, L v> - <psi, s^{-1/2} d_n v>| / |<psi, s^{-1/2} d_n v>|.
Real uwvp_residual(int resolution, Frequency s);

}  // namespace skelpot

#endif
