#pragma once

// Command-line surface: observable parsing, run configuration and the subcommand dispatcher.

#include <iosfwd>
#include <string>
#include <vector>

#include "affq/quantize.hpp"

namespace affq::cli {

/// Sum of terms c*q^B*p^N joined by + or -, whitespace-insensitive. `qp` is the dilation observable;
/// a lone p^N is a momentum power, a lone q^B a position power, anything else a monomial sum.
/// SyntaxError carries the 1-based column; p^N with N > 8 is rejected.
Observable parse_observable(const std::string& text);

constexpr int kMaxMomentumPower = 8;

/// Every flag has a config-file key of the same name without the leading dashes (dashes kept inside).
struct RunConfig {
  std::string weight = "aw";  ///< aw | acs | thermal
  double alpha = 2.0;         ///< weight parameter (ACS fiducial e_0^(alpha), thermal alpha), default basis alpha
  double basis_alpha = -2.0;  ///< < -1 means: use alpha
  int n_max = 20;
  double t = 0.5;
  int n_terms = 150;
  std::string f = "p^2";
  std::string state = "halfosc:1";  ///< halfosc:N | laguerre:K
  double fid_alpha = 1.0;           ///< fiducial e_0^(fid_alpha) for acs-density
  double q = 1.0, p = 0.0;
  double qmin = 0.05, qmax = 8.0, pmin = -8.0, pmax = 8.0;
  int nq = 120, np = 160;
  double tol = 0.0;  ///< 0 selects the subcommand default (tol_or)
  std::string out;
  bool json_errors = false;
  std::string method = "closed";  ///< lower-symbol: closed | trace
  int n = 1;                      ///< halfosc level
  std::string emit = "all";       ///< halfosc: comma list
  bool marginals = false;         ///< wigner: also emit marginals
  bool spectrum = false;          ///< halfosc: print the spectra
  std::vector<int> only;          ///< verify: check ids

  double tol_or(double fallback) const { return tol > 0.0 ? tol : fallback; }
  double effective_basis_alpha() const { return basis_alpha < -1.0 ? alpha : basis_alpha; }
};

/// Reads a JSON object whose keys are flag names; unknown keys raise ConfigError.
void apply_config_file(const std::string& path, RunConfig& cfg);

/// Exit status: 0 success, 1 computation error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace affq::cli
