#pragma once

// The acceptance suite: each check measures one identity and compares it with its threshold.

#include <cstdint>
#include <string>
#include <vector>

namespace affq::verify {

/// One measured identity: the worst deviation found and the allowed deviation.
struct Part {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed() const { return measured <= threshold; }
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<Part> parts;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< 0 when there is none
  std::string detail;       ///< error message when the check threw
};

struct Options {
  double tol_scale = 1.0;  ///< multiplies every threshold
  std::uint64_t seed = 20240607;
};

CheckResult unitarity_homomorphism(const Options& o = {});
CheckResult trace_formula(const Options& o = {});
CheckResult thermal_constant(const Options& o = {});
CheckResult unit_trace(const Options& o = {});
CheckResult canonical_limit(const Options& o = {});
CheckResult acs_constants(const Options& o = {});
CheckResult wigner_marginals(const Options& o = {});
CheckResult lower_symbol(const Options& o = {});
CheckResult half_oscillator(const Options& o = {});
CheckResult covariance(const Options& o = {});

int check_count();
std::string check_name(int id);
/// Runs check id in 1..check_count(); exceptions become failed results with the message as detail.
CheckResult run_check(int id, const Options& o = {});
/// ids empty means all.
std::vector<CheckResult> run_all(const Options& o = {}, const std::vector<int>& ids = {});

/// "PASS  1 unitarity-homomorphism  part=measured/threshold ...  time=...s (limit ...s)".
std::string format_line(const CheckResult& r);

}  // namespace affq::verify
