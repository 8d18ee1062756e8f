// Runs every acceptance check and prints one pass/fail line each. Exit status 1 if any fails.
// Optional arguments select check ids.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "affq/verify.hpp"

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int id = 1; id <= affq::verify::check_count(); ++id) ids.push_back(id);
  int failed = 0;
  for (int id : ids) {
    const auto r = affq::verify::run_check(id);
    std::printf("%s\n", affq::verify::format_line(r).c_str());
    if (!r.passed) ++failed;
  }
  std::printf("%d/%zu acceptance checks passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
