// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "nlburgers/acceptance.hpp"

int main(int argc, char** argv) {
  nlb::AcceptanceOptions opts;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--scratch") && i + 1 < argc) opts.scratch_dir = argv[++i];
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) opts.threads = std::atoi(argv[++i]);
    else only.push_back(std::atoi(argv[i]));
  }
  const auto results = nlb::run_acceptance(opts, only);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << nlb::format_line(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
