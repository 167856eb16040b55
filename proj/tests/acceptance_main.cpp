// Acceptance runner: executes the full verification suite on the seeded
// corpus and prints one pass/fail line per criterion. Exit code 0 only when
// every criterion passes within its tolerance and time budget.
#include <iostream>

#include "zslab/cli_report.hpp"
#include "zslab/verify.hpp"

int main() {
  zslab::verify::Options opt;  // seeded defaults: 20 potentials, N = 64
  const auto suite = zslab::verify::run_suite(opt);
  for (const auto& c : suite.criteria) std::cout << zslab::criterion_line(c) << "\n";
  std::cout << (suite.pass ? "acceptance: PASS" : "acceptance: FAIL") << std::endl;
  return suite.pass ? 0 : 1;
}
