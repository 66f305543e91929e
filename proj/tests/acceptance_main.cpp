// Acceptance runner. Without arguments runs every criterion (same report as
// `oqs_apo selftest`); `--criterion N` runs one and exits 0/1/2.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oqs/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  bool timings = false;
  app.add_option("--criterion", criterion, "Run a single criterion")
      ->check(CLI::Range(1, oqs::kCriteriaCount));
  app.add_flag("--timings", timings, "Append wall time");
  CLI11_PARSE(app, argc, argv);

  if (criterion == 0) return oqs::selftest(std::cout, timings);
  const oqs::CriterionResult r = oqs::run_criterion(criterion);
  std::cout << r.line();
  if (timings) std::cout << "  [" << r.seconds << " s]";
  std::cout << '\n';
  return oqs::exit_status(r);
}
