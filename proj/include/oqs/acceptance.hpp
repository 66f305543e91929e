#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqs {

enum class Verdict { pass, fail, error };

struct Check {
  std::string what;  // e.g. "max|rec - rho| = 2.2e-16 <= 1e-10"
  bool ok = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  Verdict verdict = Verdict::fail;
  std::vector<Check> checks;
  std::string error;  // NumericalError diagnostics, names the operation
  double seconds = 0.0;

  /// "PASS  4  title: check; check" (no timings, so reports are reproducible)
  std::string line() const;
};

inline constexpr int kCriteriaCount = 13;

std::string criterion_title(int id);

/// Runs one criterion. Criterion 13 reruns 1-12 unless their results are supplied.
CriterionResult run_criterion(int id, const std::vector<CriterionResult>* earlier = nullptr);

/// Runs every criterion, prints one line each plus a totals line. Exit status:
/// 0 all pass, 2 if any criterion hit a numerical failure, 1 otherwise.
int selftest(std::ostream& os, bool timings = false);

/// Exit status for a single result, same convention.
int exit_status(const CriterionResult& r);

}  // namespace oqs
