#include "oqs/quadrature.hpp"

#include <cstdlib>

namespace oqs {

double rel_tol_or(double fallback) {
  if (const char* env = std::getenv("OQS_APO_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return fallback;
}

double default_rel_tol() { return rel_tol_or(1e-9); }

std::vector<double> uniform_simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  std::size_t simpson_end = n;
  if (n % 2 == 1) {
    simpson_end = n - 3;
    const double c = 3.0 * h / 8.0;
    w[n - 3] += c;
    w[n - 2] += 3.0 * c;
    w[n - 1] += 3.0 * c;
    w[n] += c;
  }
  for (std::size_t k = 0; k + 2 <= simpson_end; k += 2) {
    w[k] += h / 3.0;
    w[k + 1] += 4.0 * h / 3.0;
    w[k + 2] += h / 3.0;
  }
  return w;
}

}  // namespace oqs
