#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oqs/errors.hpp"

namespace oqs {

/// Default relative tolerance for adaptive quadrature: 1e-9, or the value of
/// the OQS_APO_TOL environment variable when it parses as a positive number.
double default_rel_tol();
/// OQS_APO_TOL when set, `fallback` otherwise.
double rel_tol_or(double fallback);

struct QuadOptions {
  double rel_tol = default_rel_tol();
  double abs_tol = 1e-15;
  /// Initial panels are no wider than this (oscillatory integrands).
  double max_panel = std::numeric_limits<double>::infinity();
  int min_depth = 3;
  int max_depth = 40;
  std::size_t max_evals = 2'000'000;
};

inline double quad_norm(double x) { return std::abs(x); }
inline double quad_norm(std::complex<double> x) { return std::abs(x); }
template <typename Derived>
double quad_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.template lpNorm<Eigen::Infinity>();
}

namespace detail {

inline std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

template <typename T, typename F>
struct SimpsonRun {
  F& f;
  double eps;  // tolerance per unit length
  const QuadOptions& opt;
  const char* op;
  std::size_t evals = 0;

  T panel(double a, double b, const T& fa, const T& fm, const T& fb, const T& whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    evals += 2;
    const double h = b - a;
    const T left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const T right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const T both = left + right;
    const double err = quad_norm(T(both - whole));
    if (depth >= opt.min_depth && err <= 15.0 * eps * h) return both + (both - whole) / 15.0;
    if (depth >= opt.max_depth || evals > opt.max_evals || !(err == err))
      throw NumericalError(op, "adaptive Simpson did not converge (rel_tol " + short_double(opt.rel_tol) + ")");
    return panel(a, m, fa, flm, fm, left, depth + 1) + panel(m, b, fm, frm, fb, right, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson over [a, b] for scalar, complex or Eigen-vector valued f.
/// The error target is max(abs_tol, rel_tol * integral of |f|), spread over
/// the interval in proportion to panel width.
template <typename T, typename F>
T adaptive_simpson(F&& f, double a, double b, const QuadOptions& opt = {},
                   const char* op = "adaptive_simpson") {
  if (!(opt.rel_tol > 0.0)) throw NumericalError(op, "non-positive quadrature tolerance");
  if (a == b) {
    T z = f(a);
    return T(z * 0.0);
  }
  const double len = b - a;
  std::size_t panels = 4;
  if (std::isfinite(opt.max_panel) && opt.max_panel > 0.0) {
    const double need = std::ceil(std::abs(len) / opt.max_panel);
    if (need > 1e6) throw NumericalError(op, "too many oscillation panels");
    panels = std::max<std::size_t>(panels, static_cast<std::size_t>(need));
  }
  const double h = len / static_cast<double>(panels);
  std::vector<T> ends, mids;
  ends.reserve(panels + 1);
  mids.reserve(panels);
  double abs_scale = 0.0;
  for (std::size_t k = 0; k <= panels; ++k) ends.push_back(f(a + h * static_cast<double>(k)));
  for (std::size_t k = 0; k < panels; ++k) {
    mids.push_back(f(a + h * (static_cast<double>(k) + 0.5)));
    abs_scale += std::abs(h) / 6.0 *
                 (quad_norm(ends[k]) + 4.0 * quad_norm(mids[k]) + quad_norm(ends[k + 1]));
  }
  const double target = std::max(opt.abs_tol, opt.rel_tol * abs_scale);
  detail::SimpsonRun<T, std::remove_reference_t<F>> run{f, target / std::abs(len), opt, op};
  T total = T(ends[0] * 0.0);
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + h * static_cast<double>(k);
    const double hi = lo + h;
    const T whole = (h / 6.0) * (ends[k] + 4.0 * mids[k] + ends[k + 1]);
    total = total + run.panel(lo, hi, ends[k], mids[k], ends[k + 1], whole, 0);
  }
  return total;
}

/// Composite weights for n uniform intervals of width h: Simpson where
/// possible, Simpson 3/8 on the last three intervals when n is odd,
/// trapezoid for n = 1.
std::vector<double> uniform_simpson_weights(std::size_t n, double h);

}  // namespace oqs
