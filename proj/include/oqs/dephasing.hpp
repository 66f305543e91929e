#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oqs/qmat.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

/// One-dimensional momentum density p(Q).
class MomentumDistribution {
 public:
  enum class Kind { gaussian, double_gaussian, modulated, tabulated };

  static MomentumDistribution gaussian(double mean, double variance);
  /// Balanced mixture of two Gaussians of variance `variance` centred at +-center.
  static MomentumDistribution double_gaussian(double center, double variance);
  /// base(Q) * factor(Q) / norm
  static MomentumDistribution modulated(const MomentumDistribution& base,
                                        std::function<double(double)> factor, double norm);
  /// Piecewise-linear density on a strictly increasing grid, zero outside.
  static MomentumDistribution tabulated(std::vector<double> q, std::vector<double> density);

  Kind kind() const { return kind_; }
  double density(double q) const;
  /// Interval outside which the density is negligible (or zero).
  std::array<double, 2> support() const;

  double mean() const { return a_; }       // gaussian
  double center() const { return a_; }     // double_gaussian
  double variance() const { return var_; } // gaussian, double_gaussian
  const MomentumDistribution& base() const { return *base_; }
  const std::vector<double>& grid() const { return q_; }

  /// Integral of g(Q) p(Q) dQ by adaptive Simpson, panels no wider than max_panel.
  template <typename T, typename G>
  T integrate(G&& g, double max_panel, const char* op) const;

  /// Checks normalization within 1e-8 and non-negativity on a sample grid.
  void validate() const;

 private:
  Kind kind_ = Kind::gaussian;
  double a_ = 0.0;
  double var_ = 1.0;
  std::shared_ptr<const MomentumDistribution> base_;
  std::function<double(double)> factor_;
  double norm_ = 1.0;
  std::vector<double> q_;
  std::vector<double> p_;
};

struct Moments {
  double m = 0.0;
  double m2 = 0.0;
  double var = 0.0;
};

struct DephasingParams {
  double xi = 1.0;
  double sigma = 1.0;

  void validate() const;
  /// physical time for the dimensionless time x = xi sigma t
  double time(double x) const { return x / (xi * sigma); }
};

Moments moments(const MomentumDistribution& p);

/// Characteristic function: integral of exp(-i xi Q t) p(Q).
cplx kappa_exact(const MomentumDistribution& p, const DephasingParams& params, double t);

/// The two inner time integrals of the second-order TCL expression, with the
/// prefactor exp(-i xi m_E t - xi^2 var_E t^2 / 2) folded into the integrands.
struct TclIntegrals {
  cplx first;   // int_0^t e^{i xi m_E (tau - t)} e^{-a (t^2 - tau^2)/2} dtau
  cplx second;  // same with an extra factor tau
};
TclIntegrals tcl_integrals(const Moments& env, const DephasingParams& params, double t);

cplx kappa_tcl(const Moments& p_alpha, const Moments& env, const DephasingParams& params,
               double t);
cplx kappa_tcl(const Moments& p_alpha, const Moments& env, const DephasingParams& params,
               const TclIntegrals& ints);

/// exp(-i xi m t - xi^2 var t^2 / 2)
cplx kappa_apo(double m_alpha, double var_alpha, const DephasingParams& params, double t);

enum class Method { exact, tcl2, apo2, corrproj2 };
std::string method_name(Method m);
Method parse_method(const std::string& s);

/// Correlated pure state C0 |1> f + C1 |0> f e^{-i theta}, theta(Q) = r Q / sigma,
/// with |f|^2 even. The phase sign is chosen so that the exact coherence reads
/// C1 C0 int |f|^2 e^{i theta - i xi Q t} and the per-term densities are
/// p0 = p3 = |f|^2, p1 = |f|^2 (1 + 2 C1 C0 cos theta) / N, p2 = |f|^2 (1 - 2 C1 C0 sin theta).
class DephasingState {
 public:
  DephasingState(double c0, double c1, double r, MomentumDistribution f_density, double sigma);

  /// Single Gaussian |f|^2 of width sigma.
  static DephasingState gaussian(double c0, double c1, double r, double sigma);
  /// Double Gaussian with centers +-q sigma.
  static DephasingState double_gaussian(double c0, double c1, double r, double q, double sigma);

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double r() const { return r_; }
  double sigma() const { return sigma_; }
  const MomentumDistribution& f_density() const { return f_; }
  double theta(double q) const { return r_ * q / sigma_; }

  /// int |f|^2 cos theta (the overlap entering N and the initial coherence).
  double overlap() const;
  double normalization() const { return 1.0 + 2.0 * c1_ * c0_ * overlap(); }

  /// p_alpha as a distribution (modulated for alpha = 1, 2).
  MomentumDistribution p(int alpha) const;
  /// Closed forms for Gaussian and double-Gaussian |f|^2, quadrature otherwise.
  Moments alpha_moments(int alpha) const;
  /// omega_alpha <1|D_alpha|0>
  cplx weight_product(int alpha) const;

  double rho11() const { return c0_ * c0_; }

 private:
  double c0_, c1_, r_;
  MomentumDistribution f_;
  double sigma_;
};

/// rho_10(t) for the given method (corrproj2 is not available here).
cplx coherence(const DephasingState& state, const DephasingParams& params, Method method,
               double t);

/// Evaluates all requested times at once, reusing per-term moments.
std::vector<cplx> coherence_series(const DephasingState& state, const DephasingParams& params,
                                   Method method, const std::vector<double>& times);

/// 2x2 reduced state of the pure global state.
ComplexMatrix reduced_state(const DephasingState& state);
double entanglement_entropy(const DephasingState& state);

// ---- template implementation ----

template <typename T, typename G>
T MomentumDistribution::integrate(G&& g, double max_panel, const char* op) const {
  QuadOptions opt;
  opt.max_panel = max_panel;
  auto integrand = [&](double q) { return T(g(q) * density(q)); };
  if (kind_ == Kind::tabulated) {
    T total = T(integrand(q_.front()) * 0.0);
    for (std::size_t k = 0; k + 1 < q_.size(); ++k)
      total = total + adaptive_simpson<T>(integrand, q_[k], q_[k + 1], opt, op);
    return total;
  }
  const auto s = support();
  return adaptive_simpson<T>(integrand, s[0], s[1], opt, op);
}

}  // namespace oqs
