#pragma once

#include <array>
#include <functional>
#include <vector>

#include "oqs/qmat.hpp"
#include "oqs/quadrature.hpp"
#include "oqs/trajectory.hpp"

namespace oqs {

/// Ohmic bath J(w) = gamma w on [0, omega_c], occupation N(w) below the cutoff.
/// When `modes` is non-empty the continuum is replaced by discrete modes
/// (frequency, weight) and integrals become sums. The rates use the normalization
/// R = int J sin(xt)/x, so a mode coupled as g (s+ b + s- b^dag) has weight 2|g|^2.
struct BathSpec {
  double gamma = 0.05;
  double omega_c = 1.0;
  double varsigma = 0.0;
  double n_bosons = 0.0;
  std::function<double(double)> occupation;  // overrides the flat n_bosons profile
  std::vector<std::array<double, 2>> modes;

  double spectral_density(double w) const { return w <= omega_c && w >= 0.0 ? gamma * w : 0.0; }
  double n(double w) const;
  void validate() const;
};

struct RateSet {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double i_plus = 0.0;
  double i_minus = 0.0;

  double rbar() const { return r_plus + r_minus; }
  double ibar() const { return i_plus - i_minus; }
};

/// The four rate functions for the occupation profile n(w) at time t.
RateSet rate_functions(const BathSpec& bath, const std::function<double(double)>& n_profile,
                       double t, const QuadOptions& opt = {});

/// Same for the scaled bath occupation s * N(w); the four underlying integrals
/// are shared so that many profiles cost one quadrature.
struct BaseRates {
  double vac_s = 0.0;  // int J sin(xt)/x
  double vac_c = 0.0;  // int J (1 - cos xt)/x
  double occ_s = 0.0;  // int J N sin(xt)/x
  double occ_c = 0.0;  // int J N (1 - cos xt)/x

  RateSet scaled(double s) const;
  /// Same integrals for a bath with gamma multiplied by f.
  BaseRates gamma_scaled(double f) const;
};
BaseRates base_rates(const BathSpec& bath, double t, const QuadOptions& opt = {});
std::vector<BaseRates> base_rate_series(const BathSpec& bath, const std::vector<double>& times);

/// Frame data of C0 |0>|0> + C1 |1>|{N}>: weights w = (1, 1, 1, 2|C1|^2),
/// system operators D_a = s_a / 2 (D_0 = (1 - s1 - s2 - s3)/2) and occupation
/// scales n^a = (|C1|^2, |C1|^2, |C1|^2, 1) * N.
struct DampedInitialState {
  double c0 = 1.0 / 1.4142135623730951;
  double c1 = 1.0 / 1.4142135623730951;

  void validate() const;
  std::array<double, 4> weights() const;
  std::array<double, 4> occupation_scales() const;
  std::array<ComplexMatrix, 4> system_ops() const;
  double rho11() const { return c1 * c1; }
};

/// Average occupation sum_a w_a Tr[D_a] n^a(w), returned as a scale of N(w).
double n_av_scale(const std::array<double, 4>& weights, const std::array<ComplexMatrix, 4>& ops,
                  const std::array<double, 4>& scales);
std::function<double(double)> n_av(const BathSpec& bath, const DampedInitialState& init);

/// Closed-form solutions of the second-order master equations on a uniform
/// grid of physical times (time column reported as omega_c t).
TrajectoryTable solve_tcl(const BathSpec& bath, const DampedInitialState& init,
                          const std::vector<double>& times);
TrajectoryTable solve_apo(const BathSpec& bath, const DampedInitialState& init,
                          const std::vector<double>& times);

/// Same solutions for an arbitrary frame decomposition given as weights,
/// 2x2 operators and occupation scales (used for product-state checks).
struct DampedFrame {
  std::array<double, 4> weights{};
  std::array<ComplexMatrix, 4> ops;
  std::array<double, 4> scales{};
  double ref_scale = 0.0;  // reference occupation for the standard projection
};
DampedFrame damped_frame(const DampedInitialState& init);
TrajectoryTable solve_tcl(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times);
TrajectoryTable solve_apo(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times);
/// Variants reusing base integrals from base_rate_series on the same grid.
TrajectoryTable solve_tcl(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times, const std::vector<BaseRates>& base);
TrajectoryTable solve_apo(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times, const std::vector<BaseRates>& base);

struct Asymptote {
  double value = 0.0;
  double t_max = 0.0;
  bool converged = false;
};
/// rho11 at t_max = 200 / (gamma omega_c); converged iff |rho11(t_max) - rho11(0.9 t_max)| <= 1e-4.
Asymptote asymptotic_population(const std::string& method, const BathSpec& bath,
                                const DampedInitialState& init);

}  // namespace oqs
