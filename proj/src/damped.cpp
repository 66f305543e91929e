#include "oqs/damped.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace oqs {

namespace {

// (e^{ixt} - 1)/(ix) = sin(xt)/x + i (1 - cos xt)/x, continuous at x = 0.
std::array<double, 2> kernel(double x, double t) {
  const double y = x * t;
  if (std::abs(y) < 1e-4) {
    const double y2 = y * y;
    return {t * (1.0 - y2 / 6.0), 0.5 * y * t * (1.0 - y2 / 12.0)};
  }
  return {std::sin(y) / x, (1.0 - std::cos(y)) / x};
}

void check_uniform(const std::vector<double>& times, double omega_c) {
  if (times.size() < 2) throw ConfigError("damped: time grid needs at least two points");
  if (times.front() != 0.0) throw ConfigError("damped: time grid must start at 0");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ConfigError("damped: time grid must be increasing");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, times[k]))
      throw ConfigError("damped: time grid must be uniform");
  if (dt * omega_c > 0.1 * (1.0 + 1e-9))
    throw ConfigError("damped: grid spacing must satisfy dt <= 0.1 / omega_c");
}

// One-pass accumulation of y' = mu(t) - g(t) y with the trapezoid rule for
// both the exponent and the convolution.
template <typename T>
std::vector<T> integrate_linear(const std::vector<double>& times, const std::vector<T>& g,
                                const std::vector<T>& mu, T y0) {
  std::vector<T> y(times.size());
  y[0] = y0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    const T decay = std::exp(-0.5 * h * (g[k] + g[k + 1]));
    y[k + 1] = decay * y[k] + 0.5 * h * (decay * mu[k] + mu[k + 1]);
  }
  return y;
}

TrajectoryTable make_table(const std::string& method, const BathSpec& bath,
                           const std::vector<double>& times, std::vector<cplx> rho10,
                           std::vector<double> rho11) {
  TrajectoryTable tab;
  tab.time_label = "omega_c_t";
  tab.time.reserve(times.size());
  for (double t : times) tab.time.push_back(t * bath.omega_c);
  tab.add(Series{method, std::move(rho10), std::move(rho11)});
  tab.validate();
  return tab;
}

}  // namespace

double BathSpec::n(double w) const {
  if (w < 0.0 || w > omega_c) return 0.0;
  return occupation ? occupation(w) : n_bosons;
}

void BathSpec::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("damped: gamma must be positive");
  if (!(omega_c > 0.0)) throw ConfigError("damped: omega_c must be positive");
  if (!std::isfinite(varsigma)) throw ConfigError("damped: varsigma must be finite");
  if (!(n_bosons >= 0.0)) throw ConfigError("damped: N must be non-negative");
  for (const auto& m : modes)
    if (!(m[1] >= 0.0)) throw ConfigError("damped: mode weight must be non-negative");
}

std::vector<BaseRates> base_rate_series(const BathSpec& bath, const std::vector<double>& times) {
  bath.validate();
  std::vector<BaseRates> out;
  out.reserve(times.size());
  QuadOptions opt;
  opt.rel_tol = rel_tol_or(1e-8);
  opt.min_depth = 1;
  for (double t : times) out.push_back(base_rates(bath, t, opt));
  return out;
}

BaseRates BaseRates::gamma_scaled(double f) const {
  return {f * vac_s, f * vac_c, f * occ_s, f * occ_c};
}

RateSet BaseRates::scaled(double s) const {
  RateSet r;
  r.r_minus = s * occ_s;
  r.r_plus = vac_s + r.r_minus;
  r.i_plus = vac_c + s * occ_c;
  r.i_minus = -s * occ_c;
  return r;
}

BaseRates base_rates(const BathSpec& bath, double t, const QuadOptions& opt) {
  if (t < 0.0) throw ConfigError("rate functions need t >= 0");
  BaseRates out;
  if (t == 0.0) return out;
  if (!bath.modes.empty()) {
    for (const auto& m : bath.modes) {
      const auto k = kernel(bath.varsigma - m[0], t);
      const double n = bath.occupation ? bath.occupation(m[0]) : bath.n_bosons;
      out.vac_s += m[1] * k[0];
      out.vac_c += m[1] * k[1];
      out.occ_s += m[1] * n * k[0];
      out.occ_c += m[1] * n * k[1];
    }
    return out;
  }
  QuadOptions o = opt;
  o.max_panel = std::numbers::pi / (4.0 * t);
  auto f = [&](double w) {
    const auto k = kernel(bath.varsigma - w, t);
    const double j = bath.spectral_density(w);
    const double jn = j * bath.n(w);
    return Eigen::Vector4d(j * k[0], j * k[1], jn * k[0], jn * k[1]);
  };
  Eigen::Vector4d v;
  if (bath.varsigma > 0.0 && bath.varsigma < bath.omega_c) {
    // keep the removable point on a panel edge
    v = adaptive_simpson<Eigen::Vector4d>(f, 0.0, bath.varsigma, o, "rate_functions") +
        adaptive_simpson<Eigen::Vector4d>(f, bath.varsigma, bath.omega_c, o, "rate_functions");
  } else {
    v = adaptive_simpson<Eigen::Vector4d>(f, 0.0, bath.omega_c, o, "rate_functions");
  }
  out.vac_s = v(0);
  out.vac_c = v(1);
  out.occ_s = v(2);
  out.occ_c = v(3);
  return out;
}

RateSet rate_functions(const BathSpec& bath, const std::function<double(double)>& n_profile,
                       double t, const QuadOptions& opt) {
  BathSpec b = bath;
  b.occupation = n_profile;
  const BaseRates base = base_rates(b, t, opt);
  return base.scaled(1.0);
}

void DampedInitialState::validate() const {
  if (std::abs(c0 * c0 + c1 * c1 - 1.0) > 1e-12)
    throw ConfigError("damped: c0^2 + c1^2 must equal 1");
}

std::array<double, 4> DampedInitialState::weights() const {
  return {1.0, 1.0, 1.0, 2.0 * c1 * c1};
}

std::array<double, 4> DampedInitialState::occupation_scales() const {
  return {c1 * c1, c1 * c1, c1 * c1, 1.0};
}

std::array<ComplexMatrix, 4> DampedInitialState::system_ops() const {
  const ComplexMatrix id = identity(2);
  return {0.5 * (id - sigma_x() - sigma_y() - sigma_z()), 0.5 * sigma_x(), 0.5 * sigma_y(),
          0.5 * sigma_z()};
}

double n_av_scale(const std::array<double, 4>& weights, const std::array<ComplexMatrix, 4>& ops,
                  const std::array<double, 4>& scales) {
  double s = 0.0;
  for (std::size_t a = 0; a < 4; ++a) s += weights[a] * ops[a].trace().real() * scales[a];
  return s;
}

std::function<double(double)> n_av(const BathSpec& bath, const DampedInitialState& init) {
  const double s = n_av_scale(init.weights(), init.system_ops(), init.occupation_scales());
  return [bath, s](double w) { return s * bath.n(w); };
}

DampedFrame damped_frame(const DampedInitialState& init) {
  init.validate();
  DampedFrame f;
  f.weights = init.weights();
  f.ops = init.system_ops();
  f.scales = init.occupation_scales();
  f.ref_scale = n_av_scale(f.weights, f.ops, f.scales);
  return f;
}

TrajectoryTable solve_tcl(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times) {
  check_uniform(times, bath.omega_c);
  return solve_tcl(bath, frame, times, base_rate_series(bath, times));
}

TrajectoryTable solve_tcl(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times, const std::vector<BaseRates>& base) {
  bath.validate();
  check_uniform(times, bath.omega_c);
  if (base.size() != times.size()) throw DimensionError("solve_tcl: rate series length mismatch");
  const std::size_t n = times.size();
  double rho11_0 = 0.0;
  cplx rho10_0 = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    rho11_0 += frame.weights[a] * frame.ops[a](0, 0).real();
    rho10_0 += frame.weights[a] * frame.ops[a](0, 1);
  }
  std::vector<double> g11(n), mu(n);
  std::vector<cplx> g10(n), nu(n);
  for (std::size_t k = 0; k < n; ++k) {
    const RateSet e = base[k].scaled(frame.ref_scale);
    double m = rho11_0 * e.rbar();
    cplx v = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      if (frame.weights[a] == 0.0) continue;
      const RateSet r = base[k].scaled(frame.scales[a]);
      const ComplexMatrix& d = frame.ops[a];
      m += frame.weights[a] * (-r.rbar() * d(0, 0).real() + r.r_minus * d.trace().real());
      v += -0.5 * frame.weights[a] * d(0, 1) *
           (kI * (r.ibar() - e.ibar()) + (r.rbar() - e.rbar()));
    }
    g11[k] = e.rbar();
    mu[k] = m;
    g10[k] = 0.5 * (kI * e.ibar() + e.rbar());
    nu[k] = v;
  }
  auto rho11 = integrate_linear<double>(times, g11, mu, rho11_0);
  auto rho10 = integrate_linear<cplx>(times, g10, nu, rho10_0);
  return make_table("tcl2", bath, times, std::move(rho10), std::move(rho11));
}

TrajectoryTable solve_apo(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times) {
  check_uniform(times, bath.omega_c);
  return solve_apo(bath, frame, times, base_rate_series(bath, times));
}

TrajectoryTable solve_apo(const BathSpec& bath, const DampedFrame& frame,
                          const std::vector<double>& times, const std::vector<BaseRates>& base) {
  bath.validate();
  check_uniform(times, bath.omega_c);
  if (base.size() != times.size()) throw DimensionError("solve_apo: rate series length mismatch");
  const std::size_t n = times.size();
  std::vector<double> rho11(n, 0.0);
  std::vector<cplx> rho10(n, 0.0);
  for (std::size_t a = 0; a < 4; ++a) {
    if (frame.weights[a] == 0.0) continue;
    const ComplexMatrix& d = frame.ops[a];
    std::vector<double> g(n), src(n);
    std::vector<cplx> gc(n), zero(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const RateSet r = base[k].scaled(frame.scales[a]);
      g[k] = r.rbar();
      src[k] = d.trace().real() * r.r_minus;
      gc[k] = 0.5 * (kI * r.ibar() + r.rbar());
    }
    const auto d11 = integrate_linear<double>(times, g, src, d(0, 0).real());
    const auto d10 = integrate_linear<cplx>(times, gc, zero, d(0, 1));
    for (std::size_t k = 0; k < n; ++k) {
      rho11[k] += frame.weights[a] * d11[k];
      rho10[k] += frame.weights[a] * d10[k];
    }
  }
  return make_table("apo2", bath, times, std::move(rho10), std::move(rho11));
}

TrajectoryTable solve_tcl(const BathSpec& bath, const DampedInitialState& init,
                          const std::vector<double>& times) {
  return solve_tcl(bath, damped_frame(init), times);
}

TrajectoryTable solve_apo(const BathSpec& bath, const DampedInitialState& init,
                          const std::vector<double>& times) {
  return solve_apo(bath, damped_frame(init), times);
}

Asymptote asymptotic_population(const std::string& method, const BathSpec& bath,
                                const DampedInitialState& init) {
  bath.validate();
  Asymptote out;
  out.t_max = 200.0 / (bath.gamma * bath.omega_c);
  const double dt = 0.1 / bath.omega_c;
  const auto n = static_cast<std::size_t>(std::ceil(out.t_max / dt)) + 1;
  const auto times = uniform_grid(dt * static_cast<double>(n - 1), n);
  TrajectoryTable tab;
  if (method == "tcl2")
    tab = solve_tcl(bath, init, times);
  else if (method == "apo2")
    tab = solve_apo(bath, init, times);
  else
    throw ConfigError("asymptotic_population: method must be tcl2 or apo2");
  const auto& s = tab.series.front();
  const double last = s.rho11.back();
  const auto k90 = static_cast<std::size_t>(std::llround(0.9 * static_cast<double>(n - 1)));
  out.value = last;
  out.t_max = times.back();
  out.converged = std::abs(last - s.rho11[k90]) <= 1e-4;
  return out;
}

}  // namespace oqs
