#include "oqs/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oqs {

namespace {

constexpr double kTailSigmas = 14.0;

double gauss_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double oscillation_panel(double freq) {
  return freq > 0.0 ? std::numbers::pi / (4.0 * freq) : std::numeric_limits<double>::infinity();
}

}  // namespace

MomentumDistribution MomentumDistribution::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw ValidationError("gaussian: variance must be positive");
  MomentumDistribution d;
  d.kind_ = Kind::gaussian;
  d.a_ = mean;
  d.var_ = variance;
  return d;
}

MomentumDistribution MomentumDistribution::double_gaussian(double center, double variance) {
  if (!(variance > 0.0)) throw ValidationError("double_gaussian: variance must be positive");
  MomentumDistribution d;
  d.kind_ = Kind::double_gaussian;
  d.a_ = center;
  d.var_ = variance;
  return d;
}

MomentumDistribution MomentumDistribution::modulated(const MomentumDistribution& base,
                                                     std::function<double(double)> factor,
                                                     double norm) {
  if (!(norm > 0.0)) throw ValidationError("modulated: normalization must be positive");
  MomentumDistribution d;
  d.kind_ = Kind::modulated;
  d.base_ = std::make_shared<const MomentumDistribution>(base);
  d.factor_ = std::move(factor);
  d.norm_ = norm;
  return d;
}

MomentumDistribution MomentumDistribution::tabulated(std::vector<double> q,
                                                     std::vector<double> density) {
  if (q.size() < 2 || q.size() != density.size())
    throw ValidationError("tabulated: need matching grids with at least two points");
  for (std::size_t k = 1; k < q.size(); ++k)
    if (!(q[k] > q[k - 1])) throw ValidationError("tabulated: grid must be strictly increasing");
  for (double p : density)
    if (!(p >= 0.0)) throw ValidationError("tabulated: negative density");
  MomentumDistribution d;
  d.kind_ = Kind::tabulated;
  d.q_ = std::move(q);
  d.p_ = std::move(density);
  return d;
}

double MomentumDistribution::density(double q) const {
  switch (kind_) {
    case Kind::gaussian:
      return gauss_pdf(q, a_, var_);
    case Kind::double_gaussian:
      return 0.5 * (gauss_pdf(q, a_, var_) + gauss_pdf(q, -a_, var_));
    case Kind::modulated:
      return base_->density(q) * factor_(q) / norm_;
    case Kind::tabulated: {
      if (q < q_.front() || q > q_.back()) return 0.0;
      const auto it = std::upper_bound(q_.begin(), q_.end(), q);
      const std::size_t k = std::min<std::size_t>(
          static_cast<std::size_t>(std::distance(q_.begin(), it)), q_.size() - 1);
      const std::size_t j = k - 1;
      const double w = (q - q_[j]) / (q_[k] - q_[j]);
      return (1.0 - w) * p_[j] + w * p_[k];
    }
  }
  return 0.0;
}

std::array<double, 2> MomentumDistribution::support() const {
  switch (kind_) {
    case Kind::gaussian: {
      const double s = kTailSigmas * std::sqrt(var_);
      return {a_ - s, a_ + s};
    }
    case Kind::double_gaussian: {
      const double s = std::abs(a_) + kTailSigmas * std::sqrt(var_);
      return {-s, s};
    }
    case Kind::modulated:
      return base_->support();
    case Kind::tabulated:
      return {q_.front(), q_.back()};
  }
  return {0.0, 0.0};
}

void MomentumDistribution::validate() const {
  const double total = integrate<double>([](double) { return 1.0; },
                                         std::numeric_limits<double>::infinity(),
                                         "MomentumDistribution::validate");
  if (std::abs(total - 1.0) > 1e-8)
    throw ValidationError("momentum distribution not normalized: integral " +
                          std::to_string(total));
  const auto s = support();
  for (int k = 0; k <= 400; ++k) {
    const double q = s[0] + (s[1] - s[0]) * k / 400.0;
    if (density(q) < -1e-14) throw ValidationError("momentum distribution negative");
  }
}

void DephasingParams::validate() const {
  if (!(xi > 0.0)) throw ValidationError("dephasing: xi must be positive");
  if (!(sigma > 0.0)) throw ValidationError("dephasing: sigma must be positive");
}

Moments moments(const MomentumDistribution& p) {
  Moments out;
  switch (p.kind()) {
    case MomentumDistribution::Kind::gaussian:
      out.m = p.mean();
      out.var = p.variance();
      out.m2 = out.var + out.m * out.m;
      return out;
    case MomentumDistribution::Kind::double_gaussian:
      out.m = 0.0;
      out.m2 = p.variance() + p.center() * p.center();
      out.var = out.m2;
      return out;
    default:
      break;
  }
  const auto v = p.integrate<Eigen::Vector3d>(
      [](double q) { return Eigen::Vector3d(1.0, q, q * q); },
      std::numeric_limits<double>::infinity(), "moments");
  out.m = v(1) / v(0);
  out.m2 = v(2) / v(0);
  out.var = out.m2 - out.m * out.m;
  return out;
}

cplx kappa_exact(const MomentumDistribution& p, const DephasingParams& params, double t) {
  const double k = params.xi * t;
  switch (p.kind()) {
    case MomentumDistribution::Kind::gaussian:
      return std::exp(cplx(-0.5 * k * k * p.variance(), -k * p.mean()));
    case MomentumDistribution::Kind::double_gaussian:
      return std::exp(-0.5 * k * k * p.variance()) * std::cos(k * p.center());
    default:
      break;
  }
  if (t == 0.0) return 1.0;
  return p.integrate<cplx>([k](double q) { return std::exp(cplx(0.0, -k * q)); },
                           oscillation_panel(std::abs(k)), "kappa_exact");
}

TclIntegrals tcl_integrals(const Moments& env, const DephasingParams& params, double t) {
  if (t <= 0.0) return {0.0, 0.0};
  const double a = params.xi * params.xi * env.var;
  // the layer of width ~1/(a t) below t must stay resolvable in double precision
  if (a * t * t > 4e11)
    throw NumericalError("kappa_tcl", "boundary layer unresolvable for xi^2 var_E t^2 > 4e11");
  const double w = params.xi * env.m;
  QuadOptions opt;
  if (w != 0.0) opt.max_panel = oscillation_panel(std::abs(w));
  auto f = [&](double tau) {
    const cplx e = std::exp(cplx(-0.5 * a * (t - tau) * (t + tau), w * (tau - t)));
    return Eigen::Vector4d(e.real(), e.imag(), tau * e.real(), tau * e.imag());
  };
  // The integrand is concentrated in a layer of width ~1/(a t) below t.
  double split = 0.0;
  if (a * t > 0.0) split = std::max(0.0, t - 40.0 / (a * t));
  Eigen::Vector4d v = adaptive_simpson<Eigen::Vector4d>(f, split, t, opt, "kappa_tcl");
  if (split > 0.0) v += adaptive_simpson<Eigen::Vector4d>(f, 0.0, split, opt, "kappa_tcl");
  return {cplx(v(0), v(1)), cplx(v(2), v(3))};
}

cplx kappa_tcl(const Moments& p_alpha, const Moments& env, const DephasingParams& params,
               const TclIntegrals& ints) {
  const double xi = params.xi;
  return 1.0 - (kI * xi * p_alpha.m * ints.first +
                xi * xi * (p_alpha.m2 - p_alpha.m * env.m) * ints.second);
}

cplx kappa_tcl(const Moments& p_alpha, const Moments& env, const DephasingParams& params,
               double t) {
  return kappa_tcl(p_alpha, env, params, tcl_integrals(env, params, t));
}

cplx kappa_apo(double m_alpha, double var_alpha, const DephasingParams& params, double t) {
  const double k = params.xi * t;
  return std::exp(cplx(-0.5 * k * k * var_alpha, -k * m_alpha));
}

std::string method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::tcl2: return "tcl2";
    case Method::apo2: return "apo2";
    case Method::corrproj2: return "corrproj2";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "tcl2") return Method::tcl2;
  if (s == "apo2") return Method::apo2;
  if (s == "corrproj2") return Method::corrproj2;
  throw ConfigError("unknown method '" + s + "'");
}

DephasingState::DephasingState(double c0, double c1, double r, MomentumDistribution f_density,
                               double sigma)
    : c0_(c0), c1_(c1), r_(r), f_(std::move(f_density)), sigma_(sigma) {
  if (std::abs(c0 * c0 + c1 * c1 - 1.0) > 1e-12)
    throw ValidationError("dephasing state: c0^2 + c1^2 must equal 1");
  if (!(sigma > 0.0)) throw ValidationError("dephasing state: sigma must be positive");
  if (!std::isfinite(r)) throw ValidationError("dephasing state: r must be finite");
  if (f_.kind() == MomentumDistribution::Kind::gaussian && f_.mean() != 0.0)
    throw ValidationError("dephasing state: |f|^2 must be even");
  if (f_.kind() == MomentumDistribution::Kind::tabulated) {
    const auto& q = f_.grid();
    for (std::size_t k = 0; k < q.size(); ++k)
      if (std::abs(q[k] + q[q.size() - 1 - k]) > 1e-12 * (1.0 + std::abs(q[k])) ||
          std::abs(f_.density(q[k]) - f_.density(-q[k])) > 1e-12)
        throw ValidationError("dephasing state: tabulated |f|^2 must be even");
  }
}

DephasingState DephasingState::gaussian(double c0, double c1, double r, double sigma) {
  return DephasingState(c0, c1, r, MomentumDistribution::gaussian(0.0, sigma * sigma), sigma);
}

DephasingState DephasingState::double_gaussian(double c0, double c1, double r, double q,
                                               double sigma) {
  return DephasingState(c0, c1, r, MomentumDistribution::double_gaussian(q * sigma, sigma * sigma),
                        sigma);
}

namespace {

bool has_closed_form(const MomentumDistribution& f) {
  return f.kind() == MomentumDistribution::Kind::gaussian ||
         f.kind() == MomentumDistribution::Kind::double_gaussian;
}

// Integrals of a (double) Gaussian |f|^2 against the phase k Q, k = r / sigma.
struct GaussianOverlaps {
  double c;   // int |f|^2 cos kQ
  double s1;  // int Q |f|^2 sin kQ
  double c2;  // int Q^2 |f|^2 cos kQ
};

GaussianOverlaps gaussian_overlaps(const MomentumDistribution& f, double k) {
  const double q0 = f.kind() == MomentumDistribution::Kind::double_gaussian ? f.center() : 0.0;
  const double s2 = f.variance();
  const double phi = std::exp(-0.5 * k * k * s2);
  const double ck = std::cos(k * q0);
  const double sk = std::sin(k * q0);
  return {phi * ck, phi * (q0 * sk + k * s2 * ck),
          phi * ((q0 * q0 + s2 - k * k * s2 * s2) * ck - 2.0 * q0 * k * s2 * sk)};
}

}  // namespace

double DephasingState::overlap() const {
  const double k = r_ / sigma_;
  if (has_closed_form(f_)) return gaussian_overlaps(f_, k).c;
  return f_.integrate<double>([k](double q) { return std::cos(k * q); }, oscillation_panel(std::abs(k)),
                              "overlap");
}

MomentumDistribution DephasingState::p(int alpha) const {
  const double cc = 2.0 * c1_ * c0_;
  const double k = r_ / sigma_;
  switch (alpha) {
    case 0:
    case 3:
      return f_;
    case 1:
      return MomentumDistribution::modulated(
          f_, [cc, k](double q) { return 1.0 + cc * std::cos(k * q); }, normalization());
    case 2:
      return MomentumDistribution::modulated(
          f_, [cc, k](double q) { return 1.0 - cc * std::sin(k * q); }, 1.0);
    default:
      throw ValidationError("frame index out of range");
  }
}

Moments DephasingState::alpha_moments(int alpha) const {
  if (alpha < 0 || alpha > 3) throw ValidationError("frame index out of range");
  if (!has_closed_form(f_)) return moments(p(alpha));
  const Moments base = moments(f_);
  const double cc = 2.0 * c1_ * c0_;
  const GaussianOverlaps ov = gaussian_overlaps(f_, r_ / sigma_);
  Moments out;
  switch (alpha) {
    case 0:
    case 3:
      return base;
    case 1:
      out.m = 0.0;
      out.m2 = (base.m2 + cc * ov.c2) / (1.0 + cc * ov.c);
      break;
    case 2:
      out.m = -cc * ov.s1;
      out.m2 = base.m2;
      break;
  }
  out.var = out.m2 - out.m * out.m;
  return out;
}

cplx DephasingState::weight_product(int alpha) const {
  switch (alpha) {
    case 0: return cplx(-0.5, 0.5);
    case 1: return 0.5 * normalization();
    case 2: return cplx(0.0, -0.5);
    case 3: return 0.0;
    default: throw ValidationError("frame index out of range");
  }
}

namespace {

cplx exact_coherence(const DephasingState& s, const DephasingParams& params, double t) {
  const double k = s.r() / s.sigma() - params.xi * t;
  const auto& f = s.f_density();
  double kappa = 0.0;
  if (has_closed_form(f)) {
    const double q0 = f.kind() == MomentumDistribution::Kind::double_gaussian ? f.center() : 0.0;
    kappa = std::exp(-0.5 * k * k * f.variance()) * std::cos(k * q0);
  } else {
    // imaginary part vanishes by symmetry
    kappa = f.integrate<double>([k](double q) { return std::cos(k * q); },
                                oscillation_panel(std::abs(k)), "kappa_exact");
  }
  return s.c1() * s.c0() * kappa;
}

}  // namespace

std::vector<cplx> coherence_series(const DephasingState& state, const DephasingParams& params,
                                   Method method, const std::vector<double>& times) {
  params.validate();
  std::vector<cplx> out;
  out.reserve(times.size());
  if (method == Method::exact) {
    for (double t : times) out.push_back(exact_coherence(state, params, t));
    return out;
  }
  if (method == Method::corrproj2)
    throw ConfigError("dephasing: corrproj2 needs the generic engine");
  std::array<Moments, 4> mom;
  std::array<cplx, 4> w;
  for (int a = 0; a < 4; ++a) {
    w[static_cast<std::size_t>(a)] = state.weight_product(a);
    if (a != 3) mom[static_cast<std::size_t>(a)] = state.alpha_moments(a);
  }
  const Moments env = mom[0];  // reference state rho_E = |f|^2
  for (double t : times) {
    cplx rho = 0.0;
    if (method == Method::apo2) {
      for (std::size_t a = 0; a < 3; ++a) rho += w[a] * kappa_apo(mom[a].m, mom[a].var, params, t);
    } else {
      const TclIntegrals ints = tcl_integrals(env, params, t);
      for (std::size_t a = 0; a < 3; ++a) rho += w[a] * kappa_tcl(mom[a], env, params, ints);
    }
    out.push_back(rho);
  }
  return out;
}

cplx coherence(const DephasingState& state, const DephasingParams& params, Method method,
               double t) {
  return coherence_series(state, params, method, {t}).front();
}

ComplexMatrix reduced_state(const DephasingState& state) {
  ComplexMatrix rho(2, 2);
  const double c = state.c1() * state.c0() * state.overlap();
  rho << state.c0() * state.c0(), c, c, state.c1() * state.c1();
  return rho;
}

double entanglement_entropy(const DephasingState& state) {
  return von_neumann_entropy(DensityOperator(reduced_state(state), 1e-10));
}

}  // namespace oqs
