#include "oqs/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "oqs/damped.hpp"
#include "oqs/dephasing.hpp"
#include "oqs/engine.hpp"
#include "oqs/errors.hpp"
#include "oqs/frame.hpp"
#include "oqs/scenario.hpp"

namespace oqs {

namespace {

constexpr double kC = 0.70710678118654752;  // C0 = C1 = 1/sqrt2

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fix(double x, int digits = 6) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

class Report {
 public:
  void le(const std::string& name, double value, double tol) {
    add(name + " = " + sci(value) + " <= " + sci(tol), value <= tol);
  }
  void add(std::string what, bool ok) { checks_.push_back({std::move(what), ok}); }
  void runtime(double seconds, double limit) {
    add("runtime < " + fix(limit, 0) + " s", seconds < limit);
  }
  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::vector<Check> checks_;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const DephasingParams kParams{1.0, 1.0};

std::vector<double> grid_between(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = a + (b - a) * static_cast<double>(k) / (n - 1.0);
  return x;
}

// ---- 1 ----
void frame_round_trip(Report& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  double worst_rec = 0.0, worst_eig = 0.0;
  std::size_t count = 0;
  for (int rep_i = 0; rep_i < 24; ++rep_i) {
    for (std::size_t d = 2; d <= 6; ++d) {
      const Eigen::Index n = static_cast<Eigen::Index>(2 * d);
      ComplexMatrix g(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) g(i, k) = cplx(normal(rng), normal(rng));
      ComplexMatrix rho = g * g.adjoint();
      rho /= rho.trace().real();
      const FrameDecomposition dec = decompose(DensityOperator(rho), {2, d});
      worst_rec = std::max(worst_rec, max_abs(reconstruct(dec).matrix() - rho));
      for (const auto& term : dec.terms)
        worst_eig = std::max(worst_eig, -term.env_state.eigenvalues().minCoeff());
      ++count;
    }
  }
  rep.add("states = " + std::to_string(count) + " >= 100", count >= 100);
  rep.le("max|reconstruct - rho|", worst_rec, 1e-10);
  rep.le("max(-min eig rho_a, 0)", std::max(worst_eig, 0.0), 1e-9);
  rep.runtime(elapsed(t0), 5.0);
}

// ---- 2 ----
void product_degeneracy(Report& rep) {
  const auto st = DephasingState::gaussian(kC, kC, 0.0, 1.0);
  const auto x = uniform_grid(5.0, 501);
  const auto e = coherence_series(st, kParams, Method::exact, x);
  const auto t = coherence_series(st, kParams, Method::tcl2, x);
  const auto a = coherence_series(st, kParams, Method::apo2, x);
  double et = 0.0, ea = 0.0, ta = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    et = std::max(et, std::abs(e[k] - t[k]));
    ea = std::max(ea, std::abs(e[k] - a[k]));
    ta = std::max(ta, std::abs(t[k] - a[k]));
  }
  rep.le("max|exact - tcl2|", et, 1e-6);
  rep.le("max|exact - apo2|", ea, 1e-6);
  rep.le("max|tcl2 - apo2|", ta, 1e-6);
}

// ---- 3 ----
void exact_peak(Report& rep) {
  for (double r : {1.0, 2.0}) {
    const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
    auto f = [&](double x) { return coherence(st, kParams, Method::exact, kParams.time(x)).real(); };
    const auto xs = grid_between(0.0, 2.0 * r + 2.0, 2001);
    std::size_t best = 0;
    std::vector<double> fx(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      fx[k] = f(xs[k]);
      if (fx[k] > fx[best]) best = k;
    }
    double a = xs[best > 0 ? best - 1 : 0], b = xs[std::min(best + 1, xs.size() - 1)];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
      if (fc > fd) {
        b = d, d = c, fd = fc;
        c = b - phi * (b - a), fc = f(c);
      } else {
        a = c, c = d, fc = fd;
        d = a + phi * (b - a), fd = f(d);
      }
    }
    const double xp = 0.5 * (a + b);
    rep.le("r=" + fix(r, 0) + " |peak x - r|", std::abs(xp - r), 1e-6);
    rep.le("r=" + fix(r, 0) + " |peak value - C1C0|", std::abs(f(xp) - kC * kC), 1e-6);
  }
}

// ---- 4 ----
void tcl_limit(Report& rep) {
  const double r = 1.0;
  const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
  const double target = 0.5 * r * r * std::exp(-0.5 * r * r);
  const double got = coherence(st, kParams, Method::tcl2, kParams.time(30.0)).real();
  rep.le("|Re rho10_tcl(30) - " + fix(target, 5) + "| (value " + fix(got, 6) + ")",
         std::abs(got - target), 1e-3);
  const Moments env = st.alpha_moments(0);
  for (int a = 0; a < 4; ++a) {
    const Moments pa = st.alpha_moments(a);
    const double lim = 1.0 - (pa.m2 - pa.m * env.m) / (env.m2 - env.m * env.m);
    const cplx k = kappa_tcl(pa, env, kParams, kParams.time(30.0));
    rep.le("alpha=" + std::to_string(a) + " |kappa_tcl(30) - limit|", std::abs(k - lim), 1e-3);
  }
}

// ---- 5 ----
bool all_variances_positive(const DephasingState& st) {
  for (int a = 0; a < 4; ++a)
    if (!(st.alpha_moments(a).var > 0.0)) return false;
  return true;
}

void apo_decay(Report& rep) {
  double worst = 0.0;
  std::size_t used = 0, skipped = 0;
  auto probe = [&](const DephasingState& st) {
    if (!all_variances_positive(st)) {
      ++skipped;
      return;
    }
    ++used;
    worst = std::max(worst, std::abs(coherence(st, kParams, Method::apo2, kParams.time(10.0))));
  };
  for (int k = -40; k <= 40; ++k) probe(DephasingState::gaussian(kC, kC, k * 0.05, 1.0));
  probe(DephasingState::double_gaussian(kC, kC, 0.1, std::numbers::pi / 0.2, 1.0));
  probe(DephasingState::double_gaussian(kC, kC, 2.0, 2.0, 1.0));
  rep.add("scenarios = " + std::to_string(used) + " (skipped " + std::to_string(skipped) + ")",
          used > 0);
  rep.le("max|rho10_apo(10)|", worst, 1e-3);
}

// ---- 6 ----
void apo_bounds(Report& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto x = uniform_grid(10.0, 1001);
  double max_abs = 0.0, max_im = 0.0, max_re_exact = 0.0, at_r = 0.0, at_x = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double r = k * 0.05;
    const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
    const auto a = coherence_series(st, kParams, Method::apo2, x);
    const auto e = coherence_series(st, kParams, Method::exact, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(a[i]) > max_abs) max_abs = std::abs(a[i]), at_r = r, at_x = x[i];
      max_im = std::max(max_im, std::abs(a[i].imag()));
      max_re_exact = std::max(max_re_exact, std::abs(e[i].real()));
    }
  }
  rep.add("max|rho10_apo| = " + fix(max_abs) + " (r = " + fix(at_r, 2) + ", x = " + fix(at_x, 2) +
              ") <= 0.500001",
          max_abs <= 0.5 + 1e-6);
  rep.add("max|Im rho10_apo| = " + sci(max_im) + " <= 0.01 max|Re rho10_exact| = " +
              sci(0.01 * max_re_exact),
          max_im <= 0.01 * max_re_exact);
  rep.runtime(elapsed(t0), 30.0);
}

// ---- 7 ----
double fourier_amplitude(const std::vector<double>& x, const std::vector<double>& f, double q) {
  // least-squares linear detrend, Hann window, projection on e^{-iqx}
  const double n = static_cast<double>(x.size());
  double sx = 0, sf = 0, sxx = 0, sxf = 0;
  for (std::size_t k = 0; k < x.size(); ++k) sx += x[k], sf += f[k], sxx += x[k] * x[k], sxf += x[k] * f[k];
  const double slope = (n * sxf - sx * sf) / (n * sxx - sx * sx);
  const double icpt = (sf - slope * sx) / n;
  cplx acc = 0.0;
  double wsum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (n - 1.0));
    acc += w * (f[k] - slope * x[k] - icpt) * std::exp(cplx(0.0, -q * x[k]));
    wsum += w;
  }
  return 2.0 * std::abs(acc) / wsum;
}

void double_gaussian_oscillation(Report& rep) {
  const double r = 0.1, q = std::numbers::pi / (2.0 * r);
  const auto st = DephasingState::double_gaussian(kC, kC, r, q, 1.0);
  const auto x = grid_between(0.3, 2.5, 2201);
  std::vector<double> t;
  for (double xx : x) t.push_back(kParams.time(xx));
  const auto a = coherence_series(st, kParams, Method::apo2, t);
  const auto c = coherence_series(st, kParams, Method::tcl2, t);
  std::vector<double> fa, fc;
  for (std::size_t k = 0; k < x.size(); ++k) fa.push_back(a[k].real()), fc.push_back(c[k].real());

  std::vector<double> peaks;
  const double h = x[1] - x[0];
  for (std::size_t k = 1; k + 1 < x.size(); ++k)
    if (fa[k] > fa[k - 1] && fa[k] >= fa[k + 1]) {
      const double den = fa[k - 1] - 2.0 * fa[k] + fa[k + 1];
      peaks.push_back(x[k] + (den != 0.0 ? 0.5 * h * (fa[k - 1] - fa[k + 1]) / den : 0.0));
    }
  const double period = 2.0 * std::numbers::pi / (q * kParams.sigma * kParams.xi);
  rep.add("apo2 peaks = " + std::to_string(peaks.size()) + " >= 3", peaks.size() >= 3);
  if (peaks.size() >= 2) {
    const double spacing = (peaks.back() - peaks.front()) / (peaks.size() - 1.0);
    rep.le("|peak spacing / (2 pi / q) - 1| (spacing " + fix(spacing, 5) + ")",
           std::abs(spacing / period - 1.0), 0.02);
  }
  const double amp_a = fourier_amplitude(x, fa, q), amp_c = fourier_amplitude(x, fc, q);
  rep.le("tcl2/apo2 amplitude at q (apo2 " + sci(amp_a) + ")", amp_c / amp_a, 0.1);
}

// ---- 8 ----
void engine_order(Report& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto times = uniform_grid(2.0, 201);
  const ComplexMatrix rho = jaynes_cummings_state(kC, kC, 3, 4);
  std::vector<double> et, ea;
  for (double g : {0.1, 0.05, 0.025}) {
    const InteractionSpec spec = jaynes_cummings(1.0, 1.0, g, 4);
    const FrameDecomposition dec = decompose(DensityOperator(rho), spec.shape());
    const ComplexMatrix ex = exact_oracle(rho, spec, times).back();
    et.push_back((solve_tcl2(spec, dec, average_env_state(dec), times).back() - ex).norm());
    ea.push_back((solve_apo2(spec, dec, times).back() - ex).norm());
  }
  for (std::size_t i = 0; i + 1 < et.size(); ++i) {
    const std::string g = i == 0 ? "0.1->0.05" : "0.05->0.025";
    rep.add("tcl2 ratio " + g + " = " + fix(et[i] / et[i + 1], 2) + " >= 6", et[i] / et[i + 1] >= 6.0);
    rep.add("apo2 ratio " + g + " = " + fix(ea[i] / ea[i + 1], 2) + " >= 6", ea[i] / ea[i + 1] >= 6.0);
  }
  rep.runtime(elapsed(t0), 10.0);
}

// ---- 9 ----
void engine_closed_form(Report& rep) {
  const std::size_t n = 201;
  const auto times = uniform_grid(3.0, 301);
  for (double r : {-1.0, 1.0}) {
    const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
    std::vector<double> q(n), w(n);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      q[k] = -10.0 + 20.0 * k / (n - 1.0);
      w[k] = std::exp(-0.5 * q[k] * q[k]);
      s += w[k];
    }
    Eigen::VectorXcd psi(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      const double amp = std::sqrt(w[k] / s);
      psi(k) = kC * amp;
      psi(n + k) = kC * amp * std::exp(cplx(0.0, -st.theta(q[k])));
    }
    InteractionSpec spec;
    spec.h_system = ComplexMatrix::Zero(2, 2);
    spec.h_env = ComplexMatrix::Zero(n, n);
    ComplexMatrix b = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) b(k, k) = 0.5 * kParams.xi * q[k];
    spec.couplings = {{sigma_z(), b}};
    spec.g = 1.0;
    const ComplexMatrix rho = psi * psi.adjoint();
    const FrameDecomposition dec = decompose(DensityOperator(rho), spec.shape());
    const auto ap = solve_apo2(spec, dec, times);
    const auto tc = solve_tcl2(spec, dec, average_env_state(dec), times);
    const auto ca = coherence_series(st, kParams, Method::apo2, times);
    const auto ct = coherence_series(st, kParams, Method::tcl2, times);
    double ea = 0.0, et = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      ea = std::max(ea, std::abs(ap[k](0, 1) - ca[k]));
      et = std::max(et, std::abs(tc[k](0, 1) - ct[k]));
    }
    rep.le("r=" + fix(r, 0) + " max|engine apo2 - closed form|", ea, 1e-6);
    rep.le("r=" + fix(r, 0) + " max|engine tcl2 - closed form|", et, 1e-6);
  }
}

// ---- 10 ----
void corrproj_reductions(Report& rep) {
  const auto times = uniform_grid(2.0, 201);
  {
    const InteractionSpec spec = jaynes_cummings(1.0, 1.0, 0.1, 4);
    const ComplexMatrix rho = jaynes_cummings_state(kC, kC, 3, 4);
    const FrameDecomposition dec = decompose(DensityOperator(rho), spec.shape());
    const ComplexMatrix ref = average_env_state(dec);
    const auto tc = solve_tcl2(spec, dec, ref, times);
    const auto cp = solve_corrproj2(spec, dec, trivial_family(ref), times);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) worst = std::max(worst, max_abs(tc[k] - cp[k]));
    rep.le("trivial family max|corrproj2 - tcl2|", worst, 1e-10);
  }
  {
    const InteractionSpec spec = jaynes_cummings(1.0, 1.0, 0.1, 4);
    ComplexMatrix rs(2, 2);
    rs << 0.6, cplx(0.2, -0.1), cplx(0.2, 0.1), 0.4;
    ComplexMatrix re = ComplexMatrix::Zero(5, 5);
    const double pops[] = {0.4, 0.25, 0.15, 0.12, 0.08};
    for (int k = 0; k < 5; ++k) re(k, k) = pops[k];
    const ComplexMatrix rho = tensor(rs, re);
    const FrameDecomposition dec = decompose(DensityOperator(rho), spec.shape());
    ComplexMatrix p0 = ComplexMatrix::Zero(5, 5), p1 = ComplexMatrix::Zero(5, 5);
    p0(0, 0) = p0(1, 1) = 1.0;
    p1(2, 2) = p1(3, 3) = p1(4, 4) = 1.0;
    const ProjectorFamily fam = build_block_projector({p0, p1}, average_env_state(dec));
    double worst = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0})
      for (const auto& m : corrproj2_inhomogeneity(fam, dec, spec, t)) worst = std::max(worst, max_abs(m));
    rep.le("block family max|inhomogeneity|", worst, 1e-12);
  }
}

// ---- 11 ----
void damped_asymptotics(Report& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const DampedInitialState init;
  const DampedFrame frame = damped_frame(init);
  auto solve = [&](double gamma, double n, double t_max, std::size_t pts) {
    BathSpec bath;
    bath.gamma = gamma;
    bath.n_bosons = n;
    const auto times = uniform_grid(t_max, pts);
    const auto base = base_rate_series(bath, times);
    return std::pair{solve_tcl(bath, frame, times, base), solve_apo(bath, frame, times, base)};
  };
  double apo_end[2] = {0, 0};
  double coh = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double n = i == 0 ? 3.0 : 10.0;
    const auto [tcl, apo] = solve(0.5, n, 400.0, 4001);
    const double tcl_end = tcl.series[0].rho11.back();
    apo_end[i] = apo.series[0].rho11.back();
    for (const auto* tab : {&tcl, &apo})
      for (const cplx& z : tab->series[0].rho10) coh = std::max(coh, std::abs(z));
    rep.le("N=" + fix(n, 0) + " tcl2 rho11(400)", std::abs(tcl_end), 1e-2);
  }
  rep.add("apo2 rho11(400): N=3 " + fix(apo_end[0], 4) + " > 0, N=10 " + fix(apo_end[1], 4) +
              " > N=3",
          apo_end[0] > 0.0 && apo_end[1] > apo_end[0]);
  rep.le("max|rho10|", coh, 1e-10);
  double short_dev = 0.0;
  for (double n : {3.0, 10.0}) {
    const auto [tcl, apo] = solve(0.05, n, 0.5, 51);
    for (std::size_t k = 0; k < tcl.time.size(); ++k)
      short_dev = std::max(short_dev, std::abs(apo.series[0].rho11[k] - tcl.series[0].rho11[k]));
  }
  rep.le("gamma=0.05 max|apo2 - tcl2| rho11 for omega_c t <= 0.5", short_dev, 1e-3);
  rep.runtime(elapsed(t0), 30.0);
}

// ---- 12 ----
void entropy_properties(Report& rep) {
  auto s = [](double r) { return entanglement_entropy(DephasingState::gaussian(kC, kC, r, 1.0)); };
  double odd = 0.0, drop = 0.0;
  double prev = s(0.0);
  for (int k = 1; k <= 40; ++k) {
    const double r = k * 0.1;
    const double sp = s(r);
    odd = std::max(odd, std::abs(sp - s(-r)));
    drop = std::max(drop, prev - sp);
    prev = sp;
  }
  const double s_inf = s(12.0);
  rep.le("max|S(r) - S(-r)|", odd, 1e-12);
  rep.le("max decrease of S on 0 <= r <= 4", std::max(drop, 0.0), 1e-12);
  rep.le("S(0)", std::abs(s(0.0)), 1e-10);
  rep.le("|S(r=12) - ln 2|", std::abs(s_inf - std::numbers::ln2), 1e-9);
  rep.le("(S_inf - S(2)) / S_inf", (s_inf - s(2.0)) / s_inf, 0.015);
}

// ---- 13 ----
bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

void determinism(Report& rep, const std::vector<CriterionResult>& earlier) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("oqs_apo_determinism_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto a = named_figure("fig2", (root / "a").string(), 0);
  const auto b = named_figure("fig2", (root / "b").string(), 1);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i)
    same = fs::path(a[i]).filename() == fs::path(b[i]).filename() && same_bytes(a[i], b[i]);
  fs::remove_all(root);
  rep.add("fig2 twice (jobs auto vs 1): " + std::to_string(a.size()) + " files byte-identical", same);
  std::string failing;
  for (const auto& r : earlier)
    if (r.verdict != Verdict::pass) failing += (failing.empty() ? "" : ",") + std::to_string(r.id);
  rep.add(failing.empty() ? "criteria 1-12 pass" : "criteria 1-12 pass (failing: " + failing + ")",
          failing.empty());
}

}  // namespace

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "frame round-trip";
    case 2: return "dephasing product-state degeneracy";
    case 3: return "exact Gaussian peak";
    case 4: return "TCL2 long-time limit";
    case 5: return "APO2 long-time decay";
    case 6: return "APO boundedness and imaginary artifact";
    case 7: return "double-Gaussian oscillation";
    case 8: return "engine order of error";
    case 9: return "engine vs closed forms";
    case 10: return "correlated-projection reductions";
    case 11: return "damped-qubit asymptotics";
    case 12: return "entropy properties";
    case 13: return "determinism and aggregate";
  }
  throw ConfigError("no acceptance criterion " + std::to_string(id));
}

std::string CriterionResult::line() const {
  std::string s = verdict == Verdict::pass ? "PASS " : verdict == Verdict::fail ? "FAIL " : "ERROR";
  char id_buf[8];
  std::snprintf(id_buf, sizeof id_buf, " %2d ", id);
  s += id_buf + title;
  if (verdict == Verdict::error) return s + ": numerical failure in " + error;
  s += ":";
  for (std::size_t i = 0; i < checks.size(); ++i)
    s += std::string(i ? ";" : "") + " " + (checks[i].ok ? "" : "[x] ") + checks[i].what;
  return s;
}

CriterionResult run_criterion(int id, const std::vector<CriterionResult>* earlier) {
  CriterionResult res;
  res.id = id;
  res.title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  try {
    switch (id) {
      case 1: frame_round_trip(rep); break;
      case 2: product_degeneracy(rep); break;
      case 3: exact_peak(rep); break;
      case 4: tcl_limit(rep); break;
      case 5: apo_decay(rep); break;
      case 6: apo_bounds(rep); break;
      case 7: double_gaussian_oscillation(rep); break;
      case 8: engine_order(rep); break;
      case 9: engine_closed_form(rep); break;
      case 10: corrproj_reductions(rep); break;
      case 11: damped_asymptotics(rep); break;
      case 12: entropy_properties(rep); break;
      case 13: {
        std::vector<CriterionResult> own;
        if (!earlier) {
          for (int k = 1; k < kCriteriaCount; ++k) own.push_back(run_criterion(k));
          earlier = &own;
        }
        determinism(rep, *earlier);
        break;
      }
    }
    res.checks = rep.take();
    res.verdict = std::all_of(res.checks.begin(), res.checks.end(), [](const Check& c) { return c.ok; })
                      ? Verdict::pass
                      : Verdict::fail;
  } catch (const NumericalError& e) {
    res.verdict = Verdict::error;
    res.error = e.operation() + " (" + e.what() + ")";
  }
  res.seconds = elapsed(t0);
  return res;
}

int exit_status(const CriterionResult& r) {
  switch (r.verdict) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::error: return 2;
  }
  return 1;
}

int selftest(std::ostream& os, bool timings) {
  std::vector<CriterionResult> results;
  for (int id = 1; id <= kCriteriaCount; ++id) {
    results.push_back(run_criterion(id, id == kCriteriaCount ? &results : nullptr));
    os << results.back().line();
    if (timings) os << "  [" << fix(results.back().seconds, 2) << " s]";
    os << '\n' << std::flush;
  }
  int passed = 0, status = 0;
  for (const auto& r : results) {
    passed += r.verdict == Verdict::pass;
    status = std::max(status, exit_status(r));
  }
  os << passed << "/" << kCriteriaCount << " criteria pass\n";
  return status;
}

}  // namespace oqs
