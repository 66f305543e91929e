#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oqs/dephasing.hpp"
#include "oqs/trajectory.hpp"

using namespace oqs;

namespace {

constexpr double kC = 0.70710678118654752;
const DephasingParams kUnit{1.0, 1.0};

// I0(t) = int_0^t e^{-a (t^2 - tau^2) / 2} dtau solves I0' = 1 - a t I0, I0(0) = 0.
double i0_by_ode(double a, double t) {
  const int n = 20000;
  const double h = t / n;
  double y = 0.0;
  auto f = [a](double s, double v) { return 1.0 - a * s * v; };
  for (int k = 0; k < n; ++k) {
    const double s = k * h;
    const double k1 = f(s, y), k2 = f(s + h / 2, y + h / 2 * k1), k3 = f(s + h / 2, y + h / 2 * k2),
                 k4 = f(s + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

}  // namespace

TEST_CASE("exact coherence of the Gaussian family") {
  for (double r : {-2.0, 0.0, 1.0, 2.5}) {
    const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
    for (double x : {0.0, 0.4, 1.0, 2.0, 3.7}) {
      const cplx z = coherence(st, kUnit, Method::exact, x);
      CHECK(std::abs(z - 0.5 * std::exp(-0.5 * (x - r) * (x - r))) < 1e-12);
      CHECK(std::abs(z.imag()) < 1e-10);
    }
  }
  // xi and sigma only enter through xi sigma t
  const auto st = DephasingState::gaussian(kC, kC, 1.0, 2.0);
  const DephasingParams p{0.5, 2.0};
  CHECK(std::abs(coherence(st, p, Method::exact, p.time(1.3)) - 0.5 * std::exp(-0.045)) < 1e-12);
}

TEST_CASE("p_alpha moments: closed forms against quadrature") {
  for (double r : {0.3, 1.0, -1.7}) {
    for (const auto& st : {DephasingState::gaussian(0.6, 0.8, r, 1.3),
                           DephasingState::double_gaussian(kC, kC, r, 1.5, 0.8)}) {
      for (int a = 0; a < 3; ++a) {
        const Moments closed = st.alpha_moments(a);
        const Moments quad = moments(st.p(a));
        CHECK(closed.m == doctest::Approx(quad.m).epsilon(1e-8).scale(1.0));
        CHECK(closed.m2 == doctest::Approx(quad.m2).epsilon(1e-8));
        CHECK(closed.var == doctest::Approx(quad.var).epsilon(1e-8));
      }
      CHECK_NOTHROW(st.p(1).validate());
      CHECK_NOTHROW(st.p(2).validate());
    }
  }
}

TEST_CASE("normalization and first moment closed forms") {
  const double r = 1.2, q = 1.7;
  const auto g = DephasingState::gaussian(kC, kC, r, 1.0);
  CHECK(g.normalization() == doctest::Approx(1.0 + std::exp(-0.5 * r * r)).epsilon(1e-12));
  const auto dg = DephasingState::double_gaussian(kC, kC, r, q, 1.0);
  CHECK(dg.normalization() ==
        doctest::Approx(1.0 + std::exp(-0.5 * r * r) * std::cos(q * r)).epsilon(1e-12));
  // m_2 = -2 C1 C0 sigma r e^{-r^2/2}: negative for r > 0 with the chosen phase sign
  const double sigma = 1.5;
  const auto s = DephasingState::gaussian(0.6, 0.8, r, sigma);
  CHECK(s.alpha_moments(2).m ==
        doctest::Approx(-2.0 * 0.48 * sigma * r * std::exp(-0.5 * r * r)).epsilon(1e-12));
}

TEST_CASE("weight products") {
  const auto s = DephasingState::gaussian(kC, kC, 1.0, 1.0);
  CHECK(s.weight_product(0) == cplx(-0.5, 0.5));
  CHECK(std::abs(s.weight_product(1) - 0.5 * s.normalization()) < 1e-15);
  CHECK(s.weight_product(2) == cplx(0.0, -0.5));
  CHECK(s.weight_product(3) == cplx(0.0));
  // the weights reassemble the initial coherence
  cplx rho10 = 0.0;
  for (int a = 0; a < 4; ++a) rho10 += s.weight_product(a);
  CHECK(std::abs(rho10 - coherence(s, kUnit, Method::exact, 0.0)) < 1e-14);
}

TEST_CASE("TCL inner integrals against an ODE oracle") {
  for (double var : {1.0, 4.0, 200.0}) {
    const Moments env{0.0, var, var};
    const double a = var;
    for (double t : {0.1, 0.8, 2.5, 7.0}) {
      const TclIntegrals ints = tcl_integrals(env, kUnit, t);
      CHECK(std::abs(ints.first - i0_by_ode(a, t)) < 1e-9);
      CHECK(std::abs(ints.second - (1.0 - std::exp(-0.5 * a * t * t)) / a) < 1e-10);
    }
  }
  CHECK(tcl_integrals({0.0, 1.0, 1.0}, kUnit, 0.0).first == cplx(0.0));
  CHECK_THROWS_AS(tcl_integrals({0.0, 1.0, 1.0}, kUnit, 1e6), NumericalError);
}

TEST_CASE("TCL long-time tail decays as 1/(xi sigma t)") {
  // Re rho10^TCL - limit ~ C / x with C = sum_a m_a Im(w_a) / sigma, since
  // int_0^t e^{-a (t^2 - tau^2)/2} ~ 1 / (a t).
  const double r = 1.0;
  const auto st = DephasingState::gaussian(kC, kC, r, 1.0);
  const Moments env = st.alpha_moments(0);
  double limit = 0.0, c = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Moments m = st.alpha_moments(a);
    limit += (st.weight_product(a) * (1.0 - (m.m2 - m.m * env.m) / env.var)).real();
    c += m.m * st.weight_product(a).imag();
  }
  CHECK(c == doctest::Approx(0.5 * r * std::exp(-0.5 * r * r)).epsilon(1e-12));
  CHECK(limit == doctest::Approx(0.5 * r * r * std::exp(-0.5 * r * r)).epsilon(1e-12));
  for (double x : {20.0, 30.0, 40.0}) {
    const double re = coherence(st, kUnit, Method::tcl2, x).real();
    CHECK((re - limit) * x == doctest::Approx(c).epsilon(1.5 / (x * x)));
  }
}

TEST_CASE("product state: all methods coincide") {
  const auto st = DephasingState::gaussian(0.6, 0.8, 0.0, 1.0);
  const auto x = uniform_grid(5.0, 101);
  const auto e = coherence_series(st, kUnit, Method::exact, x);
  const auto t = coherence_series(st, kUnit, Method::tcl2, x);
  const auto a = coherence_series(st, kUnit, Method::apo2, x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(std::abs(e[k] - t[k]) < 1e-9);
    CHECK(std::abs(e[k] - a[k]) < 1e-12);
  }
}

TEST_CASE("second-order methods agree with exact to third order at short times") {
  const auto st = DephasingState::gaussian(kC, kC, 1.0, 1.0);
  for (Method m : {Method::tcl2, Method::apo2}) {
    const double e1 = std::abs(coherence(st, kUnit, m, 0.3) - coherence(st, kUnit, Method::exact, 0.3));
    const double e2 = std::abs(coherence(st, kUnit, m, 0.15) - coherence(st, kUnit, Method::exact, 0.15));
    CHECK(e1 / e2 >= 7.0);
    CHECK(e1 <= 0.3 * 0.3 * 0.3);
  }
}

TEST_CASE("APO decays and its overshoot above C1 C0 stays small") {
  double worst = 0.0;
  for (int k = -8; k <= 8; ++k) {
    const auto st = DephasingState::gaussian(kC, kC, 0.25 * k, 1.0);
    CHECK(std::abs(coherence(st, kUnit, Method::apo2, 10.0)) < 1e-3);
    for (double z : {0.5, 0.75, 1.0, 1.5})
      worst = std::max(worst, std::abs(coherence(st, kUnit, Method::apo2, z)));
  }
  CHECK(worst < 0.5025);
}

TEST_CASE("populations and reduced state") {
  const auto st = DephasingState::gaussian(0.6, 0.8, 1.5, 1.0);
  CHECK(st.rho11() == doctest::Approx(0.36));
  const ComplexMatrix rho = reduced_state(st);
  CHECK(std::abs(rho(0, 1)) == doctest::Approx(0.48 * std::exp(-0.5 * 1.5 * 1.5)).epsilon(1e-12));
  const double c = std::abs(rho(0, 1));
  const double disc = std::sqrt(0.25 * (0.36 - 0.64) * (0.36 - 0.64) + c * c);
  const double l1 = 0.5 + disc, l2 = 0.5 - disc;
  CHECK(entanglement_entropy(st) == doctest::Approx(-l1 * std::log(l1) - l2 * std::log(l2)).epsilon(1e-12));
}

TEST_CASE("entropy is even, monotone in |r| and tends to ln 2") {
  auto s = [](double r) { return entanglement_entropy(DephasingState::gaussian(kC, kC, r, 1.0)); };
  CHECK(s(0.0) == doctest::Approx(0.0).scale(1.0));
  double prev = 0.0;
  for (int k = 1; k <= 30; ++k) {
    CHECK(s(0.1 * k) == doctest::Approx(s(-0.1 * k)).epsilon(1e-14));
    CHECK(s(0.1 * k) >= prev);
    prev = s(0.1 * k);
  }
  CHECK(s(10.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  CHECK((std::numbers::ln2 - s(2.0)) / std::numbers::ln2 < 0.015);
}

TEST_CASE("tabulated density follows the quadrature path") {
  std::vector<double> q, p;
  for (int k = 0; k <= 4000; ++k) {
    const double x = -10.0 + 20.0 * k / 4000.0;
    q.push_back(x);
    p.push_back(std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
  }
  const auto tab = MomentumDistribution::tabulated(q, p);
  const DephasingState st(kC, kC, 1.0, tab, 1.0);
  const auto ref = DephasingState::gaussian(kC, kC, 1.0, 1.0);
  for (double x : {0.0, 0.7, 1.5}) {
    CHECK(std::abs(coherence(st, kUnit, Method::exact, x) - coherence(ref, kUnit, Method::exact, x)) < 1e-5);
    CHECK(std::abs(coherence(st, kUnit, Method::apo2, x) - coherence(ref, kUnit, Method::apo2, x)) < 1e-5);
    CHECK(std::abs(coherence(st, kUnit, Method::tcl2, x) - coherence(ref, kUnit, Method::tcl2, x)) < 1e-5);
  }
}

TEST_CASE("method names") {
  for (Method m : {Method::exact, Method::tcl2, Method::apo2, Method::corrproj2})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("tcl4"), ConfigError);
  const auto st = DephasingState::gaussian(kC, kC, 1.0, 1.0);
  CHECK_THROWS_AS(coherence(st, kUnit, Method::corrproj2, 1.0), ConfigError);
}
