#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oqs/damped.hpp"
#include "oqs/engine.hpp"
#include "oqs/frame.hpp"

using namespace oqs;

TEST_CASE("rate integrals at varsigma = 0 against closed forms") {
  BathSpec bath;
  bath.gamma = 0.3;
  bath.omega_c = 2.0;
  bath.n_bosons = 4.0;
  for (double t : {0.05, 1.0, 7.5, 60.0}) {
    const BaseRates b = base_rates(bath, t);
    const double s = bath.gamma * (1.0 - std::cos(bath.omega_c * t)) / t;
    const double c = -bath.gamma * (bath.omega_c - std::sin(bath.omega_c * t) / t);
    CHECK(b.vac_s == doctest::Approx(s).epsilon(1e-8));
    CHECK(b.vac_c == doctest::Approx(c).epsilon(1e-8));
    CHECK(b.occ_s == doctest::Approx(4.0 * s).epsilon(1e-8));
    CHECK(b.occ_c == doctest::Approx(4.0 * c).epsilon(1e-8));
  }
  const BaseRates zero = base_rates(bath, 0.0);
  CHECK(zero.vac_s == 0.0);
  CHECK(zero.occ_c == 0.0);
}

TEST_CASE("rate scaling identities") {
  BathSpec bath;
  bath.gamma = 1.0;
  bath.varsigma = 0.4;
  bath.n_bosons = 1.0;
  const BaseRates b = base_rates(bath, 3.0);
  bath.gamma = 0.25;
  const BaseRates direct = base_rates(bath, 3.0);
  const BaseRates scaled = b.gamma_scaled(0.25);
  CHECK(scaled.vac_s == doctest::Approx(direct.vac_s).epsilon(1e-9));
  CHECK(scaled.vac_c == doctest::Approx(direct.vac_c).epsilon(1e-9));
  CHECK(scaled.occ_s == doctest::Approx(direct.occ_s).epsilon(1e-9));
  const RateSet r = b.scaled(2.0);
  CHECK(r.r_minus == doctest::Approx(2.0 * b.occ_s));
  CHECK(r.rbar() == doctest::Approx(b.vac_s + 4.0 * b.occ_s));
  CHECK(r.ibar() == doctest::Approx(b.vac_c + 4.0 * b.occ_c));
}

TEST_CASE("initial-state frame data") {
  DampedInitialState init{0.6, 0.8};
  const auto w = init.weights();
  CHECK(w[3] == doctest::Approx(2.0 * 0.64));
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  const auto ops = init.system_ops();
  for (int a = 0; a < 4; ++a) rho += w[a] * ops[a];
  CHECK(std::abs(rho(0, 0) - 0.64) < 1e-15);  // rho11 = |C1|^2
  CHECK(std::abs(rho(0, 1)) < 1e-15);
  CHECK(n_av_scale(w, ops, init.occupation_scales()) == doctest::Approx(0.64));
  CHECK_THROWS_AS(DampedInitialState({0.6, 0.6}).validate(), ConfigError);
}

TEST_CASE("single discrete mode of weight 2 g^2 matches the generic engine") {
  const double g = 0.05;
  const std::size_t n = 2, n_max = 4;
  for (double vs : {1.0, 0.7}) {
    const InteractionSpec spec = jaynes_cummings(vs, 1.0, g, n_max);
    ComplexMatrix rs(2, 2);
    rs << 0.3, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.7;
    ComplexMatrix re = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    re(n, n) = 1.0;
    const ComplexMatrix rho = tensor(rs, re);
    const auto dec = decompose(DensityOperator(rho), spec.shape());
    const auto times = uniform_grid(4.0, 401);
    const auto ap = solve_apo2(spec, dec, times);
    const auto tc = solve_tcl2(spec, dec, average_env_state(dec), times);

    BathSpec b;
    b.varsigma = vs;
    b.n_bosons = static_cast<double>(n);
    b.modes = {{1.0, 2.0 * g * g}};
    DampedFrame f;
    const auto ops = DampedInitialState{}.system_ops();
    const ComplexMatrix id = identity(2);
    const ComplexMatrix fs[4] = {id, id + sigma_x(), id + sigma_y(), id + sigma_z()};
    for (int a = 0; a < 4; ++a) {
      f.weights[a] = (fs[a] * rs).trace().real();
      f.ops[a] = ops[a];
      f.scales[a] = 1.0;
    }
    f.ref_scale = 1.0;
    const auto da = solve_apo(b, f, times).series.front();
    const auto dt = solve_tcl(b, f, times).series.front();
    for (std::size_t k : {100u, 250u, 400u}) {
      CHECK(std::abs(ap[k](0, 1) - da.rho10[k]) < 1e-7);
      CHECK(std::abs(ap[k](0, 0).real() - da.rho11[k]) < 1e-7);
      CHECK(std::abs(tc[k](0, 1) - dt.rho10[k]) < 1e-7);
      CHECK(std::abs(tc[k](0, 0).real() - dt.rho11[k]) < 1e-7);
    }
  }
}

TEST_CASE("asymptotics of the correlated initial state") {
  const DampedInitialState init;
  for (double n : {3.0, 10.0}) {
    BathSpec bath;
    bath.gamma = 0.5;
    bath.n_bosons = n;
    const Asymptote apo = asymptotic_population("apo2", bath, init);
    const Asymptote tcl = asymptotic_population("tcl2", bath, init);
    CHECK(apo.converged);
    CHECK(tcl.converged);
    // each frame term relaxes to its own detailed balance n_a / (2 n_a + 1); only D_0 has a trace
    const double na = init.c1 * init.c1 * n;
    CHECK(apo.value == doctest::Approx(na / (2.0 * na + 1.0)).epsilon(1e-5));
    CHECK(std::abs(tcl.value) < 1e-2);
  }
  CHECK_THROWS_AS(asymptotic_population("exact", BathSpec{}, init), ConfigError);
}

TEST_CASE("coherence stays zero and short times agree") {
  BathSpec bath;
  bath.gamma = 0.05;
  bath.n_bosons = 3.0;
  const auto times = uniform_grid(0.5, 51);
  const auto a = solve_apo(bath, DampedInitialState{}, times).series.front();
  const auto t = solve_tcl(bath, DampedInitialState{}, times).series.front();
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(a.rho10[k]) < 1e-12);
    CHECK(std::abs(t.rho10[k]) < 1e-12);
    CHECK(std::abs(a.rho11[k] - t.rho11[k]) < 1e-3);
  }
  CHECK(a.rho11[0] == doctest::Approx(0.5));
}

TEST_CASE("grid and bath validation") {
  BathSpec bath;
  CHECK_THROWS_AS(solve_apo(bath, DampedInitialState{}, uniform_grid(10.0, 11)), ConfigError);
  CHECK_THROWS_AS(solve_apo(bath, DampedInitialState{}, {0.0, 0.05, 0.07}), ConfigError);
  CHECK_THROWS_AS(solve_apo(bath, DampedInitialState{}, {0.01, 0.02}), ConfigError);
  bath.gamma = -1.0;
  CHECK_THROWS_AS(bath.validate(), ConfigError);
  BathSpec modes;
  modes.modes = {{1.0, -0.1}};
  CHECK_THROWS_AS(modes.validate(), ConfigError);
  const auto times = uniform_grid(1.0, 11);
  CHECK_THROWS_AS(solve_tcl(BathSpec{}, damped_frame(DampedInitialState{}), times,
                            std::vector<BaseRates>(3)),
                  DimensionError);
}
