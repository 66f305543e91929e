#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oqs/engine.hpp"

using namespace oqs;

namespace {

ComplexMatrix fock(std::size_t n, std::size_t n_max) {
  ComplexMatrix m = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  m(n, n) = 1.0;
  return m;
}

ComplexMatrix qubit_state(double p, cplx c) {
  ComplexMatrix rs(2, 2);
  rs << p, c, std::conj(c), 1.0 - p;
  return rs;
}

}  // namespace

TEST_CASE("resonant Rabi oscillation from the exact oracle") {
  const double g = 0.3;
  const auto spec = jaynes_cummings(1.0, 1.0, g, 3);
  const ComplexMatrix rho = tensor(qubit_state(1.0, 0.0), fock(0, 3));
  const auto times = uniform_grid(5.0, 26);
  const auto out = exact_oracle(rho, spec, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double c = std::cos(g * times[k]);
    CHECK(out[k](0, 0).real() == doctest::Approx(c * c).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("bath covariances of a Fock state") {
  const double w = 1.3;
  const std::size_t n = 2, n_max = 5;
  const auto spec = jaynes_cummings(1.0, w, 0.1, n_max);
  const InteractionPicture ip(spec);
  const DensityOperator rho(fock(n, n_max));
  for (auto [t1, t2] : {std::pair{0.0, 0.0}, std::pair{1.7, 0.4}, std::pair{0.2, 3.1}}) {
    const ComplexMatrix cov = covariance(ip, rho, t1, t2);
    const cplx ph = std::exp(cplx(0.0, -w * (t1 - t2)));
    CHECK(std::abs(cov(0, 1) - double(n + 1) * ph) < 1e-12);
    CHECK(std::abs(cov(1, 0) - double(n) * std::conj(ph)) < 1e-12);
    CHECK(std::abs(cov(0, 0)) < 1e-12);
    CHECK(std::abs(cov(1, 1)) < 1e-12);
  }
  CHECK(ip.env_static() == false);
  CHECK_THROWS_AS(covariance(ip, DensityOperator(identity(2) / 2.0), 0.0, 0.0), DimensionError);
}

TEST_CASE("interaction Hamiltonian layout") {
  const double g = 0.7;
  const std::size_t n_max = 4, d = n_max + 1;
  const ComplexMatrix h = jaynes_cummings(0.5, 1.0, g, n_max).interaction_hamiltonian();
  for (std::size_t n = 1; n <= n_max; ++n)
    CHECK(std::abs(h(n - 1, d + n) - g * std::sqrt(double(n))) < 1e-14);
  CHECK(is_hermitian(h, 1e-14));
}

TEST_CASE("vectorization and sandwich superoperators") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  auto random2 = [&] {
    ComplexMatrix m(2, 2);
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = cplx(normal(rng), normal(rng));
    return m;
  };
  const ComplexMatrix l = random2(), r = random2(), x = random2();
  CHECK(approx_equal(unvec(vec(x)), x, 0.0));
  CHECK(approx_equal(unvec(sandwich(l, r) * vec(x)), l * x * r, 1e-13));
  CHECK(vec(sigma_plus())(1) == cplx(1.0));
  CHECK_THROWS_AS(vec(identity(3)), DimensionError);
}

TEST_CASE("RK4 is fourth order and the trace guard fires") {
  const OdeRhs rhs = [](double t, const OdeState& y) {
    OdeState d = y;
    d[0] *= cplx(0.0, -1.0) * (1.0 + t);
    return d;
  };
  const OdeState y0{identity(1)};
  auto err = [&](std::size_t n) {
    const auto out = integrate(rhs, y0, uniform_grid(2.0, n));
    return std::abs(out.back()[0](0, 0) - std::exp(cplx(0.0, -4.0)));
  };
  const double ratio = err(21) / err(41);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);

  const OdeRhs grow = [](double, const OdeState& y) { return y; };
  auto trace_fn = [](const OdeState& y) { return y[0].trace(); };
  CHECK_THROWS_AS(integrate(grow, y0, uniform_grid(1.0, 11), trace_fn), NumericalError);
  const OdeRhs still = [](double, const OdeState& y) { return OdeState{ComplexMatrix::Zero(1, 1) * y[0]}; };
  CHECK_NOTHROW(integrate(still, y0, uniform_grid(1.0, 11), trace_fn));
}

TEST_CASE("block projector family") {
  const std::size_t n_max = 3;
  ComplexMatrix ref = ComplexMatrix::Zero(4, 4);
  ref(0, 0) = 0.5;
  ref(2, 2) = 0.5;
  ref(0, 2) = ref(2, 0) = 0.1;
  std::vector<ComplexMatrix> ps;
  for (std::size_t k = 0; k <= n_max; ++k) ps.push_back(fock(k, n_max));
  const ProjectorFamily fam = build_block_projector(ps, ref);
  CHECK_NOTHROW(fam.validate());
  CHECK(fam.size() == 2);  // empty blocks merge into the first retained one
  ComplexMatrix y_sum = ComplexMatrix::Zero(4, 4);
  for (const auto& y : fam.y) y_sum += y;
  CHECK(approx_equal(y_sum, identity(4), 1e-14));
  CHECK_THROWS_AS(build_block_projector({fock(0, n_max)}, ref), ValidationError);
  CHECK_NOTHROW(trivial_family(ref).validate());
}

TEST_CASE("trivial correlated projection reproduces TCL2") {
  const std::size_t n_max = 3;
  const auto spec = jaynes_cummings(0.8, 1.0, 0.05, n_max);
  const ComplexMatrix rho = jaynes_cummings_state(0.6, 0.8, 2, n_max);
  const auto dec = decompose(DensityOperator(rho), spec.shape());
  const ComplexMatrix ref = average_env_state(dec);
  const auto times = uniform_grid(3.0, 121);
  const auto tcl = solve_tcl2(spec, dec, ref, times);
  const auto cp = solve_corrproj2(spec, dec, trivial_family(ref), times);
  for (std::size_t k = 0; k < times.size(); k += 20) CHECK(max_abs(tcl[k] - cp[k]) < 1e-10);
}

TEST_CASE("rhs against a finite difference of the trajectory") {
  const std::size_t n_max = 3;
  const auto spec = jaynes_cummings(1.2, 1.0, 0.1, n_max);
  const ComplexMatrix rho = tensor(qubit_state(0.4, cplx(0.2, 0.3)), fock(1, n_max));
  const auto dec = decompose(DensityOperator(rho), spec.shape());
  const ComplexMatrix ref = average_env_state(dec);
  const auto times = uniform_grid(2.0, 401);
  const auto traj = solve_tcl2(spec, dec, ref, times);
  const std::size_t k = 200;
  const double h = times[1];
  const ComplexMatrix fd = (traj[k + 1] - traj[k - 1]) / (2.0 * h);
  const ComplexMatrix rhs = tcl2_rhs(traj[k], dec, ref, spec, times[k], 2000);
  CHECK(max_abs(fd - rhs) < 1e-6);
}

TEST_CASE("second-order methods at weak coupling") {
  const std::size_t n_max = 4;
  const auto times = uniform_grid(2.0, 201);
  SUBCASE("g = 0 keeps the state") {
    const auto spec = jaynes_cummings(1.0, 1.0, 0.0, n_max);
    const ComplexMatrix rho = jaynes_cummings_state(0.6, 0.8, 2, n_max);
    const auto dec = decompose(DensityOperator(rho), spec.shape());
    const ComplexMatrix r0 = partial_trace_env(rho, spec.shape());
    for (const auto& s : solve_apo2(spec, dec, times)) CHECK(max_abs(s - r0) < 1e-14);
    for (const auto& s : solve_tcl2(spec, dec, average_env_state(dec), times))
      CHECK(max_abs(s - r0) < 1e-14);
  }
  SUBCASE("environment unitaries commuting with H_E leave the dynamics unchanged") {
    const auto spec = jaynes_cummings(0.9, 1.0, 0.08, n_max);
    const ComplexMatrix rho = jaynes_cummings_state(0.6, 0.8, 2, n_max);
    ComplexMatrix u = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) u(k, k) = std::exp(cplx(0.0, 0.3 * k * k));
    InteractionSpec rotated = spec;
    for (auto& c : rotated.couplings) c.b = u * c.b * u.adjoint();
    const ComplexMatrix big = tensor(identity(2), u);
    const ComplexMatrix rho_u = big * rho * big.adjoint();
    const auto a = solve_apo2(spec, decompose(DensityOperator(rho), spec.shape()), times);
    const auto b = solve_apo2(rotated, decompose(DensityOperator(rho_u), spec.shape()), times);
    for (std::size_t k = 0; k < times.size(); k += 25) CHECK(max_abs(a[k] - b[k]) < 1e-12);
  }
}

TEST_CASE("specification and grid checks") {
  const auto spec = jaynes_cummings(1.0, 1.0, 0.1, 3);
  const ComplexMatrix rho = jaynes_cummings_state(0.6, 0.8, 1, 3);
  const auto dec = decompose(DensityOperator(rho), spec.shape());
  CHECK_THROWS_AS(solve_apo2(spec, dec, uniform_grid(50.0, 11)), ConfigError);
  CHECK_THROWS_AS(solve_apo2(spec, dec, {0.0, 0.01, 0.03}), ConfigError);
  CHECK_THROWS_AS(exact_oracle(jaynes_cummings_state(0.6, 0.8, 1, 40),
                               jaynes_cummings(1.0, 1.0, 0.1, 40), uniform_grid(1.0, 11)),
                  DimensionError);
  InteractionSpec bad = spec;
  bad.couplings.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  InteractionSpec wrong = spec;
  wrong.h_system = identity(3);
  CHECK_THROWS_AS(wrong.validate(), DimensionError);
  const auto other = decompose(DensityOperator(jaynes_cummings_state(0.6, 0.8, 1, 4)), {2, 5});
  CHECK_THROWS_AS(solve_apo2(spec, other, uniform_grid(1.0, 11)), DimensionError);
}
