#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oqs/frame.hpp"

using namespace oqs;

namespace {

ComplexMatrix ginibre_state(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) g(i, k) = cplx(normal(rng), normal(rng));
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) g(i, k) = cplx(normal(rng), normal(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("frame operators are biorthogonal") {
  const auto& f = pauli_frame();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(std::abs((f.f_ops[a] * f.d_ops[b]).trace() - cplx(a == b ? 1.0 : 0.0)) < 1e-15);
  // completeness: sum_a Tr[F_a X] D_a = X
  const ComplexMatrix x = (ComplexMatrix(2, 2) << 0.3, cplx(0.1, 0.4), cplx(-0.2, 0.0), 0.9).finished();
  ComplexMatrix back = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 4; ++a) back += (f.f_ops[a] * x).trace() * f.d_ops[a];
  CHECK(approx_equal(back, x, 1e-15));
}

TEST_CASE("round trip on random states") {
  std::mt19937_64 rng(7);
  for (Eigen::Index d = 2; d <= 6; ++d) {
    const ComplexMatrix rho = ginibre_state(rng, 2 * d);
    const auto dec = decompose(DensityOperator(rho), {2, static_cast<std::size_t>(d)});
    CHECK(max_abs(reconstruct(dec).matrix() - rho) <= 1e-12);
    CHECK(approx_equal(reduced_initial(dec).matrix(),
                       partial_trace_env(rho, {2, static_cast<std::size_t>(d)}), 1e-12));
    for (const auto& t : dec.terms) {
      CHECK(t.weight > 0.0);
      CHECK(std::abs(t.env_state.matrix().trace() - 1.0) < 1e-12);
      CHECK(t.env_state.eigenvalues().minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("product states give identical environment states") {
  std::mt19937_64 rng(8);
  const ComplexMatrix rs = ginibre_state(rng, 2);
  const ComplexMatrix re = ginibre_state(rng, 3);
  const auto dec = decompose(DensityOperator(tensor(rs, re)), {2, 3});
  for (const auto& t : dec.terms) CHECK(approx_equal(t.env_state.matrix(), re, 1e-12));
}

TEST_CASE("weights of the correlated damped state") {
  // C0 |0>|0> + C1 |1>|2>, basis index 0 = |1>
  const double c0 = 0.6, c1 = 0.8;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);
  psi(3 + 0) = c0;
  psi(2) = c1;
  const auto dec = decompose(DensityOperator(psi * psi.adjoint()), {2, 3});
  const FrameTerm* t3 = dec.find(3);
  REQUIRE(t3 != nullptr);
  CHECK(std::sqrt(2.0) * t3->weight == doctest::Approx(2.0 * c1 * c1).epsilon(1e-14));
  CHECK(std::abs(t3->env_state.matrix()(2, 2) - 1.0) < 1e-14);
  const FrameTerm* t0 = dec.find(0);
  REQUIRE(t0 != nullptr);
  CHECK(std::sqrt(2.0) * t0->weight == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identity and environment-side unitaries leave the decomposition covariant") {
  std::mt19937_64 rng(9);
  const ComplexMatrix rho = ginibre_state(rng, 8);
  const BipartiteShape shape{2, 4};
  const auto dec = decompose(DensityOperator(rho), shape);

  const auto same = decompose(DensityOperator(tensor(identity(2), identity(4)) * rho), shape);
  REQUIRE(same.terms.size() == dec.terms.size());
  for (std::size_t i = 0; i < dec.terms.size(); ++i)
    CHECK(approx_equal(same.terms[i].env_state.matrix(), dec.terms[i].env_state.matrix(), 0.0));

  const ComplexMatrix u = random_unitary(rng, 4);
  const ComplexMatrix big = tensor(identity(2), u);
  ComplexMatrix rotated = big * rho * big.adjoint();
  rotated = 0.5 * (rotated + rotated.adjoint());
  const auto rot = decompose(DensityOperator(rotated), shape);
  REQUIRE(rot.terms.size() == dec.terms.size());
  for (std::size_t i = 0; i < dec.terms.size(); ++i) {
    CHECK(rot.terms[i].alpha == dec.terms[i].alpha);
    CHECK(rot.terms[i].weight == doctest::Approx(dec.terms[i].weight).epsilon(1e-12));
    CHECK(approx_equal(rot.terms[i].env_state.matrix(),
                       u * dec.terms[i].env_state.matrix() * u.adjoint(), 1e-12));
  }
}

TEST_CASE("explicit decompositions are validated") {
  const auto& f = pauli_frame();
  FrameTerm good{0, 1.0, f.d_ops[0], DensityOperator(identity(3) / 3.0)};
  CHECK_NOTHROW(make_decomposition({good}, {2, 3}));
  FrameTerm wrong_dim = good;
  wrong_dim.env_state = DensityOperator(identity(2) / 2.0);
  CHECK_THROWS_AS(make_decomposition({wrong_dim}, {2, 3}), DimensionError);
  FrameTerm not_herm = good;
  not_herm.system_op = sigma_plus();
  CHECK_THROWS_AS(make_decomposition({not_herm}, {2, 3}), ValidationError);
  CHECK_THROWS_AS(make_decomposition({}, {2, 3}), ValidationError);
}

TEST_CASE("evolve_decomposition with unchanged operators returns the initial state") {
  std::mt19937_64 rng(10);
  const ComplexMatrix rho = ginibre_state(rng, 6);
  const auto dec = decompose(DensityOperator(rho), {2, 3});
  std::vector<ComplexMatrix> ops;
  for (const auto& t : dec.terms) ops.push_back(t.system_op);
  CHECK(approx_equal(evolve_decomposition(dec, ops).matrix(), partial_trace_env(rho, {2, 3}), 1e-12));
  ops.pop_back();
  CHECK_THROWS_AS(evolve_decomposition(dec, ops), DimensionError);
}
