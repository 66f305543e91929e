#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oqs/qmat.hpp"

using namespace oqs;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = cplx(n(rng), n(rng));
  return m;
}

}  // namespace

TEST_CASE("pauli algebra in the (|1>, |0>) basis") {
  CHECK(approx_equal(sigma_x() * sigma_y(), kI * sigma_z(), 1e-15));
  CHECK(approx_equal(sigma_y() * sigma_z(), kI * sigma_x(), 1e-15));
  CHECK(approx_equal(sigma_plus(), 0.5 * (sigma_x() + kI * sigma_y()), 1e-15));
  CHECK(sigma_plus()(0, 1) == cplx(1.0));
  CHECK(sigma_plus()(1, 0) == cplx(0.0));
  CHECK(approx_equal(sigma_minus(), dagger(sigma_plus()), 0.0));
  // sigma_z |1> = +|1>
  CHECK(sigma_z()(0, 0) == cplx(1.0));
}

TEST_CASE("tensor product index layout") {
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_matrix(rng, 2, 3);
  const ComplexMatrix b = random_matrix(rng, 4, 2);
  const ComplexMatrix t = tensor(a, b);
  REQUIRE(t.rows() == 8);
  REQUIRE(t.cols() == 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 2; ++l) CHECK(t(i * 4 + k, j * 2 + l) == a(i, j) * b(k, l));
}

TEST_CASE("partial traces of products and of a generic matrix") {
  std::mt19937_64 rng(2);
  const ComplexMatrix a = random_matrix(rng, 2, 2);
  const ComplexMatrix b = random_matrix(rng, 3, 3);
  const BipartiteShape shape{2, 3};
  CHECK(approx_equal(partial_trace_env(tensor(a, b), shape), a * b.trace(), 1e-13));
  CHECK(approx_equal(partial_trace_sys(tensor(a, b), shape), b * a.trace(), 1e-13));

  const ComplexMatrix m = random_matrix(rng, 6, 6);
  const ComplexMatrix re = partial_trace_env(m, shape);
  // element-wise definition
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < 3; ++k) s += m(i * 3 + k, j * 3 + k);
      CHECK(std::abs(re(i, j) - s) < 1e-14);
    }
  CHECK(std::abs(trace(partial_trace_sys(m, shape)) - trace(m)) < 1e-13);
  CHECK_THROWS_AS(partial_trace_env(random_matrix(rng, 5, 5), shape), DimensionError);
}

TEST_CASE("commutators") {
  CHECK(approx_equal(commutator(sigma_x(), sigma_y()), 2.0 * kI * sigma_z(), 1e-15));
  CHECK(approx_equal(anticommutator(sigma_x(), sigma_x()), 2.0 * identity(2), 1e-15));
}

TEST_CASE("matrix exponential") {
  const double th = 0.7;
  const ComplexMatrix u = matrix_exp(sigma_x(), cplx(0.0, -th));
  CHECK(approx_equal(u, std::cos(th) * identity(2) - kI * std::sin(th) * sigma_x(), 1e-14));

  // non-normal: exp of a nilpotent matrix truncates after the linear term
  ComplexMatrix n = ComplexMatrix::Zero(3, 3);
  n(0, 1) = 1.0;
  n(1, 2) = 1.0;
  ComplexMatrix expect = identity(3) + n;
  expect(0, 2) = 0.5;
  CHECK(approx_equal(matrix_exp(n, 1.0), expect, 1e-13));

  std::mt19937_64 rng(3);
  const ComplexMatrix g = random_matrix(rng, 5, 5);
  const ComplexMatrix h = 0.5 * (g + dagger(g));
  const HermitianSpectrum spec(h);
  CHECK(approx_equal(spec.exp(cplx(0.0, -1.3)), matrix_exp(h, cplx(0.0, -1.3)), 1e-12));
  const ComplexMatrix uu = spec.exp(cplx(0.0, 2.0));
  CHECK(approx_equal(uu * dagger(uu), identity(5), 1e-12));

  CHECK_THROWS_AS(matrix_exp(ComplexMatrix::Zero(65, 65), 1.0), DimensionError);
}

TEST_CASE("density operator validation") {
  ComplexMatrix rho(2, 2);
  rho << 0.7, 0.1, 0.1, 0.3;
  CHECK_NOTHROW(DensityOperator{rho});
  ComplexMatrix bad_trace = rho * 1.1;
  CHECK_THROWS_AS(DensityOperator{bad_trace}, ValidationError);
  ComplexMatrix not_herm = rho;
  not_herm(0, 1) = 0.2;
  CHECK_THROWS_AS(DensityOperator{not_herm}, ValidationError);
  ComplexMatrix negative(2, 2);
  negative << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityOperator{negative}, ValidationError);
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(DensityOperator(0.5 * identity(2))) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  ComplexMatrix pure = ComplexMatrix::Zero(3, 3);
  pure(1, 1) = 1.0;
  CHECK(std::abs(von_neumann_entropy(DensityOperator(pure))) < 1e-14);
  ComplexMatrix mixed = ComplexMatrix::Zero(2, 2);
  mixed(0, 0) = 0.25;
  mixed(1, 1) = 0.75;
  const double expect = -0.25 * std::log(0.25) - 0.75 * std::log(0.75);
  CHECK(von_neumann_entropy(DensityOperator(mixed)) == doctest::Approx(expect).epsilon(1e-14));
}
