#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "oqs/errors.hpp"

namespace oqs {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr std::size_t kMaxDim = 64;
inline constexpr double kDefaultPsdFloor = 1e-9;

/// Pauli matrices in the basis (|1>, |0>), i.e. row 0 is the excited level.
ComplexMatrix identity(std::size_t n);
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
ComplexMatrix sigma_plus();   // |1><0|
ComplexMatrix sigma_minus();  // |0><1|

struct BipartiteShape {
  std::size_t dim_system = 2;
  std::size_t dim_env = 1;

  BipartiteShape() = default;
  BipartiteShape(std::size_t ds, std::size_t de);
  std::size_t total() const { return dim_system * dim_env; }
  void check(const ComplexMatrix& m) const;
};

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace_env(const ComplexMatrix& m, const BipartiteShape& shape);
ComplexMatrix partial_trace_sys(const ComplexMatrix& m, const BipartiteShape& shape);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix dagger(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol);
double max_abs(const ComplexMatrix& m);
cplx trace(const ComplexMatrix& m);

/// exp(scale * m). Hermitian and anti-hermitian inputs go through a
/// self-adjoint eigendecomposition; anything else uses Pade scaling-and-squaring.
ComplexMatrix matrix_exp(const ComplexMatrix& m, cplx scale);

/// Eigen-decomposition of a hermitian matrix, kept around so that
/// exp(-i h t) can be evaluated for many t at O(n^3) each without refactoring.
class HermitianSpectrum {
 public:
  HermitianSpectrum() = default;
  explicit HermitianSpectrum(const ComplexMatrix& h);

  const RealVector& values() const { return values_; }
  const ComplexMatrix& vectors() const { return vectors_; }
  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
  /// exp(scale * h)
  ComplexMatrix exp(cplx scale) const;
  double max_abs_eigenvalue() const;

 private:
  RealVector values_;
  ComplexMatrix vectors_;
};

class DensityOperator {
 public:
  /// Validates hermiticity and unit trace within `tol`, eigenvalues >= -psd_floor.
  explicit DensityOperator(ComplexMatrix m, double tol = 1e-10,
                           double psd_floor = kDefaultPsdFloor);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  double tolerance() const { return tol_; }
  RealVector eigenvalues() const;

 private:
  ComplexMatrix m_;
  double tol_;
};

/// Natural-log von Neumann entropy, 0 log 0 := 0.
double von_neumann_entropy(const DensityOperator& rho);

}  // namespace oqs
