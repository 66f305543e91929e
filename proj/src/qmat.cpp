#include "oqs/qmat.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace oqs {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
}

void require_same(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  require_square(a, what);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": dimension mismatch");
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

ComplexMatrix identity(std::size_t n) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix sigma_plus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

BipartiteShape::BipartiteShape(std::size_t ds, std::size_t de) : dim_system(ds), dim_env(de) {
  if (ds == 0 || de == 0) throw DimensionError("BipartiteShape: dimensions must be positive");
}

void BipartiteShape::check(const ComplexMatrix& m) const {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total())
    throw DimensionError("matrix of size " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " does not match bipartite shape " +
                         std::to_string(dim_system) + "x" + std::to_string(dim_env));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_trace_env(const ComplexMatrix& m, const BipartiteShape& shape) {
  shape.check(m);
  const auto ds = static_cast<Eigen::Index>(shape.dim_system);
  const auto de = static_cast<Eigen::Index>(shape.dim_env);
  ComplexMatrix out(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i)
    for (Eigen::Index j = 0; j < ds; ++j) out(i, j) = m.block(i * de, j * de, de, de).trace();
  return out;
}

ComplexMatrix partial_trace_sys(const ComplexMatrix& m, const BipartiteShape& shape) {
  shape.check(m);
  const auto ds = static_cast<Eigen::Index>(shape.dim_system);
  const auto de = static_cast<Eigen::Index>(shape.dim_env);
  ComplexMatrix out = ComplexMatrix::Zero(de, de);
  for (Eigen::Index i = 0; i < ds; ++i) out += m.block(i * de, i * de, de, de);
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same(a, b, "commutator");
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same(a, b, "anticommutator");
  return a * b + b * a;
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(a - b) <= tol;
}

cplx trace(const ComplexMatrix& m) {
  require_square(m, "trace");
  return m.trace();
}

HermitianSpectrum::HermitianSpectrum(const ComplexMatrix& h) {
  require_square(h, "HermitianSpectrum");
  if (!all_finite(h)) throw NumericalError("HermitianSpectrum", "non-finite entries");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("HermitianSpectrum", "eigensolver failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

ComplexMatrix HermitianSpectrum::exp(cplx scale) const {
  Eigen::VectorXcd d(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) d(k) = std::exp(scale * values_(k));
  return vectors_ * d.asDiagonal() * vectors_.adjoint();
}

double HermitianSpectrum::max_abs_eigenvalue() const {
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

ComplexMatrix matrix_exp(const ComplexMatrix& m, cplx scale) {
  require_square(m, "matrix_exp");
  if (static_cast<std::size_t>(m.rows()) > kMaxDim)
    throw DimensionError("matrix_exp: dimension exceeds " + std::to_string(kMaxDim));
  if (!all_finite(m) || !std::isfinite(scale.real()) || !std::isfinite(scale.imag()))
    throw NumericalError("matrix_exp", "non-finite entries");
  const double norm = std::max(1.0, max_abs(m));
  const double tol = 1e-13 * norm;
  if (max_abs(m - m.adjoint()) <= tol) return HermitianSpectrum(m).exp(scale);
  if (max_abs(m + m.adjoint()) <= tol) {
    // m = i h with h hermitian
    return HermitianSpectrum(-kI * m).exp(kI * scale);
  }
  ComplexMatrix arg = scale * m;
  ComplexMatrix out = arg.exp();
  if (!all_finite(out)) throw NumericalError("matrix_exp", "result overflowed");
  return out;
}

DensityOperator::DensityOperator(ComplexMatrix m, double tol, double psd_floor)
    : m_(std::move(m)), tol_(tol) {
  require_square(m_, "DensityOperator");
  if (!all_finite(m_)) throw ValidationError("DensityOperator: non-finite entries");
  if (!is_hermitian(m_, tol_)) throw ValidationError("DensityOperator: not hermitian");
  const cplx tr = m_.trace();
  if (std::abs(tr - 1.0) > std::max(tol_, 1e-14))
    throw ValidationError("DensityOperator: trace " + std::to_string(tr.real()) + " != 1");
  const RealVector ev = eigenvalues();
  if (ev.minCoeff() < -psd_floor)
    throw ValidationError("DensityOperator: eigenvalue " + std::to_string(ev.minCoeff()) +
                          " below floor");
}

RealVector DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m_ + m_.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double von_neumann_entropy(const DensityOperator& rho) {
  const RealVector ev = rho.eigenvalues();
  double s = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double l = ev(k);
    if (l < -kDefaultPsdFloor)
      throw ValidationError("von_neumann_entropy: negative eigenvalue");
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

}  // namespace oqs
