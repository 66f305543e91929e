#include "oqs/frame.hpp"

#include <cmath>
#include <string>

namespace oqs {

const PauliFrame& pauli_frame() {
  static const PauliFrame frame = [] {
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix id = identity(2);
    PauliFrame f;
    f.d_ops[0] = s * (id - sigma_x() - sigma_y() - sigma_z());
    f.d_ops[1] = s * sigma_x();
    f.d_ops[2] = s * sigma_y();
    f.d_ops[3] = s * sigma_z();
    f.f_ops[0] = s * id;
    f.f_ops[1] = s * (id + sigma_x());
    f.f_ops[2] = s * (id + sigma_y());
    f.f_ops[3] = s * (id + sigma_z());
    return f;
  }();
  return frame;
}

const FrameTerm* FrameDecomposition::find(int alpha) const {
  for (const auto& t : terms)
    if (t.alpha == alpha) return &t;
  return nullptr;
}

FrameDecomposition decompose(const DensityOperator& rho_se, const BipartiteShape& shape) {
  if (shape.dim_system != 2) throw DimensionError("decompose: system must be a qubit");
  shape.check(rho_se.matrix());
  const auto de = static_cast<Eigen::Index>(shape.dim_env);
  const ComplexMatrix& m = rho_se.matrix();
  FrameDecomposition dec;
  dec.shape = shape;
  for (int a = 0; a < 4; ++a) {
    const ComplexMatrix& f = pauli_frame().f_ops[static_cast<std::size_t>(a)];
    // Tr_S[(F x 1) m] = sum_ij F_ij <j| m |i>
    ComplexMatrix w = ComplexMatrix::Zero(de, de);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j)
        if (f(i, j) != 0.0) w += f(i, j) * m.block(j * de, i * de, de, de);
    const double weight = w.trace().real();
    if (weight <= kFrameWeightCutoff) continue;
    ComplexMatrix rho = w / weight;
    rho = 0.5 * (rho + rho.adjoint());
    try {
      dec.terms.push_back(FrameTerm{a, weight, pauli_frame().d_ops[static_cast<std::size_t>(a)],
                                    DensityOperator(rho, 1e-9)});
    } catch (const ValidationError& e) {
      throw NumericalError("decompose", "environmental state " + std::to_string(a) +
                                            " invalid: " + e.what());
    }
  }
  if (dec.terms.empty()) throw NumericalError("decompose", "no term with positive weight");
  return dec;
}

FrameDecomposition make_decomposition(std::vector<FrameTerm> terms, const BipartiteShape& shape) {
  FrameDecomposition dec;
  dec.shape = shape;
  for (auto& t : terms) {
    if (t.weight <= kFrameWeightCutoff) continue;
    if (t.system_op.rows() != 2 || t.system_op.cols() != 2)
      throw DimensionError("frame term: system operator must be 2x2");
    if (!is_hermitian(t.system_op, 1e-10))
      throw ValidationError("frame term: system operator not hermitian");
    if (t.env_state.dim() != shape.dim_env)
      throw DimensionError("frame term: environment dimension mismatch");
    dec.terms.push_back(std::move(t));
  }
  if (dec.terms.empty()) throw ValidationError("frame decomposition has no terms");
  return dec;
}

DensityOperator reconstruct(const FrameDecomposition& dec) {
  if (dec.terms.empty()) throw ValidationError("reconstruct: empty decomposition");
  const auto n = static_cast<Eigen::Index>(dec.shape.total());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& t : dec.terms) {
    if (t.env_state.dim() != dec.shape.dim_env)
      throw DimensionError("reconstruct: term shape mismatch");
    out += t.weight * tensor(t.system_op, t.env_state.matrix());
  }
  return DensityOperator(out, 1e-9);
}

DensityOperator reduced_initial(const FrameDecomposition& dec) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (const auto& t : dec.terms) out += t.weight * t.system_op;
  return DensityOperator(out, 1e-9);
}

DensityOperator evolve_decomposition(const FrameDecomposition& dec,
                                     const std::vector<ComplexMatrix>& evolved,
                                     double psd_floor) {
  if (evolved.size() != dec.terms.size())
    throw DimensionError("evolve_decomposition: one evolved operator per term required");
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (std::size_t k = 0; k < evolved.size(); ++k) out += dec.terms[k].weight * evolved[k];
  const double drift = std::abs(out.trace() - 1.0);
  if (drift > 1e-8)
    throw NumericalError("evolve_decomposition", "trace drift " + std::to_string(drift));
  return DensityOperator(out, 1e-8, psd_floor);
}

}  // namespace oqs
