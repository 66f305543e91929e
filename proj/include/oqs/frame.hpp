#pragma once

#include <array>
#include <vector>

#include "oqs/qmat.hpp"

namespace oqs {

/// Weights below this are treated as absent.
inline constexpr double kFrameWeightCutoff = 1e-12;

struct PauliFrame {
  std::array<ComplexMatrix, 4> d_ops;
  std::array<ComplexMatrix, 4> f_ops;
};

/// D0 = (1 - s1 - s2 - s3)/sqrt2, Dk = sk/sqrt2; F0 = 1/sqrt2, Fk = (1 + sk)/sqrt2.
const PauliFrame& pauli_frame();

struct FrameTerm {
  int alpha = 0;  // index into the Pauli frame
  double weight = 0.0;
  ComplexMatrix system_op;
  DensityOperator env_state;
};

struct FrameDecomposition {
  std::vector<FrameTerm> terms;
  BipartiteShape shape;

  const FrameTerm* find(int alpha) const;
};

/// omega_a rho_a = Tr_S[(F_a x 1) rho_se]; zero-weight terms dropped.
FrameDecomposition decompose(const DensityOperator& rho_se, const BipartiteShape& shape);

/// Builds a decomposition from explicit terms, checking shapes and hermiticity.
FrameDecomposition make_decomposition(std::vector<FrameTerm> terms, const BipartiteShape& shape);

DensityOperator reconstruct(const FrameDecomposition& dec);

/// sum_a omega_a D_a
DensityOperator reduced_initial(const FrameDecomposition& dec);

/// sum_a omega_a D_a(t), one evolved operator per term (same order as dec.terms).
DensityOperator evolve_decomposition(const FrameDecomposition& dec,
                                     const std::vector<ComplexMatrix>& evolved,
                                     double psd_floor = 1e-3);

}  // namespace oqs
