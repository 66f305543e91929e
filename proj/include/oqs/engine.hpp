#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "oqs/frame.hpp"
#include "oqs/qmat.hpp"
#include "oqs/trajectory.hpp"

namespace oqs {

/// One term A_j (x) B_j of the interaction Hamiltonian. Individual terms may be
/// non-hermitian (e.g. s+ (x) b) as long as the sum is hermitian.
struct Coupling {
  ComplexMatrix a;  // 2x2
  ComplexMatrix b;  // d_E x d_E
};

/// H = H_S (x) 1 + 1 (x) H_E + g sum_j A_j (x) B_j
struct InteractionSpec {
  ComplexMatrix h_system;
  ComplexMatrix h_env;
  std::vector<Coupling> couplings;
  double g = 1.0;

  std::size_t dim_env() const { return static_cast<std::size_t>(h_env.rows()); }
  BipartiteShape shape() const { return {2, dim_env()}; }
  void validate() const;
  ComplexMatrix interaction_hamiltonian() const;
  ComplexMatrix total_hamiltonian() const;
};

/// Free propagators, diagonalized once per spec. Environment operators are kept
/// in the eigenbasis of H_E, where B(t)_kl = e^{i (E_k - E_l) t} B_kl.
class InteractionPicture {
 public:
  explicit InteractionPicture(const InteractionSpec& spec);

  const InteractionSpec& spec() const { return spec_; }
  std::size_t n_couplings() const { return spec_.couplings.size(); }
  std::size_t dim_env() const { return spec_.dim_env(); }

  std::vector<ComplexMatrix> system_ops(double t) const;
  std::vector<ComplexMatrix> env_ops(double t) const;

  /// V^dagger X V
  ComplexMatrix to_eigenbasis(const ComplexMatrix& env_op) const;
  const ComplexMatrix& env_op_eigen(std::size_t j) const { return b_eig_[j]; }
  /// e^{i E_k t}
  Eigen::VectorXcd phases(double t) const;
  /// B_j(t) in the eigenbasis of H_E
  ComplexMatrix env_op_eigen(std::size_t j, double t) const;
  /// Tr[W B_j(t)] for W given in the eigenbasis, O(d^2)
  cplx trace_with(const ComplexMatrix& w, std::size_t j, const Eigen::VectorXcd& u) const;

  /// True when every B_j commutes with H_E (time-independent correlations).
  bool env_static() const { return env_static_; }
  /// Largest relevant angular frequency: Bohr spreads of H_S, H_E and the coupling norm.
  double max_frequency() const;

 private:
  InteractionSpec spec_;
  HermitianSpectrum hs_;
  HermitianSpectrum he_;
  std::vector<ComplexMatrix> b_eig_;
  bool env_static_ = false;
};

/// A_j(t), B_j(t)
std::pair<std::vector<ComplexMatrix>, std::vector<ComplexMatrix>> interaction_picture(
    const InteractionSpec& spec, double t);

/// Cov_{j1 j2}(t1, t2) = <B_j1(t1) B_j2(t2)> - <B_j1(t1)><B_j2(t2)>
ComplexMatrix covariance(const InteractionPicture& ip, const DensityOperator& rho, double t1,
                         double t2);

/// F(j1, j2) = <B_j1(t1) B_j2(t2)>_a - <B_j1(t1)>_ref <B_j2(t2)>_a
/// G(j1, j2) = <B_j2(t2) B_j1(t1)>_a - <B_j1(t1)>_ref <B_j2(t2)>_a
struct GeneralizedCorrelations {
  ComplexMatrix f;
  ComplexMatrix g;
};
GeneralizedCorrelations generalized_correlations(const InteractionPicture& ip,
                                                 const ComplexMatrix& rho_alpha,
                                                 const ComplexMatrix& rho_ref, double t1,
                                                 double t2);

/// Linear maps on 2x2 matrices acting on the row-major vectorization.
using Superop = Eigen::Matrix4cd;
Eigen::Vector4cd vec(const ComplexMatrix& d);
ComplexMatrix unvec(const Eigen::Vector4cd& v);
/// D -> L D R
Superop sandwich(const ComplexMatrix& l, const ComplexMatrix& r);

/// Second-order generator J^{(R, ref)}(t) of the product projection
/// P = Tr_E[.] (x) ref, applied to D (x) R. Linear in R.
/// Evaluated on the uniform node grid t_k = k h, k = 0..n_nodes-1; the
/// tau-integrals use composite Simpson weights over the same nodes.
class ProductGenerator {
 public:
  ProductGenerator(const InteractionPicture& ip, double h, std::size_t n_nodes);

  /// One superoperator per node.
  std::vector<Superop> build(const ComplexMatrix& r, const ComplexMatrix& ref) const;

 private:
  const InteractionPicture& ip_;
  double h_;
  std::size_t n_;
  std::vector<std::vector<ComplexMatrix>> a_;   // [node][j]
  std::vector<std::vector<ComplexMatrix>> ia_;  // [node][j], static baths only
  std::vector<Eigen::VectorXcd> u_;            // [node]
};

struct ProjectorFamily {
  std::vector<ComplexMatrix> x;
  std::vector<ComplexMatrix> y;

  std::size_t size() const { return x.size(); }
  /// Tr[X_i Y_j] = delta_ij, sum_i Tr[X_i] Y_i = 1, sum_i Y_i^T (x) X_i >= -1e-9.
  void validate(double tol = 1e-10) const;
};

/// Y_i = P_i, X_i = P_i ref P_i / Tr[P_i ref]. Blocks with Tr[P_i ref] <= 1e-12 are
/// merged into the Y of the first retained block so that completeness still holds.
ProjectorFamily build_block_projector(const std::vector<ComplexMatrix>& projections,
                                      const ComplexMatrix& ref);
ProjectorFamily trivial_family(const ComplexMatrix& ref);

/// Second-order maps J_i(t)[D (x) R] of a correlated projection.
class CorrelatedGenerator {
 public:
  CorrelatedGenerator(const InteractionPicture& ip, const ProjectorFamily& family, double h,
                      std::size_t n_nodes);

  /// [node][i] superoperators for the environment operator R
  std::vector<std::vector<Superop>> build(const ComplexMatrix& r) const;

 private:
  const InteractionPicture& ip_;
  const ProjectorFamily& fam_;
  double h_;
  std::size_t n_;
  std::vector<std::vector<ComplexMatrix>> a_;
  std::vector<std::vector<ComplexMatrix>> ia_;
  std::vector<Eigen::VectorXcd> u_;
};

using OdeState = std::vector<ComplexMatrix>;
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

/// Classical RK4 on a uniform grid. When `trace_fn` is given, a drift of more
/// than 1e-6 from its initial value aborts.
std::vector<OdeState> integrate(const OdeRhs& rhs, const OdeState& y0,
                                const std::vector<double>& times,
                                const std::function<cplx(const OdeState&)>& trace_fn = {});

/// Single-time right-hand sides (tau-integrals on n_tau uniform intervals).
ComplexMatrix tcl2_rhs(const ComplexMatrix& rho_s, const FrameDecomposition& frame,
                       const ComplexMatrix& ref_state, const InteractionSpec& spec, double t,
                       std::size_t n_tau = 200);
ComplexMatrix apo2_rhs(const ComplexMatrix& d_alpha, const ComplexMatrix& rho_alpha,
                       const InteractionSpec& spec, double t, std::size_t n_tau = 200);
std::vector<ComplexMatrix> corrproj2_rhs(const std::vector<ComplexMatrix>& etas,
                                         const ProjectorFamily& family,
                                         const FrameDecomposition& frame,
                                         const InteractionSpec& spec, double t,
                                         std::size_t n_tau = 200);
/// The Delta-tilde inhomogeneity alone, sum_a w_a J_i[D_a (x) (rho_a - sum_j X_j Tr[Y_j rho_a])].
std::vector<ComplexMatrix> corrproj2_inhomogeneity(const ProjectorFamily& family,
                                                   const FrameDecomposition& frame,
                                                   const InteractionSpec& spec, double t,
                                                   std::size_t n_tau = 200);

/// Default reference state sum_a w_a Tr[D_a] rho_a (= Tr_S rho_SE).
ComplexMatrix average_env_state(const FrameDecomposition& frame);

/// Trajectories of the interaction-picture reduced state on a uniform grid starting at 0.
std::vector<ComplexMatrix> solve_tcl2(const InteractionSpec& spec, const FrameDecomposition& frame,
                                      const ComplexMatrix& ref_state,
                                      const std::vector<double>& times);
std::vector<ComplexMatrix> solve_apo2(const InteractionSpec& spec, const FrameDecomposition& frame,
                                      const std::vector<double>& times);
/// Per-term D_a(t), same order as frame.terms.
std::vector<OdeState> solve_apo2_terms(const InteractionSpec& spec,
                                       const FrameDecomposition& frame,
                                       const std::vector<double>& times);
std::vector<ComplexMatrix> solve_corrproj2(const InteractionSpec& spec,
                                           const FrameDecomposition& frame,
                                           const ProjectorFamily& family,
                                           const std::vector<double>& times);
std::vector<ComplexMatrix> exact_oracle(const ComplexMatrix& rho_se, const InteractionSpec& spec,
                                        const std::vector<double>& times);

TrajectoryTable to_table(const std::string& method, const std::vector<double>& times,
                         const std::vector<ComplexMatrix>& states);

/// Single-mode Jaynes-Cummings: H_S = vs s3 / 2, H_E = w b^dag b (n <= n_max),
/// couplings (s+, b) and (s-, b^dag) with strength g.
InteractionSpec jaynes_cummings(double varsigma, double omega, double g, std::size_t n_max);
/// C0 |0>|0> + C1 |1>|n> on the truncated mode.
ComplexMatrix jaynes_cummings_state(double c0, double c1, std::size_t n, std::size_t n_max);

}  // namespace oqs
