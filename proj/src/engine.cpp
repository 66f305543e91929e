#include "oqs/engine.hpp"

#include <algorithm>
#include <cmath>

#include "oqs/errors.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

namespace {

double spread(const HermitianSpectrum& s) {
  if (s.dim() == 0) return 0.0;
  return s.values().maxCoeff() - s.values().minCoeff();
}

double op_norm(const ComplexMatrix& m) {
  const ComplexMatrix g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// u^T X conj(u)
cplx bilinear(const ComplexMatrix& x, const Eigen::VectorXcd& u) {
  return u.transpose() * x * u.conjugate();
}

// Uniform grid check shared by the solvers; returns dt.
double check_grid(const std::vector<double>& times, const InteractionPicture& ip) {
  if (times.size() < 2) throw ConfigError("engine: time grid needs at least two points");
  if (times.front() != 0.0) throw ConfigError("engine: time grid must start at 0");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ConfigError("engine: time grid must be increasing");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, times[k]))
      throw ConfigError("engine: time grid must be uniform");
  if (dt * ip.max_frequency() > 0.1 * (1.0 + 1e-9))
    throw ConfigError("engine: dt * max frequency must not exceed 0.1 (dt = " +
                      std::to_string(dt) + ", max frequency = " +
                      std::to_string(ip.max_frequency()) + ")");
  return dt;
}

// A_j(tau_l) for l < n and the cumulative integrals sum_l w^(k)_l A_j(tau_l).
struct SystemTimeline {
  std::vector<std::vector<ComplexMatrix>> a;   // [l][j]
  std::vector<std::vector<ComplexMatrix>> ia;  // [k][j]
};

SystemTimeline system_timeline(const InteractionPicture& ip, double h, std::size_t n) {
  SystemTimeline s;
  const std::size_t nj = ip.n_couplings();
  s.a.reserve(n);
  for (std::size_t l = 0; l < n; ++l) s.a.push_back(ip.system_ops(h * static_cast<double>(l)));
  s.ia.assign(n, std::vector<ComplexMatrix>(nj, ComplexMatrix::Zero(2, 2)));
  for (std::size_t k = 0; k < n; ++k) {
    const auto w = uniform_simpson_weights(k, h);
    for (std::size_t l = 0; l <= k; ++l)
      for (std::size_t j = 0; j < nj; ++j) s.ia[k][j] += w[l] * s.a[l][j];
  }
  return s;
}

void check_frame_shape(const FrameDecomposition& frame, const InteractionSpec& spec) {
  if (frame.shape.dim_system != 2 || frame.shape.dim_env != spec.dim_env())
    throw DimensionError("engine: frame shape does not match the interaction spec");
}

}  // namespace

// ---------------------------------------------------------------------------

void InteractionSpec::validate() const {
  if (h_system.rows() != 2 || h_system.cols() != 2)
    throw DimensionError("InteractionSpec: H_S must be 2x2");
  if (h_env.rows() < 1 || h_env.rows() != h_env.cols())
    throw DimensionError("InteractionSpec: H_E must be square");
  if (!is_hermitian(h_system, 1e-10) || !is_hermitian(h_env, 1e-10))
    throw ValidationError("InteractionSpec: H_S and H_E must be hermitian");
  if (couplings.empty()) throw ValidationError("InteractionSpec: no coupling terms");
  if (!std::isfinite(g)) throw ValidationError("InteractionSpec: g must be finite");
  const auto d = h_env.rows();
  for (const auto& c : couplings) {
    if (c.a.rows() != 2 || c.a.cols() != 2)
      throw DimensionError("InteractionSpec: coupling system operator must be 2x2");
    if (c.b.rows() != d || c.b.cols() != d)
      throw DimensionError("InteractionSpec: coupling bath operator has wrong dimension");
    if (!c.a.allFinite() || !c.b.allFinite())
      throw ValidationError("InteractionSpec: non-finite coupling entries");
  }
  // Hermiticity of sum_j A_j (x) B_j without forming the product space: with the
  // system operators expanded in the Pauli basis this is equivalent to each bath
  // coefficient being hermitian.
  const std::array<ComplexMatrix, 4> basis{identity(2), sigma_x(), sigma_y(), sigma_z()};
  for (const auto& p : basis) {
    ComplexMatrix coef = ComplexMatrix::Zero(d, d);
    for (const auto& c : couplings) coef += 0.5 * (p * c.a).trace() * c.b;
    if (!is_hermitian(coef, 1e-10))
      throw ValidationError("InteractionSpec: interaction Hamiltonian is not hermitian");
  }
}

ComplexMatrix InteractionSpec::interaction_hamiltonian() const {
  const auto d = static_cast<Eigen::Index>(dim_env());
  ComplexMatrix h = ComplexMatrix::Zero(2 * d, 2 * d);
  for (const auto& c : couplings) h += g * tensor(c.a, c.b);
  return h;
}

ComplexMatrix InteractionSpec::total_hamiltonian() const {
  return tensor(h_system, identity(dim_env())) + tensor(identity(2), h_env) +
         interaction_hamiltonian();
}

// ---------------------------------------------------------------------------

InteractionPicture::InteractionPicture(const InteractionSpec& spec) : spec_(spec) {
  spec_.validate();
  hs_ = HermitianSpectrum(spec_.h_system);
  he_ = HermitianSpectrum(spec_.h_env);
  env_static_ = true;
  for (const auto& c : spec_.couplings) {
    b_eig_.push_back(to_eigenbasis(c.b));
    if (max_abs(commutator(c.b, spec_.h_env)) > 1e-12 * std::max(1.0, max_abs(c.b)))
      env_static_ = false;
  }
}

std::vector<ComplexMatrix> InteractionPicture::system_ops(double t) const {
  const ComplexMatrix u = hs_.exp(cplx(0.0, t));
  std::vector<ComplexMatrix> out;
  for (const auto& c : spec_.couplings) out.push_back(u * c.a * u.adjoint());
  return out;
}

std::vector<ComplexMatrix> InteractionPicture::env_ops(double t) const {
  const ComplexMatrix& v = he_.vectors();
  std::vector<ComplexMatrix> out;
  for (std::size_t j = 0; j < b_eig_.size(); ++j)
    out.push_back(v * env_op_eigen(j, t) * v.adjoint());
  return out;
}

ComplexMatrix InteractionPicture::to_eigenbasis(const ComplexMatrix& env_op) const {
  return he_.vectors().adjoint() * env_op * he_.vectors();
}

Eigen::VectorXcd InteractionPicture::phases(double t) const {
  Eigen::VectorXcd u(he_.values().size());
  for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = std::exp(cplx(0.0, he_.values()(k) * t));
  return u;
}

ComplexMatrix InteractionPicture::env_op_eigen(std::size_t j, double t) const {
  const Eigen::VectorXcd u = phases(t);
  return u.asDiagonal() * b_eig_[j] * u.conjugate().asDiagonal();
}

cplx InteractionPicture::trace_with(const ComplexMatrix& w, std::size_t j,
                                    const Eigen::VectorXcd& u) const {
  return bilinear(w.transpose().cwiseProduct(b_eig_[j]), u);
}

double InteractionPicture::max_frequency() const {
  double coupling = 0.0;
  for (const auto& c : spec_.couplings) coupling += op_norm(c.a) * op_norm(c.b);
  return std::max({spread(hs_), spread(he_), 2.0 * std::abs(spec_.g) * coupling});
}

std::pair<std::vector<ComplexMatrix>, std::vector<ComplexMatrix>> interaction_picture(
    const InteractionSpec& spec, double t) {
  const InteractionPicture ip(spec);
  return {ip.system_ops(t), ip.env_ops(t)};
}

ComplexMatrix covariance(const InteractionPicture& ip, const DensityOperator& rho, double t1,
                         double t2) {
  if (rho.dim() != ip.dim_env()) throw DimensionError("covariance: state dimension mismatch");
  const auto g = generalized_correlations(ip, rho.matrix(), rho.matrix(), t1, t2);
  return g.f;
}

GeneralizedCorrelations generalized_correlations(const InteractionPicture& ip,
                                                 const ComplexMatrix& rho_alpha,
                                                 const ComplexMatrix& rho_ref, double t1,
                                                 double t2) {
  const auto d = static_cast<Eigen::Index>(ip.dim_env());
  if (rho_alpha.rows() != d || rho_ref.rows() != d)
    throw DimensionError("generalized_correlations: state dimension mismatch");
  const std::size_t nj = ip.n_couplings();
  const ComplexMatrix ra = ip.to_eigenbasis(rho_alpha);
  const ComplexMatrix rr = ip.to_eigenbasis(rho_ref);
  std::vector<ComplexMatrix> b1, b2;
  for (std::size_t j = 0; j < nj; ++j) {
    b1.push_back(ip.env_op_eigen(j, t1));
    b2.push_back(ip.env_op_eigen(j, t2));
  }
  GeneralizedCorrelations out{ComplexMatrix(nj, nj), ComplexMatrix(nj, nj)};
  for (std::size_t i = 0; i < nj; ++i)
    for (std::size_t j = 0; j < nj; ++j) {
      const cplx mean = (rr * b1[i]).trace() * (ra * b2[j]).trace();
      out.f(i, j) = (ra * b1[i] * b2[j]).trace() - mean;
      out.g(i, j) = (ra * b2[j] * b1[i]).trace() - mean;
    }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::Vector4cd vec(const ComplexMatrix& d) {
  if (d.rows() != 2 || d.cols() != 2) throw DimensionError("vec: expected 2x2");
  return Eigen::Vector4cd(d(0, 0), d(0, 1), d(1, 0), d(1, 1));
}

ComplexMatrix unvec(const Eigen::Vector4cd& v) {
  ComplexMatrix m(2, 2);
  m << v(0), v(1), v(2), v(3);
  return m;
}

Superop sandwich(const ComplexMatrix& l, const ComplexMatrix& r) {
  return tensor(l, r.transpose());
}

// ---------------------------------------------------------------------------

ProductGenerator::ProductGenerator(const InteractionPicture& ip, double h, std::size_t n_nodes)
    : ip_(ip), h_(h), n_(n_nodes) {
  if (n_ == 0 || !(h_ > 0.0)) throw ConfigError("ProductGenerator: empty node grid");
  const auto tl = system_timeline(ip_, h_, n_);
  a_ = tl.a;
  if (ip_.env_static()) ia_ = tl.ia;
  u_.reserve(n_);
  for (std::size_t l = 0; l < n_; ++l) u_.push_back(ip_.phases(h_ * static_cast<double>(l)));
}

std::vector<Superop> ProductGenerator::build(const ComplexMatrix& r,
                                             const ComplexMatrix& ref) const {
  const std::size_t nj = ip_.n_couplings();
  const double g = ip_.spec().g;
  const ComplexMatrix rt = ip_.to_eigenbasis(r);
  const ComplexMatrix reft = ip_.to_eigenbasis(ref);
  const ComplexMatrix id = identity(2);

  // <B_j(t_l)>_R and <B_j(t_l)>_ref
  std::vector<std::vector<cplx>> er(nj, std::vector<cplx>(n_)), eref(nj, std::vector<cplx>(n_));
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t l = 0; l < n_; ++l) {
      er[j][l] = ip_.trace_with(rt, j, u_[l]);
      eref[j][l] = ip_.trace_with(reft, j, u_[l]);
    }

  std::vector<Superop> out(n_, Superop::Zero());
  std::vector<ComplexMatrix> m(nj), nn(nj);

  if (ip_.env_static()) {
    // Correlations do not depend on (t, tau).
    std::vector<std::vector<cplx>> f(nj, std::vector<cplx>(nj)), gg(nj, std::vector<cplx>(nj));
    for (std::size_t j1 = 0; j1 < nj; ++j1) {
      const ComplexMatrix& b1 = ip_.env_op_eigen(j1);
      const ComplexMatrix wf = rt * b1;
      const ComplexMatrix wg = b1 * rt;
      for (std::size_t j2 = 0; j2 < nj; ++j2) {
        const ComplexMatrix& b2 = ip_.env_op_eigen(j2);
        const cplx mean = eref[j1][0] * er[j2][0];
        f[j1][j2] = wf.cwiseProduct(b2.transpose()).sum() - mean;
        gg[j1][j2] = wg.cwiseProduct(b2.transpose()).sum() - mean;
      }
    }
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t j1 = 0; j1 < nj; ++j1) {
        m[j1] = ComplexMatrix::Zero(2, 2);
        nn[j1] = ComplexMatrix::Zero(2, 2);
        for (std::size_t j2 = 0; j2 < nj; ++j2) {
          m[j1] += f[j1][j2] * ia_[k][j2];
          nn[j1] += gg[j1][j2] * ia_[k][j2];
        }
      }
      Superop& s = out[k];
      for (std::size_t j1 = 0; j1 < nj; ++j1) {
        const ComplexMatrix& a1 = a_[k][j1];
        s += -kI * g * er[j1][k] * (sandwich(a1, id) - sandwich(id, a1));
        s += -g * g *
             (sandwich(a1 * m[j1], id) - sandwich(m[j1], a1) - sandwich(a1, nn[j1]) +
              sandwich(id, nn[j1] * a1));
      }
    }
    return out;
  }

  std::vector<cplx> cf(n_), cg(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const auto w = uniform_simpson_weights(k, h_);
    const double t = h_ * static_cast<double>(k);
    for (std::size_t j1 = 0; j1 < nj; ++j1) {
      const ComplexMatrix b1 = ip_.env_op_eigen(j1, t);
      const ComplexMatrix wf = (rt * b1).transpose();
      const ComplexMatrix wg = (b1 * rt).transpose();
      m[j1] = ComplexMatrix::Zero(2, 2);
      nn[j1] = ComplexMatrix::Zero(2, 2);
      for (std::size_t j2 = 0; j2 < nj; ++j2) {
        const ComplexMatrix xf = wf.cwiseProduct(ip_.env_op_eigen(j2));
        const ComplexMatrix xg = wg.cwiseProduct(ip_.env_op_eigen(j2));
        for (std::size_t l = 0; l <= k; ++l) {
          const cplx mean = eref[j1][k] * er[j2][l];
          const cplx f = bilinear(xf, u_[l]) - mean;
          const cplx gv = bilinear(xg, u_[l]) - mean;
          m[j1] += (w[l] * f) * a_[l][j2];
          nn[j1] += (w[l] * gv) * a_[l][j2];
        }
      }
    }
    Superop& s = out[k];
    for (std::size_t j1 = 0; j1 < nj; ++j1) {
      const ComplexMatrix& a1 = a_[k][j1];
      s += -kI * g * er[j1][k] * (sandwich(a1, id) - sandwich(id, a1));
      s += -g * g *
           (sandwich(a1 * m[j1], id) - sandwich(m[j1], a1) - sandwich(a1, nn[j1]) +
            sandwich(id, nn[j1] * a1));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void ProjectorFamily::validate(double tol) const {
  if (x.empty() || x.size() != y.size())
    throw ValidationError("ProjectorFamily: need matching, non-empty X and Y lists");
  const auto d = x.front().rows();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].rows() != d || x[i].cols() != d || y[i].rows() != d || y[i].cols() != d)
      throw DimensionError("ProjectorFamily: inconsistent operator dimensions");
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const cplx v = (x[i] * y[j]).trace();
      if (std::abs(v - (i == j ? 1.0 : 0.0)) > tol)
        throw ValidationError("ProjectorFamily: Tr[X_i Y_j] != delta_ij");
    }
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i].trace() * y[i];
  if (!approx_equal(sum, identity(static_cast<std::size_t>(d)), tol))
    throw ValidationError("ProjectorFamily: sum_i Tr[X_i] Y_i != 1");
  // Positivity of the induced map; the d^2 x d^2 check is skipped for large baths.
  if (d <= 16) {
    ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
    for (std::size_t i = 0; i < x.size(); ++i) c += tensor(y[i].transpose(), x[i]);
    const ComplexMatrix herm = 0.5 * (c + c.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
      throw ValidationError("ProjectorFamily: projection is not positive");
  }
}

ProjectorFamily build_block_projector(const std::vector<ComplexMatrix>& projections,
                                      const ComplexMatrix& ref) {
  if (projections.empty()) throw ValidationError("build_block_projector: no projections");
  const auto d = ref.rows();
  const ComplexMatrix id = identity(static_cast<std::size_t>(d));
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const ComplexMatrix& p = projections[i];
    if (p.rows() != d || p.cols() != d)
      throw DimensionError("build_block_projector: projection dimension mismatch");
    if (!is_hermitian(p, 1e-10) || !approx_equal(p * p, p, 1e-10))
      throw ValidationError("build_block_projector: not an orthogonal projection");
    for (std::size_t j = 0; j < i; ++j)
      if (max_abs(p * projections[j]) > 1e-10)
        throw ValidationError("build_block_projector: projections are not orthogonal");
    sum += p;
  }
  if (!approx_equal(sum, id, 1e-10))
    throw ValidationError("build_block_projector: projections do not sum to identity");

  ProjectorFamily fam;
  ComplexMatrix dropped = ComplexMatrix::Zero(d, d);
  for (const auto& p : projections) {
    const double w = (p * ref).trace().real();
    if (w <= 1e-12) {
      dropped += p;
      continue;
    }
    fam.x.push_back(p * ref * p / w);
    fam.y.push_back(p);
  }
  if (fam.x.empty()) throw ValidationError("build_block_projector: reference has no weight");
  fam.y.front() += dropped;
  fam.validate();
  return fam;
}

ProjectorFamily trivial_family(const ComplexMatrix& ref) {
  ProjectorFamily fam;
  fam.x.push_back(ref);
  fam.y.push_back(identity(static_cast<std::size_t>(ref.rows())));
  fam.validate();
  return fam;
}

// ---------------------------------------------------------------------------

CorrelatedGenerator::CorrelatedGenerator(const InteractionPicture& ip,
                                         const ProjectorFamily& family, double h,
                                         std::size_t n_nodes)
    : ip_(ip), fam_(family), h_(h), n_(n_nodes) {
  if (n_ == 0 || !(h_ > 0.0)) throw ConfigError("CorrelatedGenerator: empty node grid");
  if (static_cast<std::size_t>(fam_.x.front().rows()) != ip_.dim_env())
    throw DimensionError("CorrelatedGenerator: family dimension mismatch");
  const auto tl = system_timeline(ip_, h_, n_);
  a_ = tl.a;
  if (ip_.env_static()) ia_ = tl.ia;
  u_.reserve(n_);
  for (std::size_t l = 0; l < n_; ++l) u_.push_back(ip_.phases(h_ * static_cast<double>(l)));
}

std::vector<std::vector<Superop>> CorrelatedGenerator::build(const ComplexMatrix& r) const {
  const std::size_t nj = ip_.n_couplings();
  const std::size_t nf = fam_.size();
  const double g = ip_.spec().g;
  const ComplexMatrix id = identity(2);
  const ComplexMatrix rt = ip_.to_eigenbasis(r);
  std::vector<ComplexMatrix> xs, ys;
  for (std::size_t i = 0; i < nf; ++i) {
    xs.push_back(ip_.to_eigenbasis(fam_.x[i]));
    ys.push_back(ip_.to_eigenbasis(fam_.y[i]));
  }
  const bool stat = ip_.env_static();
  const std::size_t nl = stat ? 1 : n_;

  // a[i0][j2][l] = <Y_i0 B2(tau_l)>_R, ap = <B2(tau_l) Y_i0>_R
  std::vector<std::vector<std::vector<cplx>>> a(nf), ap(nf);
  for (std::size_t i0 = 0; i0 < nf; ++i0) {
    a[i0].assign(nj, std::vector<cplx>(nl));
    ap[i0].assign(nj, std::vector<cplx>(nl));
    const ComplexMatrix wa = rt * ys[i0];
    const ComplexMatrix wap = ys[i0] * rt;
    for (std::size_t j2 = 0; j2 < nj; ++j2)
      for (std::size_t l = 0; l < nl; ++l) {
        a[i0][j2][l] = ip_.trace_with(wa, j2, u_[l]);
        ap[i0][j2][l] = ip_.trace_with(wap, j2, u_[l]);
      }
  }

  std::vector<std::vector<Superop>> out(n_, std::vector<Superop>(nf, Superop::Zero()));
  // Per-(t) quantities for one node; in the static case computed once.
  struct Coeffs {
    // [i][j1][j2][l]
    std::vector<std::vector<std::vector<std::vector<cplx>>>> h, kk, ll, mm;
    std::vector<std::vector<cplx>> first_l, first_r;  // [i][j1]
  };
  auto coeffs_at = [&](double t) {
    Coeffs c;
    c.h.assign(nf, {});
    c.kk.assign(nf, {});
    c.ll.assign(nf, {});
    c.mm.assign(nf, {});
    c.first_l.assign(nf, std::vector<cplx>(nj));
    c.first_r.assign(nf, std::vector<cplx>(nj));
    std::vector<ComplexMatrix> b1(nj);
    for (std::size_t j = 0; j < nj; ++j) b1[j] = ip_.env_op_eigen(j, t);
    for (std::size_t i = 0; i < nf; ++i) {
      const ComplexMatrix& y = ys[i];
      c.h[i].assign(nj, std::vector<std::vector<cplx>>(nj, std::vector<cplx>(nl)));
      c.kk[i] = c.ll[i] = c.mm[i] = c.h[i];
      for (std::size_t j1 = 0; j1 < nj; ++j1) {
        c.first_l[i][j1] = (rt * y * b1[j1]).trace();
        c.first_r[i][j1] = (rt * b1[j1] * y).trace();
        // <Y B1>_{X_i0}, <B1 Y>_{X_i0}
        std::vector<cplx> bx(nf), bxp(nf);
        for (std::size_t i0 = 0; i0 < nf; ++i0) {
          bx[i0] = (xs[i0] * y * b1[j1]).trace();
          bxp[i0] = (xs[i0] * b1[j1] * y).trace();
        }
        const ComplexMatrix wh = rt * y * b1[j1];
        const ComplexMatrix wk = y * b1[j1] * rt;
        const ComplexMatrix wl = rt * b1[j1] * y;
        const ComplexMatrix wm = b1[j1] * y * rt;
        for (std::size_t j2 = 0; j2 < nj; ++j2)
          for (std::size_t l = 0; l < nl; ++l) {
            cplx sh = 0.0, sk = 0.0, sl = 0.0, sm = 0.0;
            for (std::size_t i0 = 0; i0 < nf; ++i0) {
              sh += a[i0][j2][l] * bx[i0];
              sk += ap[i0][j2][l] * bx[i0];
              sl += a[i0][j2][l] * bxp[i0];
              sm += ap[i0][j2][l] * bxp[i0];
            }
            c.h[i][j1][j2][l] = ip_.trace_with(wh, j2, u_[l]) - sh;
            c.kk[i][j1][j2][l] = ip_.trace_with(wk, j2, u_[l]) - sk;
            c.ll[i][j1][j2][l] = ip_.trace_with(wl, j2, u_[l]) - sl;
            c.mm[i][j1][j2][l] = ip_.trace_with(wm, j2, u_[l]) - sm;
          }
      }
    }
    return c;
  };

  Coeffs fixed;
  if (stat) fixed = coeffs_at(0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    const double t = h_ * static_cast<double>(k);
    const Coeffs c = stat ? Coeffs{} : coeffs_at(t);
    const Coeffs& cc = stat ? fixed : c;
    std::vector<double> w;
    if (!stat) w = uniform_simpson_weights(k, h_);
    for (std::size_t i = 0; i < nf; ++i) {
      Superop& s = out[k][i];
      for (std::size_t j1 = 0; j1 < nj; ++j1) {
        const ComplexMatrix& a1 = a_[k][j1];
        s += -kI * g * (cc.first_l[i][j1] * sandwich(a1, id) - cc.first_r[i][j1] * sandwich(id, a1));
        ComplexMatrix ph = ComplexMatrix::Zero(2, 2), pk = ph, pl = ph, pm = ph;
        for (std::size_t j2 = 0; j2 < nj; ++j2) {
          if (stat) {
            ph += cc.h[i][j1][j2][0] * ia_[k][j2];
            pk += cc.kk[i][j1][j2][0] * ia_[k][j2];
            pl += cc.ll[i][j1][j2][0] * ia_[k][j2];
            pm += cc.mm[i][j1][j2][0] * ia_[k][j2];
          } else {
            for (std::size_t l = 0; l <= k; ++l) {
              const ComplexMatrix& a2 = a_[l][j2];
              ph += (w[l] * cc.h[i][j1][j2][l]) * a2;
              pk += (w[l] * cc.kk[i][j1][j2][l]) * a2;
              pl += (w[l] * cc.ll[i][j1][j2][l]) * a2;
              pm += (w[l] * cc.mm[i][j1][j2][l]) * a2;
            }
          }
        }
        s += -g * g *
             (sandwich(a1 * ph, id) - sandwich(a1, pk) - sandwich(pl, a1) +
              sandwich(id, pm * a1));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<OdeState> integrate(const OdeRhs& rhs, const OdeState& y0,
                                const std::vector<double>& times,
                                const std::function<cplx(const OdeState&)>& trace_fn) {
  if (times.empty()) throw ConfigError("integrate: empty time grid");
  auto axpy = [](const OdeState& y, double c, const OdeState& k) {
    OdeState out = y;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * k[i];
    return out;
  };
  std::vector<OdeState> out;
  out.reserve(times.size());
  out.push_back(y0);
  const cplx tr0 = trace_fn ? trace_fn(y0) : cplx(0.0);
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double t = times[n];
    const double h = times[n + 1] - t;
    const OdeState& y = out.back();
    const OdeState k1 = rhs(t, y);
    const OdeState k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const OdeState k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const OdeState k4 = rhs(t + h, axpy(y, h, k3));
    OdeState next = y;
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (const auto& m : next)
      if (!m.allFinite())
        throw NumericalError("integrate", "non-finite state at t = " + std::to_string(t + h));
    if (trace_fn && std::abs(trace_fn(next) - tr0) > 1e-6)
      throw NumericalError("integrate",
                           "trace drift above 1e-6 at t = " + std::to_string(t + h));
    out.push_back(std::move(next));
  }
  return out;
}

// ---------------------------------------------------------------------------

ComplexMatrix average_env_state(const FrameDecomposition& frame) {
  if (frame.terms.empty()) throw ValidationError("average_env_state: empty frame");
  const auto d = frame.terms.front().env_state.matrix().rows();
  ComplexMatrix r = ComplexMatrix::Zero(d, d);
  for (const auto& t : frame.terms)
    r += t.weight * t.system_op.trace() * t.env_state.matrix();
  return r;
}

namespace {

// Maps a solver time onto the half-step node grid.
struct NodeIndex {
  double h;
  std::size_t n;
  std::size_t operator()(double t) const {
    const double x = t / h;
    const auto k = static_cast<long long>(std::llround(x));
    if (k < 0 || static_cast<std::size_t>(k) >= n || std::abs(x - static_cast<double>(k)) > 1e-6)
      throw NumericalError("integrate", "time off the generator grid");
    return static_cast<std::size_t>(k);
  }
};

cplx trace_of_first(const OdeState& y) { return y.front().trace(); }

}  // namespace

std::vector<ComplexMatrix> solve_tcl2(const InteractionSpec& spec, const FrameDecomposition& frame,
                                      const ComplexMatrix& ref_state,
                                      const std::vector<double>& times) {
  const InteractionPicture ip(spec);
  check_frame_shape(frame, spec);
  const double dt = check_grid(times, ip);
  const std::size_t n = 2 * (times.size() - 1) + 1;
  const ProductGenerator gen(ip, 0.5 * dt, n);
  const auto s_ref = gen.build(ref_state, ref_state);
  std::vector<Eigen::Vector4cd> inh(n, Eigen::Vector4cd::Zero());
  ComplexMatrix rho0 = ComplexMatrix::Zero(2, 2);
  for (const auto& term : frame.terms) {
    rho0 += term.weight * term.system_op;
    const auto s_a = gen.build(term.env_state.matrix(), ref_state);
    const Eigen::Vector4cd v = term.weight * vec(term.system_op);
    for (std::size_t k = 0; k < n; ++k) inh[k] += (s_a[k] - s_ref[k]) * v;
  }
  const NodeIndex idx{0.5 * dt, n};
  OdeRhs rhs = [&](double t, const OdeState& y) {
    const std::size_t k = idx(t);
    return OdeState{unvec(s_ref[k] * vec(y.front()) + inh[k])};
  };
  const auto traj = integrate(rhs, OdeState{rho0}, times, trace_of_first);
  std::vector<ComplexMatrix> out;
  for (const auto& y : traj) out.push_back(y.front());
  return out;
}

std::vector<OdeState> solve_apo2_terms(const InteractionSpec& spec,
                                       const FrameDecomposition& frame,
                                       const std::vector<double>& times) {
  const InteractionPicture ip(spec);
  check_frame_shape(frame, spec);
  const double dt = check_grid(times, ip);
  const std::size_t n = 2 * (times.size() - 1) + 1;
  const ProductGenerator gen(ip, 0.5 * dt, n);
  std::vector<std::vector<Superop>> gens;
  OdeState y0;
  std::vector<double> weights;
  for (const auto& term : frame.terms) {
    gens.push_back(gen.build(term.env_state.matrix(), term.env_state.matrix()));
    y0.push_back(term.system_op);
    weights.push_back(term.weight);
  }
  const NodeIndex idx{0.5 * dt, n};
  OdeRhs rhs = [&](double t, const OdeState& y) {
    const std::size_t k = idx(t);
    OdeState d(y.size());
    for (std::size_t a = 0; a < y.size(); ++a) d[a] = unvec(gens[a][k] * vec(y[a]));
    return d;
  };
  auto trace_fn = [&](const OdeState& y) {
    cplx s = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) s += weights[a] * y[a].trace();
    return s;
  };
  return integrate(rhs, y0, times, trace_fn);
}

std::vector<ComplexMatrix> solve_apo2(const InteractionSpec& spec, const FrameDecomposition& frame,
                                      const std::vector<double>& times) {
  const auto traj = solve_apo2_terms(spec, frame, times);
  std::vector<ComplexMatrix> out;
  out.reserve(traj.size());
  for (const auto& y : traj) {
    ComplexMatrix r = ComplexMatrix::Zero(2, 2);
    for (std::size_t a = 0; a < y.size(); ++a) r += frame.terms[a].weight * y[a];
    out.push_back(r);
  }
  return out;
}

std::vector<ComplexMatrix> solve_corrproj2(const InteractionSpec& spec,
                                           const FrameDecomposition& frame,
                                           const ProjectorFamily& family,
                                           const std::vector<double>& times) {
  family.validate();
  const InteractionPicture ip(spec);
  check_frame_shape(frame, spec);
  const double dt = check_grid(times, ip);
  const std::size_t n = 2 * (times.size() - 1) + 1;
  const std::size_t nf = family.size();
  const CorrelatedGenerator gen(ip, family, 0.5 * dt, n);

  // hom[j][k][i] = J_i[. (x) X_j] at node k
  std::vector<std::vector<std::vector<Superop>>> hom;
  for (std::size_t j = 0; j < nf; ++j) hom.push_back(gen.build(family.x[j]));
  std::vector<std::vector<Eigen::Vector4cd>> inh(n, std::vector<Eigen::Vector4cd>(
                                                        nf, Eigen::Vector4cd::Zero()));
  OdeState eta0(nf, ComplexMatrix::Zero(2, 2));
  for (const auto& term : frame.terms) {
    const ComplexMatrix& rho = term.env_state.matrix();
    ComplexMatrix delta = rho;
    for (std::size_t j = 0; j < nf; ++j) {
      const cplx c = (family.y[j] * rho).trace();
      delta -= c * family.x[j];
      eta0[j] += term.weight * c * term.system_op;
    }
    const auto s = gen.build(delta);
    const Eigen::Vector4cd v = term.weight * vec(term.system_op);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < nf; ++i) inh[k][i] += s[k][i] * v;
  }
  std::vector<cplx> tx(nf);
  for (std::size_t i = 0; i < nf; ++i) tx[i] = family.x[i].trace();

  const NodeIndex idx{0.5 * dt, n};
  OdeRhs rhs = [&](double t, const OdeState& y) {
    const std::size_t k = idx(t);
    OdeState d(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      Eigen::Vector4cd v = inh[k][i];
      for (std::size_t j = 0; j < nf; ++j) v += hom[j][k][i] * vec(y[j]);
      d[i] = unvec(v);
    }
    return d;
  };
  auto trace_fn = [&](const OdeState& y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < nf; ++i) s += tx[i] * y[i].trace();
    return s;
  };
  const auto traj = integrate(rhs, eta0, times, trace_fn);
  std::vector<ComplexMatrix> out;
  for (const auto& y : traj) {
    ComplexMatrix r = ComplexMatrix::Zero(2, 2);
    for (std::size_t i = 0; i < nf; ++i) r += tx[i] * y[i];
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Generator at the last node of a uniform grid on [0, t].
template <typename Gen>
Gen make_single(const InteractionPicture& ip, double t, std::size_t n_tau) {
  if (n_tau == 0) throw ConfigError("rhs: n_tau must be positive");
  if (t == 0.0) return Gen(ip, 1.0, 1);
  return Gen(ip, t / static_cast<double>(n_tau), n_tau + 1);
}

}  // namespace

ComplexMatrix tcl2_rhs(const ComplexMatrix& rho_s, const FrameDecomposition& frame,
                       const ComplexMatrix& ref_state, const InteractionSpec& spec, double t,
                       std::size_t n_tau) {
  if (t < 0.0) throw ConfigError("tcl2_rhs: t must be non-negative");
  const InteractionPicture ip(spec);
  check_frame_shape(frame, spec);
  const auto gen = make_single<ProductGenerator>(ip, t, n_tau);
  const auto s_ref = gen.build(ref_state, ref_state).back();
  Eigen::Vector4cd v = s_ref * vec(rho_s);
  for (const auto& term : frame.terms) {
    const auto s_a = gen.build(term.env_state.matrix(), ref_state).back();
    v += term.weight * (s_a - s_ref) * vec(term.system_op);
  }
  return unvec(v);
}

ComplexMatrix apo2_rhs(const ComplexMatrix& d_alpha, const ComplexMatrix& rho_alpha,
                       const InteractionSpec& spec, double t, std::size_t n_tau) {
  if (t < 0.0) throw ConfigError("apo2_rhs: t must be non-negative");
  const InteractionPicture ip(spec);
  const auto gen = make_single<ProductGenerator>(ip, t, n_tau);
  return unvec(gen.build(rho_alpha, rho_alpha).back() * vec(d_alpha));
}

namespace {

CorrelatedGenerator make_corr_single(const InteractionPicture& ip, const ProjectorFamily& fam,
                                     double t, std::size_t n_tau) {
  if (n_tau == 0) throw ConfigError("rhs: n_tau must be positive");
  if (t == 0.0) return CorrelatedGenerator(ip, fam, 1.0, 1);
  return CorrelatedGenerator(ip, fam, t / static_cast<double>(n_tau), n_tau + 1);
}

}  // namespace

std::vector<ComplexMatrix> corrproj2_inhomogeneity(const ProjectorFamily& family,
                                                   const FrameDecomposition& frame,
                                                   const InteractionSpec& spec, double t,
                                                   std::size_t n_tau) {
  if (t < 0.0) throw ConfigError("corrproj2: t must be non-negative");
  family.validate();
  const InteractionPicture ip(spec);
  check_frame_shape(frame, spec);
  const auto gen = make_corr_single(ip, family, t, n_tau);
  const std::size_t nf = family.size();
  std::vector<Eigen::Vector4cd> v(nf, Eigen::Vector4cd::Zero());
  for (const auto& term : frame.terms) {
    ComplexMatrix delta = term.env_state.matrix();
    for (std::size_t j = 0; j < nf; ++j)
      delta -= (family.y[j] * term.env_state.matrix()).trace() * family.x[j];
    const auto s = gen.build(delta).back();
    for (std::size_t i = 0; i < nf; ++i) v[i] += term.weight * (s[i] * vec(term.system_op));
  }
  std::vector<ComplexMatrix> out;
  for (const auto& x : v) out.push_back(unvec(x));
  return out;
}

std::vector<ComplexMatrix> corrproj2_rhs(const std::vector<ComplexMatrix>& etas,
                                         const ProjectorFamily& family,
                                         const FrameDecomposition& frame,
                                         const InteractionSpec& spec, double t,
                                         std::size_t n_tau) {
  if (etas.size() != family.size())
    throw DimensionError("corrproj2_rhs: one eta per projector block expected");
  auto out = corrproj2_inhomogeneity(family, frame, spec, t, n_tau);
  const InteractionPicture ip(spec);
  const auto gen = make_corr_single(ip, family, t, n_tau);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto s = gen.build(family.x[j]).back();
    for (std::size_t i = 0; i < family.size(); ++i) out[i] += unvec(s[i] * vec(etas[j]));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> exact_oracle(const ComplexMatrix& rho_se, const InteractionSpec& spec,
                                        const std::vector<double>& times) {
  spec.validate();
  const BipartiteShape shape = spec.shape();
  shape.check(rho_se);
  if (shape.total() > kMaxDim)
    throw DimensionError("exact_oracle: total dimension exceeds " + std::to_string(kMaxDim));
  const DensityOperator rho(rho_se);
  const HermitianSpectrum h(spec.total_hamiltonian());
  const HermitianSpectrum hs(spec.h_system);
  std::vector<ComplexMatrix> out;
  out.reserve(times.size());
  for (double t : times) {
    const ComplexMatrix u = h.exp(cplx(0.0, -t));
    const ComplexMatrix rs = partial_trace_env(u * rho.matrix() * u.adjoint(), shape);
    const ComplexMatrix us = hs.exp(cplx(0.0, t));
    out.push_back(us * rs * us.adjoint());
  }
  return out;
}

TrajectoryTable to_table(const std::string& method, const std::vector<double>& times,
                         const std::vector<ComplexMatrix>& states) {
  if (times.size() != states.size()) throw DimensionError("to_table: length mismatch");
  TrajectoryTable tab;
  tab.time = times;
  Series s{method, {}, {}};
  for (const auto& m : states) {
    s.rho10.push_back(m(0, 1));
    s.rho11.push_back(m(0, 0).real());
  }
  tab.add(std::move(s));
  tab.validate();
  return tab;
}

// ---------------------------------------------------------------------------

InteractionSpec jaynes_cummings(double varsigma, double omega, double g, std::size_t n_max) {
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  InteractionSpec s;
  s.h_system = 0.5 * varsigma * sigma_z();
  s.h_env = ComplexMatrix::Zero(d, d);
  ComplexMatrix b = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) s.h_env(k, k) = omega * static_cast<double>(k);
  for (Eigen::Index k = 1; k < d; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  s.couplings = {{sigma_plus(), b}, {sigma_minus(), b.adjoint()}};
  s.g = g;
  s.validate();
  return s;
}

ComplexMatrix jaynes_cummings_state(double c0, double c1, std::size_t n, std::size_t n_max) {
  if (n > n_max) throw ConfigError("jaynes_cummings_state: occupation above truncation");
  if (std::abs(c0 * c0 + c1 * c1 - 1.0) > 1e-12)
    throw ConfigError("jaynes_cummings_state: c0^2 + c1^2 must equal 1");
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * d);
  psi(d + 0) = c0;                               // |0>_S |0>
  psi(0 * d + static_cast<Eigen::Index>(n)) = c1;  // |1>_S |n>
  return psi * psi.adjoint();
}

}  // namespace oqs
