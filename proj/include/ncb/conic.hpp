#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ncb/basis.hpp"

namespace ncb {

// ---------------------------------------------------------------------------
// Problem and report types

enum class ConstraintKind {
  Positivity,          // tr(W [rho (x) M_1 (x) ... (x) M_n]) >= 0
  Marginal,            // single-leg statistics reproduce born(rho, M)
  TraceNormalization,  // trace preservation
  Stochastic,          // post-processing row sums / entry bounds
  Generic,
};

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Positivity: return "positivity";
    case ConstraintKind::Marginal: return "marginal";
    case ConstraintKind::TraceNormalization: return "trace";
    case ConstraintKind::Stochastic: return "stochastic";
    case ConstraintKind::Generic: return "generic";
  }
  return "unknown";
}

/// Provenance of one constraint row. Indices are -1 when not applicable.
struct ConstraintLabel {
  ConstraintKind kind = ConstraintKind::Generic;
  int prep = -1;
  std::vector<int> effects;  // flat effect indices, one per leg for positivity rows
  int leg = -1;
};

/// Real feasibility program:
///   find x in R^variable_dim with
///     equalities * x == rhs,
///     nonnegatives * x >= 0,
///     mat(x) PSD                      (only when psd_block is set)
/// where mat() decodes Gell-Mann coordinates of a psd_block x psd_block
/// Hermitian matrix. `operator_dim` records that x are the coordinates of a
/// Hermitian operator of that dimension (the map table or Choi operator).
struct ConicProblem {
  std::size_t variable_dim = 0;
  RealMatrix equalities;
  RealVector rhs;
  RealMatrix nonnegatives;
  std::optional<std::size_t> psd_block;
  std::optional<std::size_t> operator_dim;
  std::vector<ConstraintLabel> equality_labels;
  std::vector<ConstraintLabel> nonnegative_labels;

  void check() const {
    const auto n = static_cast<Eigen::Index>(variable_dim);
    if (equalities.cols() != n && equalities.rows() > 0) throw ShapeError("equality functionals have wrong length");
    if (nonnegatives.cols() != n && nonnegatives.rows() > 0) throw ShapeError("nonnegativity functionals have wrong length");
    if (rhs.size() != equalities.rows()) throw ShapeError("rhs length differs from equality count");
    if (equality_labels.size() != static_cast<std::size_t>(equalities.rows()) ||
        nonnegative_labels.size() != static_cast<std::size_t>(nonnegatives.rows()))
      throw ShapeError("constraint labels do not cover every constraint");
    if (psd_block && (*psd_block) * (*psd_block) != variable_dim) throw ShapeError("psd block size does not match variable_dim");
    if (operator_dim && (*operator_dim) * (*operator_dim) != variable_dim)
      throw ShapeError("operator_dim does not match variable_dim");
  }
};

struct SolverConfig {
  double feas_tol = 1e-7;
  double cert_tol = 1e-6;
  int max_iter = 120;
};

enum class Status { Feasible, Infeasible, Indeterminate };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "Feasible";
    case Status::Infeasible: return "Infeasible";
    case Status::Indeterminate: return "Indeterminate";
  }
  return "unknown";
}

/// Farkas alternative, normalized so max(|y|, |z|, ||Z||) = 1:
///   sum_i y_i f_i + Z = sum_j z_j g_j,   y >= 0,  Z PSD,   sum_j z_j c_j = -gap < 0.
/// Any feasible x would give 0 <= <y, Fx> + <Z, mat x> = <z, c> < 0.
struct FarkasCertificate {
  RealVector nonneg_duals;                 // y, one per nonnegativity row
  RealVector equality_duals;               // z, one per equality row
  std::optional<HermitianOperator> psd_dual;  // Z
  double residual = 0.0;                   // || F^T y + Z - E^T z ||_inf
  double gap = 0.0;                        // -<z, c>
};

struct FeasibilityReport {
  Status status = Status::Indeterminate;
  std::optional<RealVector> primal;  // coordinates x
  std::optional<FarkasCertificate> certificate;
  double max_primal_residual = std::numeric_limits<double>::infinity();
  double certificate_gap = 0.0;
  int iterations = 0;
  bool farkas_consistent = true;
  std::string diagnostics;
};

/// Constraint violations of x: equality residuals, negative parts of the
/// nonnegativity rows and of the PSD block's smallest eigenvalue.
inline double primal_residual(const ConicProblem& p, const RealVector& x) {
  double r = 0.0;
  if (p.equalities.rows() > 0) r = std::max(r, (p.equalities * x - p.rhs).cwiseAbs().maxCoeff());
  if (p.nonnegatives.rows() > 0) r = std::max(r, std::max(0.0, -(p.nonnegatives * x).minCoeff()));
  if (p.psd_block) {
    const HermitianBasis basis(*p.psd_block);
    r = std::max(r, std::max(0.0, -min_eigenvalue(HermitianOperator(basis.matrix(x)))));
  }
  return r;
}

/// Recomputes residual and gap of a certificate from its raw duals, after
/// scaling them to unit max-magnitude.
inline FarkasCertificate normalize_certificate(const ConicProblem& p, RealVector y, RealVector z,
                                               std::optional<HermitianOperator> psd) {
  y = y.cwiseMax(0.0);
  double scale = 0.0;
  if (y.size() > 0) scale = std::max(scale, y.cwiseAbs().maxCoeff());
  if (z.size() > 0) scale = std::max(scale, z.cwiseAbs().maxCoeff());
  if (psd) {
    // Project onto the PSD cone.
    auto eig = eig_hermitian(*psd);
    RealVector vals = eig.values.cwiseMax(0.0);
    psd = HermitianOperator(eig.vectors * vals.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
    scale = std::max(scale, vals.size() ? vals.maxCoeff() : 0.0);
  }
  FarkasCertificate c;
  if (!(scale > 0.0)) {
    c.nonneg_duals = RealVector::Zero(y.size());
    c.equality_duals = RealVector::Zero(z.size());
    c.residual = std::numeric_limits<double>::infinity();
    c.gap = 0.0;
    return c;
  }
  y /= scale;
  z /= scale;
  if (psd) *psd *= 1.0 / scale;
  RealVector res = RealVector::Zero(static_cast<Eigen::Index>(p.variable_dim));
  if (p.nonnegatives.rows() > 0) res += p.nonnegatives.transpose() * y;
  if (p.equalities.rows() > 0) res -= p.equalities.transpose() * z;
  if (psd) res += HermitianBasis(*p.psd_block).coords(psd->matrix());
  c.residual = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  c.gap = p.rhs.size() ? -p.rhs.dot(z) : 0.0;
  c.nonneg_duals = std::move(y);
  c.equality_duals = std::move(z);
  c.psd_dual = std::move(psd);
  return c;
}

namespace detail {

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point method for
//   find u:  A u = b,  F u >= 0,  mat(u) PSD
// written in the conic form  G u + s = h (G = -[F; mat], h = 0), s in K,
// K = R_+^m x Herm_+^p. The embedding
//   A^T y + G^T z          = 0
//   -A u + b tau           = 0
//   -G u + h tau - s       = 0
//   -b^T y - h^T z - kappa = 0
// yields either tau > 0 (a solution u / tau) or kappa > 0 (a certificate
// y, z with A^T y = Ghat^T z, b^T y < 0). Nesterov-Todd scaling with a
// Mehrotra predictor-corrector step.

struct ConeVec {
  RealVector lp;
  ComplexMatrix psd;  // empty when there is no PSD block

  [[nodiscard]] double dot(const ConeVec& o) const {
    double v = lp.dot(o.lp);
    if (psd.size()) v += (psd.array() * o.psd.array().conjugate()).sum().real();
    return v;
  }
  ConeVec& axpy(double a, const ConeVec& o) {
    lp += a * o.lp;
    if (psd.size()) psd += a * o.psd;
    return *this;
  }
  [[nodiscard]] double inf_norm() const {
    double v = lp.size() ? lp.cwiseAbs().maxCoeff() : 0.0;
    if (psd.size()) v = std::max(v, psd.cwiseAbs().maxCoeff());
    return v;
  }
};

inline ComplexMatrix herm(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

struct ReducedProblem {
  RealMatrix A;  // r x k, full row rank
  RealVector b;
  RealMatrix F;  // m x k, unit rows
  std::size_t psd = 0;
  std::size_t k = 0;
};

struct IpmResult {
  // Best iterates seen, judged by residual alone: with a zero objective any
  // point with small residuals is usable, however far from central.
  std::optional<RealVector> primal;  // u / tau
  double primal_merit = std::numeric_limits<double>::infinity();
  std::optional<RealVector> cert_y;  // scaled so b^T y = -1
  std::optional<ConeVec> cert_z;
  double cert_merit = std::numeric_limits<double>::infinity();
  double tau = 1.0, kappa = 1.0;
  int iterations = 0;
  std::string note;
};

class ConicIpm {
 public:
  explicit ConicIpm(const ReducedProblem& p) : p_(p), basis_(p.psd ? p.psd : 1) {
    m_ = static_cast<Eigen::Index>(p.F.rows());
    r_ = static_cast<Eigen::Index>(p.A.rows());
    k_ = static_cast<Eigen::Index>(p.k);
    nu_ = static_cast<double>(m_) + static_cast<double>(p.psd);
  }

  IpmResult run(int max_iter, double tol) {
    IpmResult res;
    RealVector u = RealVector::Zero(k_), y = RealVector::Zero(r_);
    ConeVec s = identity_cone(), z = identity_cone();
    double tau = 1.0, kappa = 1.0;
    const double bnorm = std::max(1.0, p_.b.size() ? p_.b.cwiseAbs().maxCoeff() : 0.0);
    int small_steps = 0;

    for (int it = 0; it < max_iter; ++it) {
      res.iterations = it;
      // Residuals of the embedding.
      const RealVector r1 = (r_ ? RealVector(p_.A.transpose() * y) : RealVector::Zero(k_)) - ghat_t(z);
      const RealVector r2 = (r_ ? RealVector(-p_.A * u + p_.b * tau) : RealVector());
      ConeVec r3 = ghat(u);
      r3.axpy(-1.0, s);
      const double by = r_ ? p_.b.dot(y) : 0.0;
      const double r4 = -by - kappa;
      const double mu = (s.dot(z) + tau * kappa) / (nu_ + 1.0);

      const double pres = std::max(r2.size() ? r2.cwiseAbs().maxCoeff() : 0.0, r3.inf_norm()) / tau;
      if (log_threshold_allows(LogLevel::Debug)) {
        std::ostringstream os;
        os << "ipm " << it << ": mu " << mu << " tau " << tau << " kappa " << kappa << " pres " << pres << " dres "
           << (r1.size() ? r1.cwiseAbs().maxCoeff() : 0.0) << " b'y " << by;
        log(LogLevel::Debug, os.str());
      }
      if (!std::isfinite(pres) || !std::isfinite(mu)) {
        res.note = "non-finite iterate";
        break;
      }
      res.tau = tau;
      res.kappa = kappa;
      if (pres / bnorm < res.primal_merit) {
        res.primal_merit = pres / bnorm;
        res.primal = RealVector(u / tau);
      }
      if (-by > 0.0) {
        const double cres = (r1.size() ? r1.cwiseAbs().maxCoeff() : 0.0) / (-by);
        if (cres < res.cert_merit) {
          res.cert_merit = cres;
          res.cert_y = RealVector(y / (-by));
          ConeVec zc = z;
          zc.lp /= -by;
          if (zc.psd.size()) zc.psd /= -by;
          res.cert_z = std::move(zc);
        }
      }
      if (res.primal_merit <= tol || res.cert_merit <= tol) return res;
      if (mu < 1e-20) {
        res.note = "complementarity underflow";
        break;
      }

      if (!scale(s, z)) {
        res.note = "scaling breakdown (cone iterate lost definiteness)";
        break;
      }
      if (!factor()) {
        res.note = "KKT factorization failed";
        break;
      }

      // Constant direction for dtau.
      RealVector d1x, d1y;
      ConeVec d1z;
      kkt_solve(RealVector::Zero(k_), r_ ? p_.b : RealVector(), zero_cone(), d1x, d1y, d1z);
      const double denom_base = -(r_ ? p_.b.dot(d1y) : 0.0);

      auto direction = [&](double gamma, const ConeVec& xi_s, double xi_tau, RealVector& dx, RealVector& dy,
                           ConeVec& dz, ConeVec& ds, double& dtau, double& dkappa) {
        ConeVec rz = r3;
        rz.lp *= (1.0 - gamma);
        if (rz.psd.size()) rz.psd *= (1.0 - gamma);
        const ConeVec scaled = lambda_solve(xi_s);  // lambda \ xi_s
        rz.axpy(-1.0, w_transpose(scaled));
        RealVector d2x, d2y;
        ConeVec d2z;
        kkt_solve(-(1.0 - gamma) * r1, r_ ? RealVector((1.0 - gamma) * r2) : RealVector(), rz, d2x, d2y, d2z);
        const double num = -(1.0 - gamma) * r4 + xi_tau / tau + (r_ ? p_.b.dot(d2y) : 0.0);
        const double den = kappa / tau + denom_base;
        dtau = num / den;
        dx = d2x + dtau * d1x;
        dy = r_ ? RealVector(d2y + dtau * d1y) : RealVector();
        dz = d2z;
        dz.axpy(dtau, d1z);
        // ds = W^T (lambda \ xi_s - W dz)
        ConeVec t = scaled;
        t.axpy(-1.0, w_apply(dz));
        ds = w_transpose(t);
        dkappa = (xi_tau - kappa * dtau) / tau;
      };

      // Predictor.
      ConeVec lam2 = lambda_square();
      ConeVec xi_aff = lam2;
      xi_aff.lp *= -1.0;
      if (xi_aff.psd.size()) xi_aff.psd *= -1.0;
      RealVector dxa, dya;
      ConeVec dza, dsa;
      double dtaua = 0, dkappaa = 0;
      direction(0.0, xi_aff, -tau * kappa, dxa, dya, dza, dsa, dtaua, dkappaa);
      const double alpha_aff = std::min(1.0, max_step(s, dsa, z, dza, tau, dtaua, kappa, dkappaa));
      const double sigma = std::pow(1.0 - alpha_aff, 3);

      // Corrector.
      ConeVec xi = lam2;
      xi.lp *= -1.0;
      if (xi.psd.size()) xi.psd *= -1.0;
      xi.axpy(-1.0, jordan(w_inv_transpose(dsa), w_apply(dza)));
      xi.axpy(sigma * mu, identity_cone());
      const double xi_tau = -tau * kappa - dtaua * dkappaa + sigma * mu;
      RealVector dx, dy;
      ConeVec dz, ds;
      double dtau = 0, dkappa = 0;
      direction(sigma, xi, xi_tau, dx, dy, dz, ds, dtau, dkappa);
      const double alpha = std::min(1.0, 0.99 * max_step(s, ds, z, dz, tau, dtau, kappa, dkappa));

      u += alpha * dx;
      if (r_) y += alpha * dy;
      s.axpy(alpha, ds);
      z.axpy(alpha, dz);
      if (s.psd.size()) {
        s.psd = herm(s.psd);
        z.psd = herm(z.psd);
      }
      tau += alpha * dtau;
      kappa += alpha * dkappa;

      // Keep the homogeneous iterate in a sane numeric range.
      const double norm = std::max({tau, kappa, 1e-300});
      if (norm > 1e8 || norm < 1e-8) {
        const double f = 1.0 / norm;
        u *= f;
        if (r_) y *= f;
        s.lp *= f;
        z.lp *= f;
        if (s.psd.size()) {
          s.psd *= f;
          z.psd *= f;
        }
        tau *= f;
        kappa *= f;
      }

      if (alpha < 1e-10) {
        if (++small_steps >= 3) {
          res.note = "step length stalled";
          break;
        }
      } else {
        small_steps = 0;
      }
    }
    return res;
  }

 private:

  [[nodiscard]] ConeVec identity_cone() const {
    ConeVec v{RealVector::Ones(m_), ComplexMatrix()};
    if (p_.psd) v.psd = ComplexMatrix::Identity(psd_dim(), psd_dim());
    return v;
  }
  [[nodiscard]] ConeVec zero_cone() const {
    ConeVec v{RealVector::Zero(m_), ComplexMatrix()};
    if (p_.psd) v.psd = ComplexMatrix::Zero(psd_dim(), psd_dim());
    return v;
  }
  [[nodiscard]] Eigen::Index psd_dim() const { return static_cast<Eigen::Index>(p_.psd); }

  /// Ghat u = [F u; mat(u)]
  [[nodiscard]] ConeVec ghat(const RealVector& u) const {
    ConeVec v{m_ ? RealVector(p_.F * u) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) v.psd = basis_.matrix(u);
    return v;
  }
  /// Ghat^T z = F^T z_lp + coords(z_psd)
  [[nodiscard]] RealVector ghat_t(const ConeVec& z) const {
    RealVector out = m_ ? RealVector(p_.F.transpose() * z.lp) : RealVector::Zero(k_);
    if (p_.psd) out += basis_.coords(z.psd);
    return out;
  }

  // Nesterov-Todd scaling at (s, z).
  bool scale(const ConeVec& s, const ConeVec& z) {
    if (m_) {
      if ((s.lp.array() <= 0.0).any() || (z.lp.array() <= 0.0).any()) return false;
      w_lp_ = (s.lp.array() / z.lp.array()).sqrt();
      lam_lp_ = (s.lp.array() * z.lp.array()).sqrt();
    }
    if (p_.psd) {
      Eigen::LLT<ComplexMatrix> ls(s.psd), lz(z.psd);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const ComplexMatrix Ls = ls.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<ComplexMatrix> svd(Lz.adjoint() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
      lam_psd_ = svd.singularValues();
      if ((lam_psd_.array() <= 0.0).any()) return false;
      const RealVector isq = lam_psd_.cwiseSqrt().cwiseInverse();
      R_ = Ls * svd.matrixV() * isq.cast<Complex>().asDiagonal();
      Rinv_ = isq.cast<Complex>().asDiagonal() * svd.matrixU().adjoint() * Lz.adjoint();
      Q_ = R_ * R_.adjoint();     // H(X) = Q X Q
      T_ = Rinv_.adjoint() * Rinv_;  // H^{-1}(X) = T X T
    }
    return true;
  }

  [[nodiscard]] ConeVec w_apply(const ConeVec& v) const {  // W v
    ConeVec out{m_ ? RealVector(w_lp_.cwiseProduct(v.lp)) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) out.psd = R_.adjoint() * v.psd * R_;
    return out;
  }
  [[nodiscard]] ConeVec w_inv_transpose(const ConeVec& v) const {  // W^{-T} v
    ConeVec out{m_ ? RealVector(v.lp.cwiseQuotient(w_lp_)) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) out.psd = Rinv_ * v.psd * Rinv_.adjoint();
    return out;
  }
  [[nodiscard]] ConeVec w_transpose(const ConeVec& v) const {  // W^T v
    ConeVec out{m_ ? RealVector(w_lp_.cwiseProduct(v.lp)) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) out.psd = R_ * v.psd * R_.adjoint();
    return out;
  }
  [[nodiscard]] ConeVec h_inverse(const ConeVec& v) const {  // (W^T W)^{-1} v
    ConeVec out{m_ ? RealVector(v.lp.cwiseQuotient(w_lp_.cwiseAbs2())) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) out.psd = T_ * v.psd * T_;
    return out;
  }
  [[nodiscard]] ConeVec lambda_square() const {
    ConeVec out{m_ ? RealVector(lam_lp_.cwiseAbs2()) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) out.psd = lam_psd_.cwiseAbs2().cast<Complex>().asDiagonal();
    return out;
  }
  /// Solves lambda o u = v for u (Jordan product with the diagonal scaling point).
  [[nodiscard]] ConeVec lambda_solve(const ConeVec& v) const {
    ConeVec out{m_ ? RealVector(v.lp.cwiseQuotient(lam_lp_)) : RealVector::Zero(0), ComplexMatrix()};
    if (p_.psd) {
      out.psd = ComplexMatrix(psd_dim(), psd_dim());
      for (Eigen::Index j = 0; j < psd_dim(); ++j)
        for (Eigen::Index i = 0; i < psd_dim(); ++i) out.psd(i, j) = 2.0 * v.psd(i, j) / (lam_psd_(i) + lam_psd_(j));
    }
    return out;
  }
  [[nodiscard]] static ConeVec jordan(const ConeVec& a, const ConeVec& b) {
    ConeVec out{a.lp.cwiseProduct(b.lp), ComplexMatrix()};
    if (a.psd.size()) out.psd = 0.5 * (a.psd * b.psd + b.psd * a.psd);
    return out;
  }

  /// Largest alpha keeping s + alpha ds, z + alpha dz, tau, kappa in the cone.
  [[nodiscard]] double max_step(const ConeVec& s, const ConeVec& ds, const ConeVec& z, const ConeVec& dz, double tau,
                                double dtau, double kappa, double dkappa) const {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (ds.lp(i) < 0) a = std::min(a, -s.lp(i) / ds.lp(i));
      if (dz.lp(i) < 0) a = std::min(a, -z.lp(i) / dz.lp(i));
    }
    if (dtau < 0) a = std::min(a, -tau / dtau);
    if (dkappa < 0) a = std::min(a, -kappa / dkappa);
    if (p_.psd) {
      const RealVector isq = lam_psd_.cwiseSqrt().cwiseInverse();
      const auto step_psd = [&](const ComplexMatrix& scaled) {
        const ComplexMatrix m = herm(isq.cast<Complex>().asDiagonal() * scaled * isq.cast<Complex>().asDiagonal());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()(0);
        return lo < 0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
      };
      a = std::min(a, step_psd(Rinv_ * ds.psd * Rinv_.adjoint()));
      a = std::min(a, step_psd(R_.adjoint() * dz.psd * R_));
    }
    return a;
  }

  // Reduced KKT matrix P = Ghat^T H^{-1} Ghat and Schur complement A P^{-1} A^T.
  bool factor() {
    pure_psd_ = (p_.psd && m_ == 0);
    if (!pure_psd_) {
      RealMatrix P = RealMatrix::Zero(k_, k_);
      if (m_) {
        const RealMatrix DF = (w_lp_.cwiseInverse()).asDiagonal() * p_.F;
        P.selfadjointView<Eigen::Lower>().rankUpdate(DF.transpose());
      }
      if (p_.psd) {
        for (Eigen::Index j = 0; j < k_; ++j) {
          ComplexMatrix tbt = ComplexMatrix::Zero(psd_dim(), psd_dim());
          for (const auto& e : basis_.entries(static_cast<std::size_t>(j)))
            tbt += e.value * T_.col(e.row) * T_.row(e.col);
          P.col(j) += basis_.coords(tbt);
        }
      }
      P = P.selfadjointView<Eigen::Lower>();
      const double reg = 1e-13 * std::max(1.0, P.diagonal().maxCoeff());
      P.diagonal().array() += reg;
      p_llt_.compute(P);
      if (p_llt_.info() != Eigen::Success) return false;
    }
    if (r_) {
      RealMatrix PinvAt(k_, r_);
      for (Eigen::Index i = 0; i < r_; ++i) PinvAt.col(i) = p_solve(p_.A.row(i).transpose());
      RealMatrix S = p_.A * PinvAt;
      S = 0.5 * (S + S.transpose());
      S.diagonal().array() += 1e-14 * std::max(1.0, S.diagonal().maxCoeff());
      s_llt_.compute(S);
      if (s_llt_.info() != Eigen::Success) return false;
    }
    return true;
  }

  [[nodiscard]] RealVector p_solve(const RealVector& v) const {
    if (pure_psd_) return basis_.coords(Q_ * basis_.matrix(v) * Q_);
    return p_llt_.solve(v);
  }

  /// Solves  A^T dy + G^T dz = rx,  A dx = ry,  G dx - H dz = rz  with G = -Ghat.
  void kkt_solve(const RealVector& rx, const RealVector& ry, const ConeVec& rz, RealVector& dx, RealVector& dy,
                 ConeVec& dz) const {
    const RealVector t = rx - ghat_t(h_inverse(rz));
    if (r_) {
      const RealVector pt = p_solve(t);
      dy = s_llt_.solve(p_.A * pt - ry);
      dx = p_solve(t - p_.A.transpose() * dy);
    } else {
      dy = RealVector();
      dx = p_solve(t);
    }
    ConeVec g = ghat(dx);
    g.axpy(1.0, rz);
    dz = h_inverse(g);
    dz.lp *= -1.0;
    if (dz.psd.size()) dz.psd *= -1.0;
  }

  const ReducedProblem& p_;
  HermitianBasis basis_;
  Eigen::Index m_ = 0, r_ = 0, k_ = 0;
  double nu_ = 0.0;
  bool pure_psd_ = false;
  RealVector w_lp_, lam_lp_, lam_psd_;
  ComplexMatrix R_, Rinv_, Q_, T_;
  Eigen::LLT<RealMatrix> p_llt_, s_llt_;
};

inline std::int64_t quantize(double v) { return static_cast<std::int64_t>(std::llround(v * 1e12)); }

struct RowKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

/// Indices of rows that are unique at 1e-12 granularity (optionally keyed with rhs).
inline std::vector<Eigen::Index> unique_rows(const RealMatrix& m, const RealVector* rhs) {
  std::unordered_map<std::vector<std::int64_t>, Eigen::Index, RowKeyHash> seen;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(m.cols() + (rhs ? 1 : 0)));
    for (Eigen::Index j = 0; j < m.cols(); ++j) key[static_cast<std::size_t>(j)] = quantize(m(i, j));
    if (rhs) key.back() = quantize((*rhs)(i));
    if (seen.emplace(std::move(key), i).second) keep.push_back(i);
  }
  return keep;
}

}  // namespace detail

/// Decides feasibility of a ConicProblem.
///
/// Presolve removes duplicate and zero functionals, restricts the variable to
/// the span of the functionals (LP-only problems) and reduces the equalities
/// to a full-rank set, detecting inconsistent ones directly. The interior-point
/// result is then mapped back and checked against the original constraints:
/// Feasible needs a primal within feas_tol, Infeasible a normalized certificate
/// with residual <= feas_tol and gap >= cert_tol. Anything else is Indeterminate.
inline FeasibilityReport solve(const ConicProblem& problem, const SolverConfig& config = {}) {
  problem.check();
  FeasibilityReport report;
  std::ostringstream diag;
  const auto N = static_cast<Eigen::Index>(problem.variable_dim);
  const bool has_psd = problem.psd_block.has_value();

  // Nonnegativity rows: drop zeros and duplicates, normalize.
  std::vector<Eigen::Index> nn_rows;
  RealVector nn_scale;
  {
    std::vector<Eigen::Index> uniq = detail::unique_rows(problem.nonnegatives, nullptr);
    double max_norm = 0.0;
    for (auto i : uniq) max_norm = std::max(max_norm, problem.nonnegatives.row(i).norm());
    std::vector<double> scales;
    for (auto i : uniq) {
      const double nrm = problem.nonnegatives.row(i).norm();
      if (nrm > 1e-13 * std::max(1.0, max_norm)) {
        nn_rows.push_back(i);
        scales.push_back(nrm);
      }
    }
    nn_scale = Eigen::Map<RealVector>(scales.data(), static_cast<Eigen::Index>(scales.size()));
  }
  const std::vector<Eigen::Index> eq_rows = detail::unique_rows(problem.equalities, &problem.rhs);
  const auto m = static_cast<Eigen::Index>(nn_rows.size());
  const auto me = static_cast<Eigen::Index>(eq_rows.size());

  RealMatrix F(m, N), E(me, N);
  RealVector c(me);
  for (Eigen::Index i = 0; i < m; ++i) F.row(i) = problem.nonnegatives.row(nn_rows[static_cast<std::size_t>(i)]) / nn_scale(i);
  for (Eigen::Index i = 0; i < me; ++i) {
    E.row(i) = problem.equalities.row(eq_rows[static_cast<std::size_t>(i)]);
    c(i) = problem.rhs(eq_rows[static_cast<std::size_t>(i)]);
  }

  // Variable reduction: x = Qv u.
  RealMatrix Qv;
  if (!has_psd) {
    RealMatrix gram = RealMatrix::Zero(N, N);
    if (m) gram.selfadjointView<Eigen::Lower>().rankUpdate(F.transpose());
    if (me) gram.selfadjointView<Eigen::Lower>().rankUpdate(E.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
    const double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < N; ++i)
      if (es.eigenvalues()(i) > 1e-12 * std::max(top, 1e-300)) cols.push_back(i);
    Qv.resize(N, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) Qv.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cols[j]);
  } else {
    Qv = RealMatrix::Identity(N, N);
  }
  const Eigen::Index k = Qv.cols();

  // Equality rank reduction.
  RealMatrix Ur;
  detail::ReducedProblem red;
  red.k = static_cast<std::size_t>(k);
  red.psd = has_psd ? *problem.psd_block : 0;
  red.F = m ? RealMatrix(F * Qv) : RealMatrix(0, k);
  const auto map_equality_duals = [&](const RealVector& z_unique) {
    RealVector z = RealVector::Zero(problem.equalities.rows());
    for (Eigen::Index i = 0; i < me; ++i) z(eq_rows[static_cast<std::size_t>(i)]) = z_unique(i);
    return z;
  };
  const auto map_nonneg_duals = [&](const RealVector& y_unique) {
    RealVector y = RealVector::Zero(problem.nonnegatives.rows());
    for (Eigen::Index i = 0; i < m; ++i) y(nn_rows[static_cast<std::size_t>(i)]) = y_unique(i) / nn_scale(i);
    return y;
  };

  if (me) {
    const RealMatrix Ek = E * Qv;
    Eigen::JacobiSVD<RealMatrix> svd(Ek, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-10 * std::max(top, 1e-300)) ++rank;
    Ur = svd.matrixU().leftCols(rank);
    const RealVector incons = c - Ur * (Ur.transpose() * c);
    if (incons.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      // z = -(I - U U^T) c gives E^T z = 0 and <z, c> = -|incons|^2 < 0.
      auto cert = normalize_certificate(problem, RealVector::Zero(problem.nonnegatives.rows()), map_equality_duals(-incons),
                                        has_psd ? std::optional<HermitianOperator>(HermitianOperator::zero(*problem.psd_block))
                                                : std::nullopt);
      report.certificate_gap = cert.gap;
      diag << "equalities inconsistent (residual " << incons.cwiseAbs().maxCoeff() << "); ";
      if (cert.residual <= config.feas_tol && cert.gap >= config.cert_tol) report.status = Status::Infeasible;
      report.certificate = std::move(cert);
      report.diagnostics = diag.str();
      return report;
    }
    red.A = sv.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
    red.b = Ur.transpose() * c;
  } else {
    red.A = RealMatrix(0, k);
    red.b = RealVector(0);
  }

  const auto finish_primal = [&](RealVector u) {
    if (red.A.rows() > 0) {
      // Minimal-norm correction onto A u = b.
      const RealVector viol = red.A * u - red.b;
      const RealMatrix AAt = red.A * red.A.transpose();
      u -= red.A.transpose() * AAt.ldlt().solve(viol);
    }
    return RealVector(Qv * u);
  };

  if (m == 0 && !has_psd) {
    // Consistent linear system: least-squares solution is exact.
    RealVector u = RealVector::Zero(k);
    if (red.A.rows() > 0) u = red.A.transpose() * (red.A * red.A.transpose()).ldlt().solve(red.b);
    const RealVector x = Qv * u;
    report.max_primal_residual = primal_residual(problem, x);
    report.status = report.max_primal_residual <= config.feas_tol ? Status::Feasible : Status::Indeterminate;
    report.primal = x;
    report.diagnostics = "no cone constraints";
    return report;
  }

  detail::ConicIpm ipm(red);
  const detail::IpmResult res = ipm.run(config.max_iter, 1e-10);
  report.iterations = res.iterations;
  diag << "ipm iterations " << res.iterations << ", tau " << res.tau << ", kappa " << res.kappa;
  if (!res.note.empty()) diag << ", " << res.note;

  // Primal candidate.
  std::optional<RealVector> primal;
  double pres = std::numeric_limits<double>::infinity();
  if (res.primal) {
    primal = finish_primal(*res.primal);
    pres = primal_residual(problem, *primal);
  }
  // Certificate candidate: A^T y = Ghat^T z, b^T y < 0.
  std::optional<FarkasCertificate> cert;
  if (res.cert_y) {
    RealVector z_eq_unique = me ? RealVector(Ur * *res.cert_y) : RealVector(0);
    std::optional<HermitianOperator> Z;
    if (has_psd) Z = HermitianOperator(res.cert_z->psd);
    cert = normalize_certificate(problem, map_nonneg_duals(res.cert_z->lp), map_equality_duals(z_eq_unique), Z);
  }
  const bool primal_ok = primal && pres <= config.feas_tol;
  const bool cert_ok = cert && cert->residual <= config.feas_tol && cert->gap >= config.cert_tol;
  report.max_primal_residual = pres;
  report.certificate_gap = cert ? cert->gap : 0.0;
  report.farkas_consistent = !(primal_ok && cert_ok);
  diag << ", primal residual " << pres << ", certificate residual " << (cert ? cert->residual : -1.0) << ", gap "
       << report.certificate_gap;
  if (primal_ok && cert_ok) {
    report.status = Status::Indeterminate;
    diag << ", Farkas inconsistency: both primal and certificate pass";
  } else if (primal_ok) {
    report.status = Status::Feasible;
    report.primal = std::move(primal);
  } else if (cert_ok) {
    report.status = Status::Infeasible;
    report.certificate = std::move(cert);
  } else {
    report.status = Status::Indeterminate;
    // Keep whichever candidate came closer for diagnosis.
    if (res.primal_merit <= res.cert_merit)
      report.primal = std::move(primal);
    else
      report.certificate = std::move(cert);
  }
  report.diagnostics = diag.str();
  return report;
}

/// Map operator recovered from a primal coordinate vector.
inline HermitianOperator primal_operator(const FeasibilityReport& report, const ConicProblem& problem) {
  if (!report.primal) throw ArgumentError("report carries no primal");
  if (!problem.operator_dim) throw ArgumentError("problem variables are not operator coordinates");
  return HermitianOperator(HermitianBasis(*problem.operator_dim).matrix(*report.primal));
}

}  // namespace ncb
