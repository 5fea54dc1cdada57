#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "ncb/errors.hpp"

namespace ncb {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Input Hermiticity tolerance (absolute, on entries).
inline constexpr double kHermitianInputTol = 1e-12;
/// Symmetrization corrections above this are reported.
inline constexpr double kHermitianWarnTol = 1e-9;

namespace detail {

inline double hermitian_defect(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        throw ArgumentError("matrix contains non-finite entries");
}

}  // namespace detail

/// Dense self-adjoint operator on C^dim.
///
/// Construction symmetrizes the input, (A + A^dagger)/2, so small rounding
/// asymmetries from parsers or products are absorbed. Corrections larger than
/// kHermitianWarnTol are logged.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
      std::ostringstream os;
      os << "Hermitian operator needs a square matrix, got " << m.rows() << "x" << m.cols();
      throw ShapeError(os.str());
    }
    if (m.rows() == 0) throw ArgumentError("Hermitian operator of dimension 0");
    detail::require_finite(m);
    const double defect = detail::hermitian_defect(m);
    if (defect > kHermitianWarnTol) {
      std::ostringstream os;
      os << "symmetrizing operator with Hermiticity defect " << defect;
      log(LogLevel::Warning, os.str());
    }
    mat_ = (m + m.adjoint()) * 0.5;
  }

  static HermitianOperator zero(std::size_t dim) {
    return HermitianOperator(ComplexMatrix::Zero(as_index(dim), as_index(dim)));
  }
  static HermitianOperator identity(std::size_t dim) {
    return HermitianOperator(ComplexMatrix::Identity(as_index(dim), as_index(dim)));
  }
  /// Rank-one projector |v><v| / <v|v>.
  static HermitianOperator projector(const ComplexVector& v) {
    const double nrm = v.squaredNorm();
    if (nrm <= 0.0) throw ArgumentError("projector onto the zero vector");
    return HermitianOperator(v * v.adjoint() / nrm);
  }
  static HermitianOperator diagonal(std::span<const double> diag) {
    RealVector d = Eigen::Map<const RealVector>(diag.data(), as_index(diag.size()));
    return HermitianOperator(d.cast<Complex>().asDiagonal().toDenseMatrix());
  }

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  [[nodiscard]] const ComplexMatrix& matrix() const { return mat_; }
  [[nodiscard]] Complex operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }
  [[nodiscard]] double trace() const { return mat_.trace().real(); }

  HermitianOperator& operator+=(const HermitianOperator& o) {
    check_same_dim(o);
    mat_ += o.mat_;
    return *this;
  }
  HermitianOperator& operator-=(const HermitianOperator& o) {
    check_same_dim(o);
    mat_ -= o.mat_;
    return *this;
  }
  HermitianOperator& operator*=(double s) {
    mat_ *= s;
    return *this;
  }
  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }

  static Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

 private:
  void check_same_dim(const HermitianOperator& o) const {
    if (o.dim() != dim()) throw ShapeError("operator dimensions differ");
  }

  ComplexMatrix mat_;
};

/// tr(AB) for Hermitian A, B (always real).
inline double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ShapeError("trace_product: dimension mismatch");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
  return (a.matrix().array() * b.matrix().array().conjugate()).sum().real();
}

/// Largest absolute entry difference.
inline double max_abs_diff(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ShapeError("max_abs_diff: dimension mismatch");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Ordered tensor factors of a composite Hilbert space.
struct TensorFactorization {
  std::vector<std::size_t> factor_dims;

  TensorFactorization() = default;
  explicit TensorFactorization(std::vector<std::size_t> dims) : factor_dims(std::move(dims)) {
    if (factor_dims.empty()) throw ArgumentError("tensor factorization needs at least one factor");
    for (auto d : factor_dims)
      if (d == 0) throw ArgumentError("tensor factor of dimension 0");
  }
  /// n identical factors of dimension d.
  static TensorFactorization uniform(std::size_t d, std::size_t n) {
    return TensorFactorization(std::vector<std::size_t>(n, d));
  }

  [[nodiscard]] std::size_t total_dim() const {
    return std::accumulate(factor_dims.begin(), factor_dims.end(), std::size_t{1}, std::multiplies<>());
  }
  [[nodiscard]] std::size_t size() const { return factor_dims.size(); }
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Kronecker product of the factors in list order.
inline HermitianOperator kron_n(std::span<const HermitianOperator> factors) {
  if (factors.empty()) throw ArgumentError("kron_n: empty factor list");
  ComplexMatrix acc = factors.front().matrix();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = kron(acc, factors[i].matrix());
  return HermitianOperator(acc);
}

inline HermitianOperator kron_n(std::initializer_list<HermitianOperator> factors) {
  return kron_n(std::span<const HermitianOperator>(factors.begin(), factors.size()));
}

/// Reduced operator on the factors listed in `keep`, traced over the rest.
/// Kept factors appear in ascending index order.
inline HermitianOperator partial_trace(const HermitianOperator& op, const TensorFactorization& fact,
                                       std::vector<std::size_t> keep) {
  if (fact.factor_dims.empty()) throw ArgumentError("partial_trace: empty factorization");
  if (op.dim() != fact.total_dim()) {
    std::ostringstream os;
    os << "partial_trace: operator dim " << op.dim() << " != factorization total " << fact.total_dim();
    throw ShapeError(os.str());
  }
  if (keep.empty()) throw ArgumentError("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw ArgumentError("partial_trace: duplicate index in keep set");
  if (keep.back() >= fact.size()) throw ArgumentError("partial_trace: keep index out of range");

  const std::size_t nf = fact.size();
  std::vector<bool> kept(nf, false);
  for (auto k : keep) kept[k] = true;

  // Row-major strides of the full index.
  std::vector<std::size_t> stride(nf, 1);
  for (std::size_t f = nf - 1; f-- > 0;) stride[f] = stride[f + 1] * fact.factor_dims[f + 1];

  std::size_t dk = 1, dt = 1;
  for (std::size_t f = 0; f < nf; ++f) (kept[f] ? dk : dt) *= fact.factor_dims[f];

  // full_index[t * dk + k] enumerates the lattice split into traced/kept parts.
  std::vector<std::size_t> full_index(dk * dt);
  std::vector<std::size_t> digit(nf, 0);
  for (std::size_t full = 0; full < op.dim(); ++full) {
    std::size_t k = 0, t = 0, rem = full;
    for (std::size_t f = 0; f < nf; ++f) {
      digit[f] = rem / stride[f];
      rem %= stride[f];
    }
    for (std::size_t f = 0; f < nf; ++f) {
      if (kept[f])
        k = k * fact.factor_dims[f] + digit[f];
      else
        t = t * fact.factor_dims[f] + digit[f];
    }
    full_index[t * dk + k] = full;
  }

  const auto& m = op.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t t = 0; t < dt; ++t) {
    const std::size_t* row = &full_index[t * dk];
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b)
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            m(static_cast<Eigen::Index>(row[a]), static_cast<Eigen::Index>(row[b]));
  }
  return HermitianOperator(out);
}

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
/// Vectors inside a degenerate cluster are an arbitrary orthonormal basis of it.
struct EigenDecomposition {
  RealVector values;
  ComplexMatrix vectors;
};

inline EigenDecomposition eig_hermitian(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw ArgumentError("eig_hermitian: eigensolver failed");
  const Eigen::Index d = op.matrix().rows();
  EigenDecomposition out{RealVector(d), ComplexMatrix(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values(i) = es.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

/// Raw-matrix entry point: rejects inputs that are not Hermitian within tolerance.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eig_hermitian: matrix not square");
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  const double defect = detail::hermitian_defect(m);
  if (defect > kHermitianInputTol * scale) {
    std::ostringstream os;
    os << "eig_hermitian: input not Hermitian (defect " << defect << ")";
    throw ArgumentError(os.str());
  }
  return eig_hermitian(HermitianOperator(m));
}

inline RealVector eigenvalues(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

inline double operator_norm(const HermitianOperator& op) {
  const RealVector ev = eigenvalues(op);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline double min_eigenvalue(const HermitianOperator& op) {
  const RealVector ev = eigenvalues(op);
  return ev(ev.size() - 1);
}

inline bool is_psd(const HermitianOperator& op, double tol) { return min_eigenvalue(op) >= -tol; }

/// Operator norm of an arbitrary square matrix via its largest singular value.
inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace ncb
