#pragma once

#include <cmath>
#include <vector>

#include "ncb/hermitian.hpp"

namespace ncb {

/// One nonzero entry of a sparse basis element.
struct BasisEntry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

/// Orthonormal basis of the real space of Hermitian d x d matrices under
/// <X, Y> = tr(XY): generalized Gell-Mann matrices preceded by I/sqrt(d).
///
/// Fixed ordering:
///   0                      I / sqrt(d)
///   1 .. d-1               diagonal elements D_l, l = 1..d-1
///   d .. d + p - 1         symmetric (E_jk + E_kj)/sqrt(2), j < k row-major
///   d + p .. d^2 - 1       antisymmetric (-i E_jk + i E_kj)/sqrt(2), j < k
/// with p = d(d-1)/2. Coordinates are computed in O(d^2) directly from the
/// matrix entries, so the elements are only materialized on request.
class HermitianBasis {
 public:
  explicit HermitianBasis(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ArgumentError("HermitianBasis: dimension 0");
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return dim_ * dim_; }

  /// Sparse entries of basis element `index`.
  [[nodiscard]] std::vector<BasisEntry> entries(std::size_t index) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    std::vector<BasisEntry> out;
    if (index >= size()) throw ArgumentError("HermitianBasis: index out of range");
    if (index == 0) {
      const double v = 1.0 / std::sqrt(static_cast<double>(dim_));
      for (Eigen::Index i = 0; i < d; ++i) out.push_back({i, i, v});
      return out;
    }
    if (index < dim_) {
      const auto l = static_cast<Eigen::Index>(index);
      const double norm = std::sqrt(static_cast<double>(l * (l + 1)));
      for (Eigen::Index j = 0; j < l; ++j) out.push_back({j, j, 1.0 / norm});
      out.push_back({l, l, -static_cast<double>(l) / norm});
      return out;
    }
    const std::size_t pairs = dim_ * (dim_ - 1) / 2;
    const bool symmetric = index < dim_ + pairs;
    const auto [j, k] = pair_at(symmetric ? index - dim_ : index - dim_ - pairs);
    const double r = 1.0 / std::sqrt(2.0);
    if (symmetric) {
      out.push_back({j, k, r});
      out.push_back({k, j, r});
    } else {
      out.push_back({j, k, Complex(0.0, -r)});
      out.push_back({k, j, Complex(0.0, r)});
    }
    return out;
  }

  [[nodiscard]] HermitianOperator element(std::size_t index) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (const auto& e : entries(index)) m(e.row, e.col) += e.value;
    return HermitianOperator(m);
  }

  [[nodiscard]] std::vector<HermitianOperator> elements() const {
    std::vector<HermitianOperator> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(element(i));
    return out;
  }

  /// Coordinates of an arbitrary square matrix's Hermitian part.
  [[nodiscard]] RealVector coords(const ComplexMatrix& m) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    if (m.rows() != d || m.cols() != d) throw ShapeError("coordinatize: dimension mismatch");
    RealVector c(d * d);
    double trace = 0.0;
    double prefix = 0.0;
    for (Eigen::Index l = 0; l < d; ++l) {
      const double diag = m(l, l).real();
      trace += diag;
      if (l > 0) c(l) = (prefix - static_cast<double>(l) * diag) / std::sqrt(static_cast<double>(l * (l + 1)));
      prefix += diag;
    }
    c(0) = trace / std::sqrt(static_cast<double>(d));
    const Eigen::Index pairs = d * (d - 1) / 2;
    const double s2 = std::sqrt(2.0);
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = j + 1; k < d; ++k, ++p) {
        // Average of (j,k) and conj(k,j) so non-Hermitian input projects cleanly.
        const Complex v = 0.5 * (m(j, k) + std::conj(m(k, j)));
        c(d + p) = s2 * v.real();
        c(d + pairs + p) = -s2 * v.imag();
      }
    return c;
  }

  [[nodiscard]] ComplexMatrix matrix(const RealVector& c) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    if (c.size() != d * d) throw ShapeError("decoordinatize: coordinate length mismatch");
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const double base = c(0) / std::sqrt(static_cast<double>(d));
    // Diagonal: D_l contributes 1/norm on j < l and -l/norm on j = l.
    double tail = 0.0;  // sum over l > j of c_l / norm_l
    std::vector<double> diag(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index j = d - 1; j >= 0; --j) {
      double v = base + tail;
      if (j > 0) {
        const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
        v -= static_cast<double>(j) * c(j) / norm;
        tail += c(j) / norm;
      }
      diag[static_cast<std::size_t>(j)] = v;
    }
    for (Eigen::Index j = 0; j < d; ++j) m(j, j) = diag[static_cast<std::size_t>(j)];
    const Eigen::Index pairs = d * (d - 1) / 2;
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = j + 1; k < d; ++k, ++p) {
        const Complex v(c(d + p) * r, -c(d + pairs + p) * r);
        m(j, k) = v;
        m(k, j) = std::conj(v);
      }
    return m;
  }

 private:
  [[nodiscard]] std::pair<Eigen::Index, Eigen::Index> pair_at(std::size_t p) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    auto rem = static_cast<Eigen::Index>(p);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::Index row_len = d - 1 - j;
      if (rem < row_len) return {j, j + 1 + rem};
      rem -= row_len;
    }
    throw ArgumentError("HermitianBasis: pair index out of range");
  }

  std::size_t dim_;
};

inline RealVector coordinatize(const HermitianOperator& op, const HermitianBasis& basis) {
  if (op.dim() != basis.dim()) throw ShapeError("coordinatize: dimension mismatch");
  return basis.coords(op.matrix());
}

inline HermitianOperator decoordinatize(const RealVector& coords, const HermitianBasis& basis) {
  return HermitianOperator(basis.matrix(coords));
}

}  // namespace ncb
