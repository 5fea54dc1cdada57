#pragma once

#include <random>

#include "ncb/ncb.hpp"

namespace ncb::testing {

using Rng = std::mt19937_64;

inline ComplexMatrix ginibre(std::size_t d, Rng& rng) {
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline HermitianOperator random_hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, rng);
  return HermitianOperator(0.5 * (g + g.adjoint()));
}

inline HermitianOperator random_density(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, rng);
  const ComplexMatrix r = g * g.adjoint();
  return HermitianOperator(r / r.trace().real());
}

inline ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, rng));
  return qr.householderQ();
}

inline ComplexVector random_unit_vector(std::size_t d, Rng& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v.normalized();
}

/// Effect with spectrum drawn uniformly from [0, 1].
inline HermitianOperator random_effect(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ComplexMatrix q = random_unitary(d, rng);
  Eigen::VectorXd ev(static_cast<Eigen::Index>(d));
  for (auto& x : ev) x = u(rng);
  return HermitianOperator(q * ev.cast<Complex>().asDiagonal() * q.adjoint());
}

inline State as_state(const HermitianOperator& op, std::string name = "rho") { return {op, std::move(name)}; }

inline HermitianOperator ket_projector(const ComplexVector& v) { return HermitianOperator::projector(v); }

inline ComplexVector plus_ket() { return (basis_ket(2, 0) + basis_ket(2, 1)) / std::sqrt(2.0); }

}  // namespace ncb::testing
