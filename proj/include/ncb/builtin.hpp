#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ncb/quantum.hpp"

namespace ncb {

// ---------------------------------------------------------------------------
// Elementary operators

inline HermitianOperator pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator(m);
}

inline HermitianOperator pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOperator(m);
}

inline HermitianOperator pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator(m);
}

/// 1/2 (I + x X + y Y + z Z)
inline HermitianOperator bloch_operator(double x, double y, double z) {
  return 0.5 * (HermitianOperator::identity(2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
}

inline ComplexVector basis_ket(std::size_t dim, std::size_t i) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

inline HermitianOperator basis_projector(std::size_t dim, std::size_t i) {
  return HermitianOperator::projector(basis_ket(dim, i));
}

/// Projective measurement in the computational basis.
inline Povm computational_pvm(std::size_t dim) {
  std::vector<HermitianOperator> ops;
  for (std::size_t i = 0; i < dim; ++i) ops.push_back(basis_projector(dim, i));
  return make_povm("Z" + std::to_string(dim), ops);
}

/// Informationally complete pure-state set: |i>, (|i>+|j>)/sqrt2, (|i>+i|j>)/sqrt2.
inline std::vector<State> tomographic_states(std::size_t dim) {
  std::vector<State> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back({basis_projector(dim, i), "k" + std::to_string(i)});
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const auto tag = std::to_string(i) + std::to_string(j);
      out.push_back({HermitianOperator::projector(basis_ket(dim, i) + basis_ket(dim, j)), "re" + tag});
      out.push_back({HermitianOperator::projector(basis_ket(dim, i) + Complex(0, 1) * basis_ket(dim, j)), "im" + tag});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Six qubit preparations/effects on the x-z plane, 60 degrees apart, with
// dephasing on the preparations and depolarizing on the effects.

/// Bloch vectors (x, z) of sigma_{t,b} = M_{t,b}, t = 1..3, b = 0..1.
inline std::array<std::array<std::array<double, 2>, 2>, 3> mazurek_bloch() {
  const double h = std::sqrt(3.0) / 2.0;
  return {{{{{0.0, 1.0}, {0.0, -1.0}}},
           {{{h, -0.5}, {-h, 0.5}}},
           {{{-h, -0.5}, {h, 0.5}}}}};
}

inline Scenario mazurek_scenario(std::optional<NoiseSetting> noise = std::nullopt) {
  Scenario sc;
  sc.dim = 2;
  const auto bloch = mazurek_bloch();
  for (std::size_t t = 0; t < 3; ++t) {
    Povm m{{}, "M" + std::to_string(t + 1)};
    for (std::size_t b = 0; b < 2; ++b) {
      const auto op = bloch_operator(bloch[t][b][0], 0.0, bloch[t][b][1]);
      const auto tag = std::to_string(t + 1) + "," + std::to_string(b);
      sc.preparations.push_back({op, "sigma_" + tag});
      m.effects.push_back({op, "M_" + tag});
    }
    sc.measurements.push_back(std::move(m));
  }
  sc.metadata["example"] = "mazurek";
  if (noise) {
    sc = apply_noise(sc, *noise);
    sc.metadata["mu"] = std::to_string(noise->mu);
    sc.metadata["eta"] = std::to_string(noise->eta);
  }
  return sc;
}

/// Closed-form value of sum_{t,b} tr(P_mu(sigma_{t,b}) D_eta(M_{t,b})).
inline double mazurek_inequality_closed_form(double mu, double eta) { return 3.0 + 1.5 * eta * (1.0 + mu); }

/// Visibility above which the six-term inequality (bound 5) is violated.
inline double mazurek_boundary(double mu) { return 4.0 / (3.0 * (1.0 + mu)); }

// ---------------------------------------------------------------------------
// Qubit SIC-POVM

inline std::array<ComplexVector, 4> sic_qubit_vectors() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  std::array<ComplexVector, 4> v;
  for (auto& x : v) x = ComplexVector(2);
  v[0] << 1.0, 0.0;
  for (int k = 1; k <= 3; ++k) v[static_cast<std::size_t>(k)] << a, b * std::polar(1.0, 2.0 * std::numbers::pi * (k - 1) / 3.0);
  return v;
}

/// E_i = 1/2 |phi_i><phi_i|
inline Povm sic_qubit_povm() {
  std::vector<HermitianOperator> ops;
  for (const auto& v : sic_qubit_vectors()) ops.push_back(0.5 * HermitianOperator::projector(v));
  return make_povm("SIC", ops);
}

/// SIC measurement with the four SIC states and the six Pauli eigenstates as preparations.
inline Scenario sic_qubit_scenario() {
  Scenario sc;
  sc.dim = 2;
  const auto v = sic_qubit_vectors();
  for (std::size_t i = 0; i < 4; ++i) sc.preparations.push_back({HermitianOperator::projector(v[i]), "phi" + std::to_string(i + 1)});
  const std::array<std::array<double, 3>, 6> axes{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  const std::array<const char*, 6> names{"+x", "-x", "+y", "-y", "+z", "-z"};
  for (std::size_t i = 0; i < 6; ++i) sc.preparations.push_back({bloch_operator(axes[i][0], axes[i][1], axes[i][2]), names[i]});
  sc.measurements.push_back(sic_qubit_povm());
  sc.metadata["example"] = "sic_qubit";
  return sc;
}

/// Map table of the 1 -> n pseudo-broadcasting map
///   Xi_n(rho) = sum_i tr(E_i rho) (3|phi_i><phi_i| - I)^{(x) n},
/// stored as W = sum_i E_i (x) (3|phi_i><phi_i| - I)^{(x) n} so that
/// tr(W [rho (x) A_1 (x) ... (x) A_n]) = tr(Xi_n(rho) A_1 (x) ... (x) A_n).
/// Not completely positive.
inline HermitianOperator sic_xi(std::size_t n) {
  if (n < 1) throw ArgumentError("sic_xi: n must be >= 1");
  const auto v = sic_qubit_vectors();
  const Povm sic = sic_qubit_povm();
  const std::size_t out_dim = std::size_t{1} << (n + 1);
  HermitianOperator w = HermitianOperator::zero(out_dim);
  for (std::size_t i = 0; i < 4; ++i) {
    const HermitianOperator leg = 3.0 * HermitianOperator::projector(v[i]) - HermitianOperator::identity(2);
    std::vector<HermitianOperator> factors{sic[i]};
    for (std::size_t k = 0; k < n; ++k) factors.push_back(leg);
    w += kron_n(factors);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Five-dimensional non-commutative norm-1 POVM

inline Povm norm1_example(double a) {
  if (!(a > 0.0 && a < 1.0)) throw ArgumentError("norm1_example: a must lie in (0, 1)");
  constexpr std::size_t d = 5;
  const ComplexVector plus = (basis_ket(d, 0) + basis_ket(d, 1)) / std::sqrt(2.0);
  const ComplexVector minus = (basis_ket(d, 0) - basis_ket(d, 1)) / std::sqrt(2.0);
  const auto p = [](std::size_t i) { return basis_projector(d, i); };
  return make_povm("E", {
      p(2) + a * p(0) + (1.0 - a) * HermitianOperator::projector(plus),
      p(3) + a * p(1),
      p(4) + (1.0 - a) * HermitianOperator::projector(minus),
  });
}

/// Model with sigma_z = |z+1><z+1| and response {E_z}: Lambda*(A) = sum_z <z+1|A|z+1> E_z.
inline NoncontextualModel norm1_example_model(double a) {
  NoncontextualModel m{norm1_example(a), {}, false};
  for (std::size_t z = 0; z < 3; ++z) m.epistemic_states.push_back({basis_projector(5, z + 2), "k" + std::to_string(z + 2)});
  return m;
}

// ---------------------------------------------------------------------------
// Non-commuting, non-disturbing binary qutrit pair

inline std::pair<Povm, Povm> qutrit_nondisturb_pair() {
  constexpr std::size_t d = 3;
  ComplexMatrix a1 = ComplexMatrix::Zero(3, 3);
  a1(0, 0) = 2.0;
  a1(2, 2) = 1.0;
  a1(0, 2) = a1(2, 0) = std::sqrt(2.0);
  a1 /= 4.0;
  ComplexMatrix b1 = ComplexMatrix::Zero(3, 3);
  b1(0, 0) = 2.0;
  b1(2, 2) = 1.0;
  b1 /= 2.0;
  const auto id = HermitianOperator::identity(d);
  const HermitianOperator A1(a1), B1(b1);
  return {make_povm("A", {A1, id - A1}), make_povm("B", {B1, id - B1})};
}

inline Scenario qutrit_nondisturb_scenario() {
  Scenario sc;
  sc.dim = 3;
  sc.preparations = tomographic_states(3);
  auto [a, b] = qutrit_nondisturb_pair();
  sc.measurements = {a, b};
  sc.metadata["example"] = "qutrit_nondisturb";
  return sc;
}

// ---------------------------------------------------------------------------
// Name-based dispatch

struct ExampleParams {
  double a = 0.5;
  std::size_t n = 2;
  std::optional<NoiseSetting> noise;
};

using ExampleObject = std::variant<Scenario, Povm, NoncontextualModel, HermitianOperator>;

/// "mazurek", "sic_qubit", "norm1_example", "norm1_model", "qutrit_nondisturb", "sic_xi".
inline ExampleObject build_example(std::string_view name, const ExampleParams& params = {}) {
  if (name == "mazurek") return mazurek_scenario(params.noise);
  if (name == "sic_qubit") return sic_qubit_scenario();
  if (name == "norm1_example") return norm1_example(params.a);
  if (name == "norm1_model") return norm1_example_model(params.a);
  if (name == "qutrit_nondisturb") return qutrit_nondisturb_scenario();
  if (name == "sic_xi") {
    if (params.n < 1) throw ArgumentError("sic_xi: n must be >= 1");
    return sic_xi(params.n);
  }
  throw ArgumentError("unknown example '" + std::string(name) + "'");
}

}  // namespace ncb
