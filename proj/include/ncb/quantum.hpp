#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ncb/hermitian.hpp"

namespace ncb {

/// Tolerance used for state/effect/POVM validity checks.
inline constexpr double kValidityTol = 1e-9;

struct State {
  HermitianOperator op;
  std::string name;

  [[nodiscard]] std::size_t dim() const { return op.dim(); }
};

struct Effect {
  HermitianOperator op;
  std::string name;

  [[nodiscard]] std::size_t dim() const { return op.dim(); }
};

struct Povm {
  std::vector<Effect> effects;
  std::string name;

  [[nodiscard]] std::size_t dim() const { return effects.empty() ? 0 : effects.front().dim(); }
  [[nodiscard]] std::size_t size() const { return effects.size(); }
  [[nodiscard]] const HermitianOperator& operator[](std::size_t k) const { return effects[k].op; }

  [[nodiscard]] HermitianOperator sum() const {
    if (effects.empty()) throw ArgumentError("POVM '" + name + "' has no effects");
    HermitianOperator acc = HermitianOperator::zero(dim());
    for (const auto& e : effects) acc += e.op;
    return acc;
  }
};

/// Builds a POVM from bare operators, naming effects "<name>[k]".
inline Povm make_povm(std::string name, const std::vector<HermitianOperator>& ops) {
  Povm p{{}, std::move(name)};
  for (std::size_t k = 0; k < ops.size(); ++k) p.effects.push_back({ops[k], p.name + "[" + std::to_string(k) + "]"});
  return p;
}

/// Measure-and-prepare model: rho -> sum_l tr(rho G_l) sigma_l.
///
/// With `subtheory` set, the epistemic operators are only required to have
/// unit trace; positivity is then asked of the scenario's statistics alone.
struct NoncontextualModel {
  Povm response;
  std::vector<State> epistemic_states;
  bool subtheory = false;
};

/// Dephasing strength on preparations (mu) and depolarizing visibility on effects (eta).
struct NoiseSetting {
  double mu = 1.0;
  double eta = 1.0;

  NoiseSetting() = default;
  NoiseSetting(double mu_, double eta_) : mu(mu_), eta(eta_) {
    if (!(mu >= 0.0 && mu <= 1.0) || !(eta >= 0.0 && eta <= 1.0))
      throw ArgumentError("noise parameters must lie in [0, 1]");
  }
};

struct Scenario {
  std::size_t dim = 0;
  std::vector<State> preparations;
  std::vector<Povm> measurements;
  std::map<std::string, std::string> metadata;

  /// Flat list of (measurement index, outcome index) over all effects.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> effect_index() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t m = 0; m < measurements.size(); ++m)
      for (std::size_t k = 0; k < measurements[m].size(); ++k) out.emplace_back(m, k);
    return out;
  }
  [[nodiscard]] std::vector<const Effect*> effects() const {
    std::vector<const Effect*> out;
    for (const auto& m : measurements)
      for (const auto& e : m.effects) out.push_back(&e);
    return out;
  }
};

namespace detail {
inline void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ShapeError(os.str());
  }
}
}  // namespace detail

/// Born probability tr(rho E), clamped to [0, 1].
///
/// Values within kValidityTol outside [0, 1] are clamped (and logged at debug
/// level); anything further out indicates an invalid state or effect.
inline double born(const State& state, const Effect& effect) {
  detail::require_dim(state.dim(), effect.dim(), "born");
  const double p = trace_product(state.op, effect.op);
  if (p < -kValidityTol || p > 1.0 + kValidityTol) {
    std::ostringstream os;
    os << "born: probability " << p << " for (" << state.name << ", " << effect.name << ") outside [0,1]";
    throw ArgumentError(os.str());
  }
  if (p < 0.0 || p > 1.0) {
    std::ostringstream os;
    os << "born: clamping " << p << " for (" << state.name << ", " << effect.name << ")";
    log(LogLevel::Debug, os.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Dephasing in the computational basis: mu rho + (1 - mu) diag(rho).
inline State apply_noise(const State& s, const NoiseSetting& noise) {
  if (s.dim() != 2) throw UnsupportedDimension("dephasing channel is only defined for qubits");
  ComplexMatrix m = s.op.matrix();
  m(0, 1) *= noise.mu;
  m(1, 0) *= noise.mu;
  return {HermitianOperator(m), s.name};
}

/// Depolarizing in the Heisenberg picture: eta E + (1 - eta) tr(E) I/2.
/// For unit-trace effects this is eta E + (1 - eta) I/2.
inline Effect apply_noise(const Effect& e, const NoiseSetting& noise) {
  if (e.dim() != 2) throw UnsupportedDimension("depolarizing channel is only defined for qubits");
  const HermitianOperator mixed = (0.5 * e.op.trace()) * HermitianOperator::identity(2);
  return {noise.eta * e.op + (1.0 - noise.eta) * mixed, e.name};
}

inline Povm apply_noise(const Povm& p, const NoiseSetting& noise) {
  Povm out{{}, p.name};
  for (const auto& e : p.effects) out.effects.push_back(apply_noise(e, noise));
  return out;
}

/// Noise applied to every preparation and effect of a qubit scenario.
inline Scenario apply_noise(const Scenario& sc, const NoiseSetting& noise) {
  Scenario out = sc;
  for (auto& s : out.preparations) s = apply_noise(s, noise);
  for (auto& m : out.measurements) m = apply_noise(m, noise);
  return out;
}

/// Heisenberg picture of the measure-and-prepare channel: sum_l tr(sigma_l a) G_l.
inline HermitianOperator mp_heisenberg(const NoncontextualModel& model, const HermitianOperator& a) {
  if (model.response.size() != model.epistemic_states.size())
    throw ArgumentError("mp_heisenberg: response and epistemic lists differ in length");
  if (model.response.size() == 0) throw ArgumentError("mp_heisenberg: empty model");
  detail::require_dim(model.response.dim(), a.dim(), "mp_heisenberg");
  HermitianOperator out = HermitianOperator::zero(a.dim());
  for (std::size_t l = 0; l < model.response.size(); ++l) {
    detail::require_dim(model.epistemic_states[l].dim(), a.dim(), "mp_heisenberg");
    out += trace_product(model.epistemic_states[l].op, a) * model.response[l];
  }
  return out;
}

/// sum_l tr(rho G_l) tr(sigma_l M_k).
inline double ontological_probability(const NoncontextualModel& model, const State& state, const Povm& povm,
                                      std::size_t outcome) {
  if (outcome >= povm.size()) throw ArgumentError("ontological_probability: outcome index out of range");
  if (model.response.size() != model.epistemic_states.size())
    throw ArgumentError("ontological_probability: response and epistemic lists differ in length");
  detail::require_dim(state.dim(), povm.dim(), "ontological_probability");
  detail::require_dim(state.dim(), model.response.dim(), "ontological_probability");
  double p = 0.0;
  for (std::size_t l = 0; l < model.response.size(); ++l)
    p += trace_product(state.op, model.response[l]) * trace_product(model.epistemic_states[l].op, povm[outcome]);
  return p;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  EmptyScenario,
  DimensionMismatch,
  StatePositivity,
  StateTrace,
  EffectPositivity,
  EffectUpperBound,
  PovmNormalization,
  EmptyPovm,
  ModelShape,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::EmptyScenario: return "empty_scenario";
    case ViolationKind::DimensionMismatch: return "dimension_mismatch";
    case ViolationKind::StatePositivity: return "state_positivity";
    case ViolationKind::StateTrace: return "state_trace";
    case ViolationKind::EffectPositivity: return "effect_positivity";
    case ViolationKind::EffectUpperBound: return "effect_upper_bound";
    case ViolationKind::PovmNormalization: return "povm_normalization";
    case ViolationKind::EmptyPovm: return "empty_povm";
    case ViolationKind::ModelShape: return "model_shape";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::string subject;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string summary() const {
    std::ostringstream os;
    for (const auto& v : violations) os << to_string(v.kind) << " in '" << v.subject << "' (residual " << v.residual << ")\n";
    return os.str();
  }
};

namespace detail {

inline void check_state(const State& s, std::size_t dim, ValidationReport& rep) {
  if (s.dim() != dim) {
    rep.violations.push_back({ViolationKind::DimensionMismatch, s.name, std::abs(double(s.dim()) - double(dim))});
    return;
  }
  const double lo = min_eigenvalue(s.op);
  if (lo < -kValidityTol) rep.violations.push_back({ViolationKind::StatePositivity, s.name, -lo});
  const double tr_err = std::abs(s.op.trace() - 1.0);
  if (tr_err > kValidityTol) rep.violations.push_back({ViolationKind::StateTrace, s.name, tr_err});
}

inline void check_effect(const Effect& e, std::size_t dim, ValidationReport& rep) {
  if (e.dim() != dim) {
    rep.violations.push_back({ViolationKind::DimensionMismatch, e.name, std::abs(double(e.dim()) - double(dim))});
    return;
  }
  const RealVector ev = eigenvalues(e.op);
  if (ev(ev.size() - 1) < -kValidityTol)
    rep.violations.push_back({ViolationKind::EffectPositivity, e.name, -ev(ev.size() - 1)});
  if (ev(0) > 1.0 + kValidityTol) rep.violations.push_back({ViolationKind::EffectUpperBound, e.name, ev(0) - 1.0});
}

inline void check_povm(const Povm& p, std::size_t dim, ValidationReport& rep) {
  if (p.effects.empty()) {
    rep.violations.push_back({ViolationKind::EmptyPovm, p.name, 0.0});
    return;
  }
  bool dims_ok = true;
  for (const auto& e : p.effects) {
    check_effect(e, dim, rep);
    dims_ok = dims_ok && e.dim() == dim;
  }
  if (!dims_ok) return;
  const double resid = operator_norm(p.sum() - HermitianOperator::identity(dim));
  if (resid > kValidityTol) rep.violations.push_back({ViolationKind::PovmNormalization, p.name, resid});
}

}  // namespace detail

/// Lists every invariant violation of the scenario; empty iff valid.
inline ValidationReport validate(const Scenario& sc) {
  ValidationReport rep;
  if (sc.dim == 0) rep.violations.push_back({ViolationKind::EmptyScenario, "dim", 0.0});
  if (sc.preparations.empty()) rep.violations.push_back({ViolationKind::EmptyScenario, "preparations", 0.0});
  if (sc.measurements.empty()) rep.violations.push_back({ViolationKind::EmptyScenario, "measurements", 0.0});
  if (sc.dim == 0) return rep;
  for (const auto& s : sc.preparations) detail::check_state(s, sc.dim, rep);
  for (const auto& m : sc.measurements) detail::check_povm(m, sc.dim, rep);
  return rep;
}

inline ValidationReport validate(const Povm& p) {
  ValidationReport rep;
  detail::check_povm(p, p.dim(), rep);
  return rep;
}

inline ValidationReport validate(const NoncontextualModel& model) {
  ValidationReport rep;
  if (model.response.size() != model.epistemic_states.size() || model.response.size() == 0) {
    rep.violations.push_back({ViolationKind::ModelShape, model.response.name,
                              std::abs(double(model.response.size()) - double(model.epistemic_states.size()))});
    return rep;
  }
  const std::size_t dim = model.response.dim();
  if (!model.subtheory) {
    detail::check_povm(model.response, dim, rep);
    for (const auto& s : model.epistemic_states) detail::check_state(s, dim, rep);
  } else {
    for (const auto& s : model.epistemic_states) {
      const double tr_err = std::abs(s.op.trace() - 1.0);
      if (tr_err > kValidityTol) rep.violations.push_back({ViolationKind::StateTrace, s.name, tr_err});
    }
  }
  return rep;
}

}  // namespace ncb
