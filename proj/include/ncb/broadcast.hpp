#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ncb/conic.hpp"
#include "ncb/quantum.hpp"

namespace ncb {

inline constexpr std::size_t kDefaultDimCap = 64;
inline constexpr std::size_t kDefaultMaxLegs = 4;

struct AssemblyOptions {
  bool include_tp = true;
  std::size_t dim_cap = kDefaultDimCap;
};

namespace detail {

inline std::size_t checked_total_dim(std::size_t d, std::size_t n, std::size_t cap) {
  if (n < 1) throw ArgumentError("number of output legs must be >= 1");
  std::size_t total = d;
  for (std::size_t i = 0; i < n; ++i) {
    total *= d;
    if (total > cap) {
      throw SizeError("operator dimension " + std::to_string(d) + "^" + std::to_string(n + 1) + " exceeds cap " +
                      std::to_string(cap));
    }
  }
  return total;
}

/// Mixed-radix enumeration of all tuples in [0, base)^len.
inline bool next_tuple(std::vector<int>& t, int base) {
  for (auto i = t.size(); i-- > 0;) {
    if (++t[i] < base) return true;
    t[i] = 0;
  }
  return false;
}

struct RowBuilder {
  HermitianBasis basis;
  std::vector<RealVector> rows;
  std::vector<double> rhs;
  std::vector<ConstraintLabel> labels;

  explicit RowBuilder(std::size_t dim) : basis(dim) {}

  void add(const ComplexMatrix& k, double c, ConstraintLabel label) {
    rows.push_back(basis.coords(k));
    rhs.push_back(c);
    labels.push_back(std::move(label));
  }

  [[nodiscard]] RealMatrix matrix() const {
    RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
  }
  [[nodiscard]] RealVector vector() const {
    return Eigen::Map<const RealVector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  }
};

inline ComplexMatrix kron_chain(const std::vector<const ComplexMatrix*>& f) {
  ComplexMatrix out = *f.front();
  for (std::size_t i = 1; i < f.size(); ++i) out = kron(out, *f[i]);
  return out;
}

}  // namespace detail

/// 1 -> n pseudo-broadcasting program for a scenario.
///
/// Variable: Hermitian W on d^(n+1) (leg 0 = preparation, contracted without
/// transpose). For every preparation rho_t:
///   tr(W [rho_t (x) M_e1 (x) ... (x) M_en]) >= 0     all effect tuples
///   tr(W [rho_t (x) I .. M_e .. I]) = tr(rho_t M_e)    every effect and leg
///   tr(W [rho_t (x) I^(x)n]) = 1                       (include_tp)
inline ConicProblem assemble_pseudo(const Scenario& scenario, std::size_t n, std::optional<NoiseSetting> noise = std::nullopt,
                                    const AssemblyOptions& opts = {}) {
  const Scenario sc = noise ? apply_noise(scenario, *noise) : scenario;
  if (sc.preparations.empty() || sc.measurements.empty())
    throw ArgumentError("scenario needs at least one preparation and one measurement");
  const std::size_t d = sc.dim;
  const std::size_t D = detail::checked_total_dim(d, n, opts.dim_cap);
  const std::vector<const Effect*> effects = sc.effects();
  const int ne = static_cast<int>(effects.size());
  const ComplexMatrix id = ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

  detail::RowBuilder nn(D), eq(D);
  for (std::size_t t = 0; t < sc.preparations.size(); ++t) {
    const ComplexMatrix& rho = sc.preparations[t].op.matrix();
    std::vector<int> tuple(n, 0);
    do {
      std::vector<const ComplexMatrix*> f{&rho};
      for (int e : tuple) f.push_back(&effects[static_cast<std::size_t>(e)]->op.matrix());
      nn.add(detail::kron_chain(f), 0.0, {ConstraintKind::Positivity, static_cast<int>(t), tuple, -1});
    } while (detail::next_tuple(tuple, ne));

    for (int e = 0; e < ne; ++e) {
      const double p = trace_product(sc.preparations[t].op, effects[static_cast<std::size_t>(e)]->op);
      for (std::size_t leg = 0; leg < n; ++leg) {
        std::vector<const ComplexMatrix*> f{&rho};
        for (std::size_t k = 0; k < n; ++k) f.push_back(k == leg ? &effects[static_cast<std::size_t>(e)]->op.matrix() : &id);
        eq.add(detail::kron_chain(f), p, {ConstraintKind::Marginal, static_cast<int>(t), {e}, static_cast<int>(leg)});
      }
    }
    if (opts.include_tp) {
      std::vector<const ComplexMatrix*> f{&rho};
      for (std::size_t k = 0; k < n; ++k) f.push_back(&id);
      eq.add(detail::kron_chain(f), 1.0, {ConstraintKind::TraceNormalization, static_cast<int>(t), {}, -1});
    }
  }

  ConicProblem p;
  p.variable_dim = D * D;
  p.operator_dim = D;
  p.equalities = eq.matrix();
  p.rhs = eq.vector();
  p.nonnegatives = nn.matrix();
  p.equality_labels = std::move(eq.labels);
  p.nonnegative_labels = std::move(nn.labels);
  return p;
}

/// Input states for the CP broadcast program: every operator, or span(T).
struct FullStateSpace {};
/// Every Hermitian observable on a leg (a Hermitian basis stands in for it).
struct FullObservableAlgebra {};

using StateSpec = std::variant<FullStateSpace, std::vector<State>>;
using MeasurementSet = std::variant<FullObservableAlgebra, std::vector<Povm>>;

/// 1 -> n broadcasting program for a channel Lambda: L(C^d) -> L(C^d^(x)n).
///
/// Variable: Choi operator J = sum_ij |i><j| (x) Lambda(|i><j|), required PSD.
///   tr(J [B (x) I]) = tr(B)                     trace preservation, B over a Hermitian basis
///   tr(J [rho^T (x) I .. A .. I]) = tr(A rho)   each leg, each A in that leg's set
/// rho runs over a Hermitian basis (FullStateSpace) or the given states.
/// A single measurement set is applied to every leg.
inline ConicProblem assemble_broadcast(const StateSpec& states, const std::vector<MeasurementSet>& measurement_sets,
                                       std::size_t n, const AssemblyOptions& opts = {}) {
  if (n > kDefaultMaxLegs) throw SizeError("at most " + std::to_string(kDefaultMaxLegs) + " output legs supported");
  if (measurement_sets.size() != 1 && measurement_sets.size() != n)
    throw ArgumentError("measurement_sets must have one entry or one per output leg");

  // Determine d from whatever carries a dimension.
  std::optional<std::size_t> dim;
  if (const auto* list = std::get_if<std::vector<State>>(&states)) {
    if (list->empty()) throw ArgumentError("state list is empty");
    dim = list->front().op.dim();
    for (const auto& s : *list) detail::require_dim(s.op.dim(), *dim, "assemble_broadcast");
  }
  for (const auto& ms : measurement_sets)
    if (const auto* povms = std::get_if<std::vector<Povm>>(&ms)) {
      if (povms->empty()) throw ArgumentError("measurement set is empty");
      for (const auto& m : *povms) {
        if (!dim) dim = m.dim();
        detail::require_dim(m.dim(), *dim, "assemble_broadcast");
      }
    }
  if (!dim) throw ArgumentError("cannot infer dimension: full state space with full observable algebra");
  const std::size_t d = *dim;
  const std::size_t D = detail::checked_total_dim(d, n, opts.dim_cap);
  const HermitianBasis small(d);
  const ComplexMatrix id = ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

  std::vector<ComplexMatrix> inputs;
  if (std::holds_alternative<FullStateSpace>(states)) {
    for (std::size_t i = 0; i < small.size(); ++i) inputs.push_back(small.element(i).matrix());
  } else {
    for (const auto& s : std::get<std::vector<State>>(states)) inputs.push_back(s.op.matrix());
  }

  detail::RowBuilder eq(D);
  {
    const ComplexMatrix out_id = ComplexMatrix::Identity(static_cast<Eigen::Index>(D / d), static_cast<Eigen::Index>(D / d));
    for (std::size_t i = 0; i < small.size(); ++i) {
      const ComplexMatrix b = small.element(i).matrix();
      eq.add(kron(b.transpose(), out_id), b.trace().real(), {ConstraintKind::TraceNormalization, static_cast<int>(i), {}, -1});
    }
  }
  for (std::size_t leg = 0; leg < n; ++leg) {
    const MeasurementSet& ms = measurement_sets.size() == 1 ? measurement_sets.front() : measurement_sets[leg];
    std::vector<ComplexMatrix> observables;
    if (std::holds_alternative<FullObservableAlgebra>(ms)) {
      for (std::size_t i = 0; i < small.size(); ++i) observables.push_back(small.element(i).matrix());
    } else {
      for (const auto& m : std::get<std::vector<Povm>>(ms))
        for (const auto& e : m.effects) observables.push_back(e.op.matrix());
    }
    for (std::size_t r = 0; r < inputs.size(); ++r) {
      const ComplexMatrix rt = inputs[r].transpose();
      for (std::size_t a = 0; a < observables.size(); ++a) {
        std::vector<const ComplexMatrix*> f{&rt};
        for (std::size_t k = 0; k < n; ++k) f.push_back(k == leg ? &observables[a] : &id);
        const double target = (observables[a] * inputs[r]).trace().real();
        eq.add(detail::kron_chain(f), target,
               {ConstraintKind::Marginal, static_cast<int>(r), {static_cast<int>(a)}, static_cast<int>(leg)});
      }
    }
  }

  ConicProblem p;
  p.variable_dim = D * D;
  p.operator_dim = D;
  p.psd_block = D;
  p.equalities = eq.matrix();
  p.rhs = eq.vector();
  p.nonnegatives = RealMatrix(0, static_cast<Eigen::Index>(D * D));
  p.equality_labels = std::move(eq.labels);
  return p;
}

// ---------------------------------------------------------------------------
// Map representations

/// Partial transpose on leg 0 of an operator on d (x) rest.
inline HermitianOperator transpose_first_leg(const HermitianOperator& op, std::size_t d) {
  const auto D = static_cast<Eigen::Index>(op.dim());
  const auto dd = static_cast<Eigen::Index>(d);
  if (d == 0 || D % dd != 0) throw ShapeError("first leg dimension does not divide operator dimension");
  const Eigen::Index rest = D / dd;
  ComplexMatrix out(D, D);
  for (Eigen::Index i = 0; i < dd; ++i)
    for (Eigen::Index j = 0; j < dd; ++j) out.block(j * rest, i * rest, rest, rest) = op.matrix().block(i * rest, j * rest, rest, rest);
  return HermitianOperator(out);
}

/// Map table W with tr(W [rho (x) A]) = tr(Lambda(rho) A), from the Choi operator of Lambda.
inline HermitianOperator pseudo_table_from_choi(const HermitianOperator& choi, std::size_t d) {
  return transpose_first_leg(choi, d);
}

inline HermitianOperator choi_from_pseudo_table(const HermitianOperator& table, std::size_t d) {
  return transpose_first_leg(table, d);
}

/// sum_i |i><i|^(x)(n+1): the classical copy map rho -> sum_i <i|rho|i> |i..i><i..i|.
/// Invariant under leg-0 transpose, so it serves as both Choi operator and map table.
inline HermitianOperator classical_copy_operator(std::size_t d, std::size_t n) {
  const std::size_t D = detail::checked_total_dim(d, n, std::numeric_limits<std::size_t>::max() / 4);
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  // index of |i,i,...,i> in base d is i * (d^(n+1) - 1) / (d - 1), or 0 for d = 1.
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t idx = d == 1 ? 0 : i * ((D - 1) / (d - 1));
    m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return HermitianOperator(m);
}

/// Coordinates of an operator in the variable space of an assembled problem.
inline RealVector operator_coordinates(const ConicProblem& problem, const HermitianOperator& op) {
  if (!problem.operator_dim || *problem.operator_dim != op.dim()) throw ShapeError("operator does not match problem variable");
  return HermitianBasis(op.dim()).coords(op.matrix());
}

/// Largest constraint violation of a candidate map operator.
inline double constraint_residual(const ConicProblem& problem, const HermitianOperator& op) {
  return primal_residual(problem, operator_coordinates(problem, op));
}

/// Traces out the last output leg of an operator on d^(n+1).
inline HermitianOperator trace_last_leg(const HermitianOperator& op, std::size_t d, std::size_t n) {
  if (n < 1) throw ArgumentError("no output leg to trace out");
  const auto fact = TensorFactorization::uniform(d, n + 1);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
  return partial_trace(op, fact, keep);
}

}  // namespace ncb
