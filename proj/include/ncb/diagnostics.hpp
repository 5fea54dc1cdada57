#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ncb/broadcast.hpp"
#include "ncb/conic.hpp"
#include "ncb/quantum.hpp"

namespace ncb {

inline constexpr double kCommutatorTol = 1e-8;
inline constexpr double kNorm1ClusterTol = 1e-7;

// ---------------------------------------------------------------------------
// Commutativity

struct CommutationReport {
  double max_norm = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  bool is_commutative = true;
};

inline double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return spectral_norm(a * b - b * a);
}

inline CommutationReport commutation_report(const std::vector<HermitianOperator>& ops, double tol = kCommutatorTol) {
  CommutationReport rep;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    detail::require_dim(ops[i].dim(), ops.front().dim(), "commutation_report");
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const double c = commutator_norm(ops[i].matrix(), ops[j].matrix());
      if (!rep.worst_pair || c > rep.max_norm) {
        rep.max_norm = c;
        rep.worst_pair = std::make_pair(i, j);
      }
    }
  }
  rep.is_commutative = rep.max_norm <= tol;
  return rep;
}

inline std::vector<HermitianOperator> operators_of(const Povm& povm) {
  std::vector<HermitianOperator> out;
  for (const auto& e : povm.effects) out.push_back(e.op);
  return out;
}

inline std::vector<HermitianOperator> operators_of(const std::vector<State>& states) {
  std::vector<HermitianOperator> out;
  for (const auto& s : states) out.push_back(s.op);
  return out;
}

// ---------------------------------------------------------------------------
// Norm-1 structure G = P + F

struct Norm1Decomposition {
  std::vector<HermitianOperator> projective_parts;
  std::vector<HermitianOperator> residual_parts;
  std::vector<ComplexVector> eigen_vectors;
  double delta_residual = 0.0;  // max |<l'|G_l|l'> - delta_{l l'}|
};

struct NotNorm1 {
  std::size_t index = 0;
  double norm = 0.0;
};

using Norm1Result = std::variant<Norm1Decomposition, NotNorm1>;

/// Splits every effect into the projector onto its eigenvalue-1 cluster
/// (eigenvalues >= 1 - tol) and the remainder. Effects without such a cluster
/// make the POVM NotNorm1; overlapping clusters or a failed delta property
/// raise DeltaViolation.
inline Norm1Result norm1_decompose(const Povm& povm, double tol = kNorm1ClusterTol) {
  Norm1Decomposition out;
  for (std::size_t l = 0; l < povm.size(); ++l) {
    const auto eig = eig_hermitian(povm[l]);
    const double top = eig.values.size() ? eig.values(0) : 0.0;
    if (top < 1.0 - tol) return NotNorm1{l, top};
    Eigen::Index c = 0;
    while (c < eig.values.size() && eig.values(c) >= 1.0 - tol) ++c;
    const ComplexMatrix v = eig.vectors.leftCols(c);
    const HermitianOperator p(v * v.adjoint());
    out.projective_parts.push_back(p);
    out.residual_parts.push_back(povm[l] - p);
    out.eigen_vectors.push_back(eig.vectors.col(0));
  }
  for (std::size_t i = 0; i < povm.size(); ++i)
    for (std::size_t j = i + 1; j < povm.size(); ++j) {
      const double overlap = spectral_norm(out.projective_parts[i].matrix() * out.projective_parts[j].matrix());
      if (overlap > tol)
        throw DeltaViolation("eigenvalue-1 clusters of effects " + std::to_string(i) + " and " + std::to_string(j) +
                             " overlap (" + std::to_string(overlap) + ")");
    }
  double worst = 0.0;
  for (std::size_t l = 0; l < povm.size(); ++l)
    for (std::size_t k = 0; k < povm.size(); ++k) {
      const ComplexVector& v = out.eigen_vectors[k];
      const double val = (v.adjoint() * povm[l].matrix() * v)(0, 0).real();
      worst = std::max(worst, std::abs(val - (l == k ? 1.0 : 0.0)));
    }
  if (worst > tol) throw DeltaViolation("delta property fails with residual " + std::to_string(worst));
  out.delta_residual = worst;
  return out;
}

// ---------------------------------------------------------------------------
// Rank-1 POVMs

inline std::size_t numerical_rank(const HermitianOperator& op, double tol) {
  const RealVector ev = eigenvalues(op);
  return static_cast<std::size_t>((ev.array() > tol).count());
}

inline bool is_rank_one_povm(const Povm& povm, double tol = 1e-9) {
  for (const auto& e : povm.effects) {
    const std::size_t r = numerical_rank(e.op, tol);
    if (r > 1) return false;
  }
  return true;
}

/// Sums rank-1 effects whose ranges coincide (|<u|v>| >= 1 - tol), the
/// coarsest relabelling that keeps the measurement's information.
inline Povm merge_parallel_rank_one(const Povm& povm, double tol = 1e-9) {
  std::vector<ComplexVector> dirs;
  std::vector<HermitianOperator> merged;
  std::vector<std::string> names;
  for (const auto& e : povm.effects) {
    const auto eig = eig_hermitian(e.op);
    if (eig.values(0) <= tol) continue;
    if (eig.values.size() > 1 && eig.values(1) > tol) throw ArgumentError("merge_parallel_rank_one: effect '" + e.name + "' has rank > 1");
    const ComplexVector u = eig.vectors.col(0);
    bool placed = false;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      if (std::abs(dirs[k].dot(u)) >= 1.0 - tol) {
        merged[k] += e.op;
        names[k] += "+" + e.name;
        placed = true;
        break;
      }
    }
    if (!placed) {
      dirs.push_back(u);
      merged.push_back(e.op);
      names.push_back(e.name);
    }
  }
  Povm out{{}, povm.name + "/merged"};
  for (std::size_t k = 0; k < merged.size(); ++k) out.effects.push_back({merged[k], names[k]});
  return out;
}

// ---------------------------------------------------------------------------
// Classical post-processing p(k|l): A_k = sum_l p(k|l) G_l

struct StochasticPostprocessing {
  RealMatrix matrix;  // rows l, columns k
};

struct PostprocessingResult {
  Status status = Status::Indeterminate;
  std::vector<StochasticPostprocessing> maps;  // one per target when Feasible
  double max_residual = 0.0;                   // operator residual of the returned maps
  FeasibilityReport report;
  ConicProblem problem;
};

inline PostprocessingResult postprocessing_lp(const std::vector<Povm>& targets, const Povm& mother,
                                              const SolverConfig& config = {}) {
  if (targets.empty()) throw ArgumentError("postprocessing_lp: no target POVMs");
  const std::size_t d = mother.dim();
  for (const auto& t : targets) detail::require_dim(t.dim(), d, "postprocessing_lp");
  const HermitianBasis basis(d);
  const auto L = static_cast<Eigen::Index>(mother.size());
  const auto d2 = static_cast<Eigen::Index>(d * d);

  RealMatrix g(d2, L);
  for (Eigen::Index l = 0; l < L; ++l) g.col(l) = basis.coords(mother[static_cast<std::size_t>(l)].matrix());

  // Variable layout: target t, column k, row l -> offset_t + k * L + l.
  std::vector<Eigen::Index> offset;
  Eigen::Index nvar = 0;
  for (const auto& t : targets) {
    offset.push_back(nvar);
    nvar += static_cast<Eigen::Index>(t.size()) * L;
  }
  std::vector<RealVector> rows;
  std::vector<double> rhs;
  std::vector<ConstraintLabel> labels;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto K = static_cast<Eigen::Index>(targets[t].size());
    for (Eigen::Index k = 0; k < K; ++k) {
      const RealVector a = basis.coords(targets[t][static_cast<std::size_t>(k)].matrix());
      for (Eigen::Index c = 0; c < d2; ++c) {
        RealVector row = RealVector::Zero(nvar);
        row.segment(offset[t] + k * L, L) = g.row(c).transpose();
        rows.push_back(std::move(row));
        rhs.push_back(a(c));
        labels.push_back({ConstraintKind::Marginal, static_cast<int>(t), {static_cast<int>(k)}, static_cast<int>(c)});
      }
    }
    for (Eigen::Index l = 0; l < L; ++l) {
      RealVector row = RealVector::Zero(nvar);
      for (Eigen::Index k = 0; k < K; ++k) row(offset[t] + k * L + l) = 1.0;
      rows.push_back(std::move(row));
      rhs.push_back(1.0);
      labels.push_back({ConstraintKind::Stochastic, static_cast<int>(t), {static_cast<int>(l)}, -1});
    }
  }

  PostprocessingResult res;
  ConicProblem& p = res.problem;
  p.variable_dim = static_cast<std::size_t>(nvar);
  p.equalities.resize(static_cast<Eigen::Index>(rows.size()), nvar);
  for (std::size_t i = 0; i < rows.size(); ++i) p.equalities.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  p.rhs = Eigen::Map<RealVector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  p.equality_labels = std::move(labels);
  p.nonnegatives = RealMatrix::Identity(nvar, nvar);
  for (Eigen::Index v = 0; v < nvar; ++v) p.nonnegative_labels.push_back({ConstraintKind::Stochastic, -1, {static_cast<int>(v)}, -1});

  res.report = solve(p, config);
  res.status = res.report.status;
  if (res.status == Status::Feasible) {
    const RealVector& x = *res.report.primal;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto K = static_cast<Eigen::Index>(targets[t].size());
      RealMatrix m(L, K);
      for (Eigen::Index k = 0; k < K; ++k) m.col(k) = x.segment(offset[t] + k * L, L);
      for (Eigen::Index k = 0; k < K; ++k) {
        ComplexMatrix acc = -targets[t][static_cast<std::size_t>(k)].matrix();
        for (Eigen::Index l = 0; l < L; ++l) acc += m(l, k) * mother[static_cast<std::size_t>(l)].matrix();
        res.max_residual = std::max(res.max_residual, spectral_norm(acc));
      }
      res.maps.push_back({std::move(m)});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Repeatable model: sigma_l = |l><l| with G_l |l> = |l>

inline NoncontextualModel repeatable_model(const Povm& povm, double tol = kNorm1ClusterTol) {
  const Norm1Result r = norm1_decompose(povm, tol);
  if (const auto* bad = std::get_if<NotNorm1>(&r))
    throw ArgumentError("repeatable_model: effect " + std::to_string(bad->index) + " has norm " + std::to_string(bad->norm) +
                        " < 1");
  const auto& dec = std::get<Norm1Decomposition>(r);
  NoncontextualModel model{povm, {}, false};
  for (std::size_t l = 0; l < dec.eigen_vectors.size(); ++l)
    model.epistemic_states.push_back({HermitianOperator::projector(dec.eigen_vectors[l]), "lambda" + std::to_string(l)});
  return model;
}

// ---------------------------------------------------------------------------
// State sets

enum class StateVerdict { NonContextualSubset, EnablesContextualityProof };

inline const char* to_string(StateVerdict v) {
  return v == StateVerdict::NonContextualSubset ? "NonContextualSubset" : "EnablesContextualityProof";
}

struct StateClassification {
  StateVerdict verdict = StateVerdict::NonContextualSubset;
  CommutationReport commutation;
  std::optional<Status> broadcast_status;  // set when cross-validated
  bool agrees = true;
};

/// Commutative state sets are exactly the non-contextual ones; optionally
/// confirmed by the 1 -> 2 broadcast program with full observable algebra.
inline StateClassification classify_states(const std::vector<State>& states, double tol = kCommutatorTol,
                                           bool cross_validate = false, const SolverConfig& config = {}) {
  if (states.empty()) throw ArgumentError("classify_states: empty state list");
  StateClassification out;
  out.commutation = commutation_report(operators_of(states), tol);
  out.verdict = out.commutation.is_commutative ? StateVerdict::NonContextualSubset : StateVerdict::EnablesContextualityProof;
  if (cross_validate) {
    const auto rep = solve(assemble_broadcast(states, {FullObservableAlgebra{}}, 2), config);
    out.broadcast_status = rep.status;
    out.agrees = (rep.status == Status::Feasible) == out.commutation.is_commutative &&
                 rep.status != Status::Indeterminate;
  }
  return out;
}

}  // namespace ncb
