// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ncb/ncb.hpp"

using namespace ncb;

namespace {

struct Gate {
  int failures = 0;
  // Criterion 9 bookkeeping: every solve made by criteria 1-8.
  std::size_t solves = 0;
  std::size_t inconsistent = 0;

  void report(int id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
    if (!ok) ++failures;
  }

  FeasibilityReport solve_tracked(const ConicProblem& p, const SolverConfig& cfg = {}) {
    FeasibilityReport r = solve(p, cfg);
    ++solves;
    if (!r.farkas_consistent) ++inconsistent;
    return r;
  }

  void track(const RegionTable& t) {
    for (const auto& r : t.rows) {
      ++solves;
      if (!r.farkas_consistent) ++inconsistent;
    }
  }
};

std::string fmt(double v) { return format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Random rank-1 POVM families for criterion 7

using Rng = std::mt19937_64;

ComplexMatrix ginibre(std::size_t d, std::size_t m, Rng& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
  for (auto& x : a.reshaped()) x = Complex(g(rng), g(rng));
  return a;
}

ComplexMatrix haar_unitary(std::size_t d, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d, rng));
  return qr.householderQ();
}

/// E_k = S^(-1/2) v_k v_k^+ S^(-1/2) with S = sum_k v_k v_k^+.
Povm generic_rank_one(std::size_t d, std::size_t m, Rng& rng) {
  const ComplexMatrix v = ginibre(d, m, rng);
  const auto eig = eig_hermitian(HermitianOperator(v * v.adjoint()));
  const ComplexMatrix s_inv_half = eig.vectors * eig.values.cwiseInverse().cwiseSqrt().cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  std::vector<HermitianOperator> ops;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const ComplexVector u = s_inv_half * v.col(k);
    ops.push_back(HermitianOperator(u * u.adjoint()));
  }
  return make_povm("generic", ops);
}

/// Rotated PVM whose outcomes are split into rank-1 pieces with random weights.
Povm split_commutative(std::size_t d, Rng& rng) {
  const ComplexMatrix u = haar_unitary(d, rng);
  std::uniform_real_distribution<double> w(0.1, 0.9);
  std::uniform_int_distribution<int> pieces(1, 3);
  std::vector<HermitianOperator> ops;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const HermitianOperator p = HermitianOperator::projector(u.col(k));
    const int n = pieces(rng);
    double left = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double part = left * w(rng);
      ops.push_back(part * p);
      left -= part;
    }
    ops.push_back(left * p);
  }
  return make_povm("split", ops);
}

Povm rotated_pvm(std::size_t d, Rng& rng) {
  const ComplexMatrix u = haar_unitary(d, rng);
  std::vector<HermitianOperator> ops;
  for (Eigen::Index k = 0; k < u.cols(); ++k) ops.push_back(HermitianOperator::projector(u.col(k)));
  return make_povm("pvm", ops);
}

}  // namespace

int main() {
  Gate gate;
  const SolverConfig cfg;  // feas_tol 1e-7, cert_tol 1e-6
  const auto t_start = std::chrono::steady_clock::now();

  // Criteria 1, 2 and 8 share the full-grid scan.
  const std::vector<double> mu_grid = unit_grid(0.05);
  const std::vector<double> eta_grid = unit_grid(0.02);
  ScanOptions opts;
  opts.solver = cfg;
  opts.keep_witnesses = true;
  const auto t_scan = std::chrono::steady_clock::now();
  const RegionTable table = scan_mazurek(mu_grid, eta_grid, {2, 3}, opts);
  const double scan_seconds = seconds_since(t_scan);
  gate.track(table);

  // -------------------------------------------------------------------------
  // 1. n = 3 transition within +-0.04 of 4 / (3 (1 + mu)) at every mu.
  {
    bool ok = table.rows.size() == mu_grid.size() * eta_grid.size() * 2;
    int bad_points = 0, indeterminate = 0;
    double worst_offset = 0.0;
    std::ostringstream first_bad;
    for (double mu : mu_grid) {
      const double boundary = mazurek_boundary(mu);
      // Lowest grid eta from which every point upward is Infeasible.
      double transition = 2.0;
      for (auto it = eta_grid.rbegin(); it != eta_grid.rend(); ++it) {
        if (table.find(mu, *it, 3)->status != Status::Infeasible) break;
        transition = *it;
      }
      for (double eta : eta_grid) {
        const Status s = table.find(mu, eta, 3)->status;
        if (s == Status::Indeterminate) ++indeterminate;
        const bool below = eta < boundary - 0.04 - 1e-12;
        const bool above = eta > boundary + 0.04 + 1e-12;
        if ((below && s != Status::Feasible) || (above && s != Status::Infeasible)) {
          if (bad_points++ == 0) first_bad << " first mismatch at (" << fmt(mu) << ", " << fmt(eta) << ") " << to_string(s) << ";";
        }
      }
      if (boundary <= 1.0) worst_offset = std::max(worst_offset, std::abs(transition - boundary));
    }
    ok = ok && bad_points == 0;
    gate.report(1, ok,
                std::to_string(mu_grid.size() * eta_grid.size()) + " points per n, " + std::to_string(bad_points) +
                    " outside the +-0.04 band," + first_bad.str() + " max |transition - boundary| " + fmt(worst_offset) + ", " +
                    std::to_string(indeterminate) + " indeterminate, full two-n scan " + fmt(scan_seconds) + " s");
  }

  // -------------------------------------------------------------------------
  // 2. Feasible(n = 3) subset of Feasible(n = 2), and a point separating them.
  {
    int violations = 0, separating = 0;
    std::string example;
    for (double mu : mu_grid)
      for (double eta : eta_grid) {
        const Status s2 = table.find(mu, eta, 2)->status;
        const Status s3 = table.find(mu, eta, 3)->status;
        if (s3 == Status::Feasible && s2 != Status::Feasible) ++violations;
        if (s2 == Status::Feasible && s3 == Status::Infeasible) {
          if (separating++ == 0) example = "(" + fmt(mu) + ", " + fmt(eta) + ")";
        }
      }
    gate.report(2, violations == 0 && separating > 0,
                std::to_string(violations) + " nesting violations, " + std::to_string(separating) +
                    " points Feasible at n=2 and Infeasible at n=3" + (separating ? ", e.g. " + example : ""));
  }

  // -------------------------------------------------------------------------
  // 3. Six-term sum against 3 + 3 eta (1 + mu) / 2, and its threshold 5.
  {
    const Scenario base = mazurek_scenario();
    const auto six_term = [&](double mu, double eta) {
      const Scenario s = apply_noise(base, NoiseSetting(mu, eta));
      double sum = 0.0;
      for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t b = 0; b < 2; ++b) sum += born(s.preparations[2 * t + b], s.measurements[t].effects[b]);
      return sum;
    };
    Rng rng(20240317);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double mu = u(rng), eta = u(rng);
      worst = std::max(worst, std::abs(six_term(mu, eta) - (3.0 + 1.5 * eta * (1.0 + mu))));
    }
    // Threshold: sum > 5 exactly where eta > 4 / (3 (1 + mu)), on the grid of criterion 1.
    int threshold_mismatch = 0;
    for (double mu : mu_grid)
      for (double eta : eta_grid) {
        const double s = six_term(mu, eta);
        if (std::abs(s - 5.0) < 1e-12) continue;  // exactly on the boundary
        if ((s > 5.0) != (eta > mazurek_boundary(mu))) ++threshold_mismatch;
      }
    gate.report(3, worst <= 1e-10 && threshold_mismatch == 0,
                "max |sum - closed form| over 100 random points " + fmt(worst) + ", " + std::to_string(threshold_mismatch) +
                    " grid points where sum > 5 disagrees with eta > 4/(3(1+mu))");
  }

  // -------------------------------------------------------------------------
  // 4. SIC maps and non-broadcastability.
  {
    const Scenario sic = sic_qubit_scenario();
    double worst = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) worst = std::max(worst, constraint_residual(assemble_pseudo(sic, n), sic_xi(n)));
    const auto rep = gate.solve_tracked(assemble_broadcast(FullStateSpace{}, {std::vector<Povm>{sic_qubit_povm()}}, 2), cfg);
    gate.report(4, worst <= 1e-10 && rep.status == Status::Infeasible && rep.certificate_gap >= 1e-6,
                "max Xi_n residual (n = 1..4) " + fmt(worst) + ", broadcast(full states, {SIC}, 2) " + to_string(rep.status) +
                    " with gap " + fmt(rep.certificate_gap));
  }

  // -------------------------------------------------------------------------
  // 5. Five-dimensional norm-1 POVM.
  {
    bool ok = true;
    double fixed = 0.0, comm_err = 0.0, proj_err = 0.0;
    for (double a : {0.25, 0.5, 0.75}) {
      const Povm e = norm1_example(a);
      const NoncontextualModel m = norm1_example_model(a);
      for (std::size_t k = 0; k < 3; ++k) fixed = std::max(fixed, max_abs_diff(mp_heisenberg(m, e[k]), e[k]));
      const auto rep = commutation_report({e[1], e[2]});
      comm_err = std::max(comm_err, std::abs(rep.max_norm - a * (1 - a) / 2));
      const auto dec = norm1_decompose(e);
      if (const auto* d = std::get_if<Norm1Decomposition>(&dec)) {
        for (std::size_t k = 0; k < 3; ++k) proj_err = std::max(proj_err, max_abs_diff(d->projective_parts[k], basis_projector(5, k + 2)));
      } else {
        ok = false;
      }
    }
    ok = ok && fixed <= 1e-12 && comm_err <= 1e-10 && proj_err <= 1e-9;
    gate.report(5, ok,
                "fixed-point residual " + fmt(fixed) + ", |[E2,E3]| - a(1-a)/2 error " + fmt(comm_err) +
                    ", projective parts vs {|2><2|,|3><3|,|4><4|} error " + fmt(proj_err));
  }

  // -------------------------------------------------------------------------
  // 6. Qutrit non-disturbing pair.
  {
    const auto [a, b] = qutrit_nondisturb_pair();
    const auto rep = gate.solve_tracked(assemble_broadcast(FullStateSpace{}, {std::vector<Povm>{a, b}}, 2), cfg);
    gate.report(6, rep.status == Status::Infeasible,
                "broadcast(full qutrit states, {A, B}, 2) " + std::string(to_string(rep.status)) + " with gap " +
                    fmt(rep.certificate_gap));
  }

  // -------------------------------------------------------------------------
  // 7. Rank-1 POVMs: broadcast feasibility <=> commutativity <=> norm-1.
  {
    Rng rng(7);
    int disagreements = 0, indeterminate = 0, feasible = 0;
    std::map<std::string, int> family_count;
    std::string first;
    for (int i = 0; i < 50; ++i) {
      const std::size_t d = i % 2 == 0 ? 2 : 3;
      Povm p;
      switch ((i / 2) % 3) {
        case 0: p = generic_rank_one(d, d + 1 + static_cast<std::size_t>(i % 3 == 0), rng); break;
        case 1: p = split_commutative(d, rng); break;
        default: p = rotated_pvm(d, rng); break;
      }
      ++family_count[p.name];
      if (!is_rank_one_povm(p) || !validate(p).ok()) {
        ++disagreements;
        continue;
      }
      const bool commutative = commutation_report(operators_of(p), kCommutatorTol).is_commutative;
      bool norm1 = false;
      try {
        norm1 = std::holds_alternative<Norm1Decomposition>(norm1_decompose(merge_parallel_rank_one(p)));
      } catch (const DeltaViolation&) {
        norm1 = false;
      }
      const auto rep = gate.solve_tracked(assemble_broadcast(FullStateSpace{}, {std::vector<Povm>{p}}, 2), cfg);
      if (rep.status == Status::Indeterminate) ++indeterminate;
      const bool broadcast = rep.status == Status::Feasible;
      feasible += broadcast;
      if (rep.status == Status::Indeterminate || commutative != norm1 || norm1 != broadcast) {
        if (disagreements++ == 0)
          first = " first at #" + std::to_string(i) + " (" + p.name + ", d=" + std::to_string(d) + ": comm " +
                  std::to_string(commutative) + ", norm1 " + std::to_string(norm1) + ", broadcast " + to_string(rep.status) + ");";
      }
    }
    gate.report(7, disagreements == 0,
                "50 POVMs (" + std::to_string(family_count["generic"]) + " generic, " + std::to_string(family_count["split"]) +
                    " split commutative, " + std::to_string(family_count["pvm"]) + " rotated PVM), " +
                    std::to_string(feasible) + " broadcastable, " + std::to_string(disagreements) + " disagreements," + first +
                    " " + std::to_string(indeterminate) + " indeterminate");
  }

  // -------------------------------------------------------------------------
  // 8. Witness soundness on the criterion-1 grid.
  {
    const Scenario base = mazurek_scenario();
    int witnesses = 0, weak = 0, false_positive = 0;
    double min_violation = std::numeric_limits<double>::infinity(), worst_excess = -std::numeric_limits<double>::infinity();
    Rng rng(8);
    for (std::size_t n : {2u, 3u}) {
      std::vector<const ScanRow*> feasible_rows;
      for (const auto& r : table.rows)
        if (r.n == n && r.status == Status::Feasible) feasible_rows.push_back(&r);
      std::shuffle(feasible_rows.begin(), feasible_rows.end(), rng);
      if (feasible_rows.size() > 10) feasible_rows.resize(10);
      std::vector<Scenario> samples;
      for (const auto* r : feasible_rows) samples.push_back(apply_noise(base, NoiseSetting(r->mu, r->eta)));

      for (const auto& r : table.rows) {
        if (r.n != n || r.status != Status::Infeasible) continue;
        if (!r.witness) {
          ++weak;
          continue;
        }
        ++witnesses;
        const auto& w = *r.witness;
        const double v = evaluate_witness(w, apply_noise(base, NoiseSetting(r.mu, r.eta))) - w.bound;
        min_violation = std::min(min_violation, v);
        if (v < 1e-6) ++weak;
        for (const auto& s : samples) {
          const double excess = evaluate_witness(w, s) - w.bound;
          worst_excess = std::max(worst_excess, excess);
          if (excess > 1e-6) ++false_positive;
        }
      }
    }
    gate.report(8, witnesses > 0 && weak == 0 && false_positive == 0,
                std::to_string(witnesses) + " witnesses, min violation on source " + fmt(min_violation) + ", " +
                    std::to_string(weak) + " below 1e-6, max value - bound on 10 feasible points per n " + fmt(worst_excess) +
                    ", " + std::to_string(false_positive) + " false positives");
  }

  // -------------------------------------------------------------------------
  // 9. Farkas consistency on every solve above.
  gate.report(9, gate.inconsistent == 0,
              std::to_string(gate.solves) + " solves, " + std::to_string(gate.inconsistent) +
                  " with both a primal within feas_tol and a certificate gap >= cert_tol");

  std::cout << "total " << fmt(seconds_since(t_start)) << " s, " << gate.failures << " failing criteria" << std::endl;
  return gate.failures == 0 ? 0 : 1;
}
