#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace ncb;
using namespace ncb::testing;
using Catch::Approx;

TEST_CASE("commutation_report examples", "[diagnostics]") {
  const auto diag = commutation_report({basis_projector(3, 0), HermitianOperator::diagonal(std::vector<double>{0.1, 0.5, 0.2})});
  CHECK(diag.max_norm == 0.0);
  CHECK(diag.is_commutative);

  for (double a : {0.25, 0.5, 0.75}) {
    const Povm e = norm1_example(a);
    const auto rep = commutation_report({e[1], e[2]});
    CHECK(rep.max_norm == Approx(a * (1 - a) / 2).margin(1e-10));
    CHECK_FALSE(rep.is_commutative);
  }

  const auto q = commutation_report({basis_projector(2, 0), HermitianOperator::projector(plus_ket())});
  CHECK(q.max_norm == Approx(0.5).margin(1e-12));
  REQUIRE(q.worst_pair);
  CHECK(q.worst_pair->first == 0);
  CHECK(q.worst_pair->second == 1);

  CHECK_THROWS_AS(commutation_report({basis_projector(2, 0), basis_projector(3, 0)}), ShapeError);
}

TEST_CASE("commutator of two rank-1 projectors matches the closed form", "[diagnostics][property]") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_unit_vector(3, rng), v = random_unit_vector(3, rng);
    const double o = std::abs(u.dot(v));
    CHECK(commutator_norm(ket_projector(u).matrix(), ket_projector(v).matrix()) == Approx(o * std::sqrt(1 - o * o)).margin(1e-10));
  }
}

TEST_CASE("norm1_decompose examples", "[diagnostics]") {
  const auto pvm = norm1_decompose(computational_pvm(3));
  REQUIRE(std::holds_alternative<Norm1Decomposition>(pvm));
  const auto& dp = std::get<Norm1Decomposition>(pvm);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(max_abs_diff(dp.projective_parts[k], basis_projector(3, k)) < 1e-12);
    CHECK(operator_norm(dp.residual_parts[k]) < 1e-12);
  }

  for (double a : {0.25, 0.5, 0.75}) {
    const Povm e = norm1_example(a);
    const auto res = norm1_decompose(e);
    REQUIRE(std::holds_alternative<Norm1Decomposition>(res));
    const auto& d = std::get<Norm1Decomposition>(res);
    const ComplexVector plus = (basis_ket(5, 0) + basis_ket(5, 1)) / std::sqrt(2.0);
    const ComplexVector minus = (basis_ket(5, 0) - basis_ket(5, 1)) / std::sqrt(2.0);
    const HermitianOperator f[] = {a * basis_projector(5, 0) + (1 - a) * ket_projector(plus), a * basis_projector(5, 1),
                                   (1 - a) * ket_projector(minus)};
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(max_abs_diff(d.projective_parts[k], basis_projector(5, k + 2)) < 1e-9);
      CHECK(max_abs_diff(d.residual_parts[k], f[k]) < 1e-9);
      CHECK(max_abs_diff(d.projective_parts[k] + d.residual_parts[k], e[k]) < 1e-9);
    }
    CHECK(d.delta_residual <= 1e-9);
  }

  const auto sic = norm1_decompose(sic_qubit_povm());
  REQUIRE(std::holds_alternative<NotNorm1>(sic));
  CHECK(std::get<NotNorm1>(sic).index == 0);
  CHECK(std::get<NotNorm1>(sic).norm == Approx(0.5));
}

TEST_CASE("norm1 successes respect the outcome bound and give repeatable models", "[diagnostics][property]") {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
    // Rotated PVM coarse-grained onto fewer outcomes plus a noisy remainder.
    const ComplexMatrix u = random_unitary(d, rng);
    std::vector<HermitianOperator> ops;
    for (std::size_t k = 0; k < d; ++k) ops.push_back(HermitianOperator(u * basis_projector(d, k).matrix() * u.adjoint()));
    const Povm p = make_povm("R", ops);
    const auto res = norm1_decompose(p);
    REQUIRE(std::holds_alternative<Norm1Decomposition>(res));
    CHECK(p.size() <= d);
    const NoncontextualModel model = repeatable_model(p);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(max_abs_diff(mp_heisenberg(model, p[k]), p[k]) <= 1e-10);
  }
}

TEST_CASE("norm1 clusters that overlap raise DeltaViolation", "[diagnostics]") {
  // Two effects sharing an eigenvalue-1 vector cannot form a POVM, but the
  // structural check is reached before normalization matters.
  const Povm bad = make_povm("bad", {basis_projector(2, 0), basis_projector(2, 0) + 0.0 * basis_projector(2, 1)});
  CHECK_THROWS_AS(norm1_decompose(bad), DeltaViolation);
}

TEST_CASE("postprocessing_lp examples", "[diagnostics]") {
  const Povm z3 = computational_pvm(3);
  SECTION("target equals mother") {
    const auto r = postprocessing_lp({z3}, z3);
    REQUIRE(r.status == Status::Feasible);
    REQUIRE(r.maps.size() == 1);
    CHECK(r.max_residual <= 1e-8);
    CHECK((r.maps[0].matrix - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-6);
  }
  SECTION("binary coarse graining") {
    const Povm merged = make_povm("merged", {z3[0], z3[1] + z3[2]});
    const auto r = postprocessing_lp({merged}, z3);
    REQUIRE(r.status == Status::Feasible);
    CHECK(r.max_residual <= 1e-8);
    RealMatrix expected(3, 2);
    expected << 1, 0, 0, 1, 0, 1;
    CHECK((r.maps[0].matrix - expected).cwiseAbs().maxCoeff() <= 1e-6);
    for (Eigen::Index l = 0; l < 3; ++l) CHECK(r.maps[0].matrix.row(l).sum() == Approx(1.0).margin(1e-9));
  }
  SECTION("projective target from the SIC is impossible") {
    const auto r = postprocessing_lp({computational_pvm(2)}, sic_qubit_povm());
    CHECK(r.status == Status::Infeasible);
    CHECK(r.report.certificate_gap >= 1e-6);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(postprocessing_lp({computational_pvm(2)}, z3), ShapeError);
    CHECK_THROWS_AS(postprocessing_lp({}, z3), ArgumentError);
  }
}

TEST_CASE("repeatable_model examples", "[diagnostics]") {
  const NoncontextualModel z = repeatable_model(computational_pvm(3));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(max_abs_diff(z.epistemic_states[k].op, basis_projector(3, k)) < 1e-12);
    CHECK(max_abs_diff(mp_heisenberg(z, computational_pvm(3)[k]), computational_pvm(3)[k]) <= 1e-10);
  }

  const Povm e = norm1_example(0.4);
  const NoncontextualModel m = repeatable_model(e);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(max_abs_diff(m.epistemic_states[k].op, basis_projector(5, k + 2)) < 1e-9);
    CHECK(max_abs_diff(mp_heisenberg(m, e[k]), e[k]) <= 1e-10);
  }
  // Post-processed targets stay fixed by linearity.
  const HermitianOperator target = 0.3 * e[0] + 0.9 * e[1] + 0.5 * e[2];
  CHECK(max_abs_diff(mp_heisenberg(m, target), target) <= 1e-10);

  CHECK_THROWS_AS(repeatable_model(sic_qubit_povm()), ArgumentError);
}

TEST_CASE("classify_states examples", "[diagnostics]") {
  Rng rng(53);
  CHECK(classify_states({as_state(random_density(3, rng))}).verdict == StateVerdict::NonContextualSubset);
  const std::vector<State> diag{{HermitianOperator::diagonal(std::vector<double>{0.2, 0.8}), "a"},
                                {HermitianOperator::diagonal(std::vector<double>{0.6, 0.4}), "b"}};
  const auto d = classify_states(diag, kCommutatorTol, true);
  CHECK(d.verdict == StateVerdict::NonContextualSubset);
  CHECK(d.agrees);

  const std::vector<State> q{{basis_projector(2, 0), "0"}, {HermitianOperator::projector(plus_ket()), "+"}};
  const auto c = classify_states(q, kCommutatorTol, true);
  CHECK(c.verdict == StateVerdict::EnablesContextualityProof);
  CHECK(c.commutation.max_norm == Approx(0.5).margin(1e-12));
  CHECK(c.agrees);
  CHECK_THROWS_AS(classify_states({}), ArgumentError);
}

TEST_CASE("classify_states is invariant under convex closure", "[diagnostics][property]") {
  Rng rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<State> states;
    const bool commuting = trial % 2 == 0;
    const ComplexMatrix basis = random_unitary(3, rng);
    for (int k = 0; k < 3; ++k) {
      if (commuting) {
        std::vector<double> p{u(rng), u(rng), u(rng)};
        const double s = p[0] + p[1] + p[2];
        for (auto& x : p) x /= s;
        states.push_back({HermitianOperator(basis * HermitianOperator::diagonal(p).matrix() * basis.adjoint()), "s"});
      } else {
        states.push_back(as_state(random_density(3, rng)));
      }
    }
    const auto before = classify_states(states).verdict;
    std::vector<State> closed = states;
    for (int k = 0; k < 4; ++k) {
      const double w = u(rng);
      closed.push_back({w * states[static_cast<std::size_t>(k % 3)].op + (1 - w) * states[static_cast<std::size_t>((k + 1) % 3)].op, "mix"});
    }
    CHECK(classify_states(closed).verdict == before);
    CHECK(before == (commuting ? StateVerdict::NonContextualSubset : StateVerdict::EnablesContextualityProof));
  }
}

TEST_CASE("is_rank_one_povm examples", "[diagnostics]") {
  CHECK(is_rank_one_povm(sic_qubit_povm()));
  CHECK_FALSE(is_rank_one_povm(norm1_example(0.5)));
  CHECK(numerical_rank(norm1_example(0.5)[0], 1e-9) == 3);
  CHECK(is_rank_one_povm(computational_pvm(4)));
}

TEST_CASE("merge_parallel_rank_one", "[diagnostics]") {
  // Z measurement with outcome 0 split in two.
  const auto p0 = basis_projector(2, 0), p1 = basis_projector(2, 1);
  const Povm split = make_povm("split", {0.3 * p0, p1, 0.7 * p0});
  CHECK(std::holds_alternative<NotNorm1>(norm1_decompose(split)));
  const Povm merged = merge_parallel_rank_one(split);
  REQUIRE(merged.size() == 2);
  CHECK(max_abs_diff(merged.sum(), HermitianOperator::identity(2)) < 1e-12);
  CHECK(std::holds_alternative<Norm1Decomposition>(norm1_decompose(merged)));
  CHECK(merge_parallel_rank_one(sic_qubit_povm()).size() == 4);
}
