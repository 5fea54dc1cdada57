#include <catch_amalgamated.hpp>

#include <filesystem>

#include "test_support.hpp"

using namespace ncb;
using namespace ncb::testing;
using Catch::Approx;

TEST_CASE("born examples", "[quantum]") {
  const Scenario m = mazurek_scenario();
  CHECK(born(m.preparations[0], m.measurements[0].effects[0]) == Approx(1.0));

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mu = u(rng), eta = u(rng);
    const NoiseSetting ns(mu, eta);
    const double p = born(apply_noise(m.preparations[2], ns), apply_noise(m.measurements[1].effects[0], ns));
    CHECK(p == Approx(0.5 * (1.0 + eta * (3.0 * mu + 1.0) / 4.0)).margin(1e-12));
  }

  const State rho = as_state(random_density(3, rng));
  CHECK(born(rho, {HermitianOperator::identity(3), "I"}) == Approx(1.0));
  CHECK_THROWS_AS(born(rho, {HermitianOperator::identity(2), "I"}), ShapeError);
}

TEST_CASE("born clamps rounding noise and rejects real violations", "[quantum]") {
  const State zero{basis_projector(2, 0), "0"};
  const Effect tiny{HermitianOperator(ComplexMatrix(ComplexMatrix::Identity(2, 2) * Complex(-5e-10))), "tiny"};
  CHECK(born(zero, tiny) == 0.0);
  const Effect neg{-0.1 * HermitianOperator::identity(2), "neg"};
  CHECK_THROWS_AS(born(zero, neg), ArgumentError);
}

TEST_CASE("born of a complete POVM is one", "[quantum][property]") {
  Rng rng(7);
  const Scenario sic = sic_qubit_scenario();
  const Scenario q = qutrit_nondisturb_scenario();
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(born(as_state(random_density(2, rng)), {sic.measurements[0].sum(), "sum"}) == Approx(1.0).margin(1e-9));
    for (const auto& m : q.measurements) CHECK(born(as_state(random_density(3, rng)), {m.sum(), "sum"}) == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("noise channel examples", "[quantum]") {
  Rng rng(9);
  const State rho = as_state(random_density(2, rng));
  CHECK(max_abs_diff(apply_noise(rho, NoiseSetting(1.0, 0.3)).op, rho.op) == 0.0);

  const Effect e{random_effect(2, rng), "e"};
  const Effect unit{HermitianOperator::projector(random_unit_vector(2, rng)), "p"};
  CHECK(max_abs_diff(apply_noise(unit, NoiseSetting(0.4, 0.0)).op, 0.5 * HermitianOperator::identity(2)) < 1e-15);
  // General trace: collapses to tr(E) I/2.
  CHECK(max_abs_diff(apply_noise(e, NoiseSetting(0.4, 0.0)).op, (0.5 * e.op.trace()) * HermitianOperator::identity(2)) < 1e-15);

  const Scenario m = mazurek_scenario();
  const State dephased = apply_noise(m.preparations[2], NoiseSetting(0.0, 1.0));
  CHECK(max_abs_diff(dephased.op, bloch_operator(0.0, 0.0, -0.5)) < 1e-15);

  CHECK_THROWS_AS(NoiseSetting(1.2, 0.5), ArgumentError);
  CHECK_THROWS_AS(NoiseSetting(0.5, -0.1), ArgumentError);
  CHECK_THROWS_AS(apply_noise(State{basis_projector(3, 0), "q"}, NoiseSetting(0.5, 0.5)), UnsupportedDimension);
  CHECK_THROWS_AS(apply_noise(Effect{basis_projector(3, 0), "q"}, NoiseSetting(0.5, 0.5)), UnsupportedDimension);
}

TEST_CASE("dephasing composes multiplicatively", "[quantum][property]") {
  Rng rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const State rho = as_state(random_density(2, rng));
    const double m1 = u(rng), m2 = u(rng);
    const State twice = apply_noise(apply_noise(rho, NoiseSetting(m1, 1.0)), NoiseSetting(m2, 1.0));
    CHECK(max_abs_diff(twice.op, apply_noise(rho, NoiseSetting(m1 * m2, 1.0)).op) < 1e-10);
    CHECK(validate(Scenario{2, {twice}, {computational_pvm(2)}, {}}).ok());
  }
}

TEST_CASE("mp_heisenberg examples", "[quantum]") {
  for (double a : {0.25, 0.5, 0.75}) {
    const NoncontextualModel model = norm1_example_model(a);
    const Povm e = norm1_example(a);
    CHECK(max_abs_diff(mp_heisenberg(model, HermitianOperator::identity(5)), HermitianOperator::identity(5)) < 1e-14);
    for (std::size_t k = 0; k < 3; ++k) CHECK(max_abs_diff(mp_heisenberg(model, e[k]), e[k]) <= 1e-12);

    Rng rng(13);
    const auto x = random_hermitian(5, rng);
    HermitianOperator expected = HermitianOperator::zero(5);
    for (std::size_t z = 0; z < 3; ++z)
      expected += x(static_cast<Eigen::Index>(z + 2), static_cast<Eigen::Index>(z + 2)).real() * e[z];
    CHECK(max_abs_diff(mp_heisenberg(model, x), expected) < 1e-12);
  }
  CHECK_THROWS_AS(mp_heisenberg(norm1_example_model(0.5), HermitianOperator::identity(2)), ShapeError);
}

TEST_CASE("mp_heisenberg is unital and positive on effects", "[quantum][property]") {
  Rng rng(14);
  const NoncontextualModel model = norm1_example_model(0.3);
  REQUIRE(validate(model).ok());
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = mp_heisenberg(model, random_effect(5, rng));
    CHECK(is_psd(img, 1e-9));
    CHECK(is_psd(HermitianOperator::identity(5) - img, 1e-9));
  }
}

TEST_CASE("ontological_probability", "[quantum]") {
  const NoncontextualModel model = norm1_example_model(0.5);
  const Povm e = norm1_example(0.5);
  const State two{basis_projector(5, 2), "2"};
  CHECK(ontological_probability(model, two, e, 0) == Approx(1.0));
  CHECK(ontological_probability(model, two, e, 1) == Approx(0.0).margin(1e-15));

  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const State rho = as_state(random_density(5, rng));
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double p = ontological_probability(model, rho, e, k);
      total += p;
      CHECK(p == Approx(born(rho, e.effects[k])).margin(1e-10));
    }
    CHECK(total == Approx(1.0).margin(1e-10));
  }

  const NoncontextualModel diag = repeatable_model(computational_pvm(3));
  for (int trial = 0; trial < 5; ++trial) {
    const HermitianOperator r = random_density(3, rng);
    ComplexMatrix d = r.matrix().diagonal().asDiagonal();
    const State rho{HermitianOperator(d), "diag"};
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(ontological_probability(diag, rho, computational_pvm(3), k) == Approx(born(rho, computational_pvm(3).effects[k])).margin(1e-12));
  }
  CHECK_THROWS_AS(ontological_probability(model, two, e, 3), ArgumentError);
  CHECK_THROWS_AS(ontological_probability(model, State{basis_projector(2, 0), "q"}, e, 0), ShapeError);
}

TEST_CASE("built-in examples", "[quantum]") {
  const Scenario m = mazurek_scenario();
  REQUIRE(m.preparations.size() == 6);
  REQUIRE(m.measurements.size() == 3);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t bp = 0; bp < 2; ++bp)
        CHECK(trace_product(m.preparations[2 * t + b].op, m.measurements[t][bp]) == Approx(b == bp ? 1.0 : 0.0).margin(1e-14));
  CHECK(validate(m).ok());

  const auto v = sic_qubit_vectors();
  const Povm sic = sic_qubit_povm();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::norm(v[i].dot(v[j])) == Approx((2.0 * (i == j) + 1.0) / 3.0).margin(1e-14));
      CHECK(trace_product(4.0 * sic[i], sic[j]) == Approx((2.0 * (i == j) + 1.0) / 3.0).margin(1e-14));
    }
  CHECK(validate(sic_qubit_scenario()).ok());

  const Povm e = norm1_example(0.5);
  REQUIRE(e.size() == 3);
  REQUIRE(e.dim() == 5);
  CHECK(max_abs_diff(e.sum(), HermitianOperator::identity(5)) < 1e-15);
  CHECK(validate(e).ok());
  CHECK(validate(qutrit_nondisturb_scenario()).ok());

  CHECK(std::holds_alternative<Scenario>(build_example("mazurek")));
  CHECK(std::holds_alternative<HermitianOperator>(build_example("sic_xi", {0.5, 3, std::nullopt})));
  CHECK_THROWS_AS(build_example("norm1_example", {1.0, 2, std::nullopt}), ArgumentError);
  CHECK_THROWS_AS(build_example("sic_xi", {0.5, 0, std::nullopt}), ArgumentError);
  CHECK_THROWS_AS(build_example("nope"), ArgumentError);

  const Scenario noisy = mazurek_scenario(NoiseSetting(0.5, 0.5));
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) sum += born(noisy.preparations[i], noisy.measurements[i / 2].effects[i % 2]);
  CHECK(sum == Approx(mazurek_inequality_closed_form(0.5, 0.5)).margin(1e-12));
}

TEST_CASE("validate flags violations", "[quantum]") {
  Scenario bad;
  bad.dim = 2;
  bad.preparations.push_back({HermitianOperator::diagonal(std::vector<double>{1.1, -0.1}), "neg"});
  bad.measurements.push_back(make_povm("double", {HermitianOperator::identity(2), HermitianOperator::identity(2)}));
  const auto rep = validate(bad);
  REQUIRE_FALSE(rep.ok());
  bool positivity = false, normalization = false;
  for (const auto& v : rep.violations) {
    if (v.kind == ViolationKind::StatePositivity && v.subject == "neg") {
      positivity = true;
      CHECK(v.residual == Approx(0.1));
    }
    if (v.kind == ViolationKind::PovmNormalization && v.subject == "double") {
      normalization = true;
      CHECK(v.residual == Approx(1.0));
    }
  }
  CHECK(positivity);
  CHECK(normalization);

  CHECK_FALSE(validate(Scenario{}).ok());
  Scenario mixed = mazurek_scenario();
  mixed.preparations.push_back({basis_projector(3, 0), "qutrit"});
  CHECK_FALSE(validate(mixed).ok());
}

TEST_CASE("scenario JSON round trip", "[quantum]") {
  const auto dir = std::filesystem::temp_directory_path() / "ncb_test_quantum";
  std::filesystem::create_directories(dir);
  for (const Scenario& sc : {mazurek_scenario(NoiseSetting(0.37, 0.81)), sic_qubit_scenario(), qutrit_nondisturb_scenario()}) {
    const auto path = (dir / "sc.json").string();
    save_scenario(sc, path);
    const Scenario back = load_scenario(path);
    REQUIRE(back.dim == sc.dim);
    REQUIRE(back.preparations.size() == sc.preparations.size());
    REQUIRE(back.measurements.size() == sc.measurements.size());
    for (std::size_t i = 0; i < sc.preparations.size(); ++i) {
      CHECK(back.preparations[i].name == sc.preparations[i].name);
      CHECK(max_abs_diff(back.preparations[i].op, sc.preparations[i].op) == 0.0);
    }
    for (std::size_t m = 0; m < sc.measurements.size(); ++m)
      for (std::size_t k = 0; k < sc.measurements[m].size(); ++k) {
        CHECK(back.measurements[m].effects[k].name == sc.measurements[m].effects[k].name);
        CHECK(max_abs_diff(back.measurements[m][k], sc.measurements[m][k]) == 0.0);
      }
    CHECK(back.metadata == sc.metadata);
  }
}

TEST_CASE("scenario JSON errors", "[quantum]") {
  CHECK_THROWS_AS(scenario_from_json(Json::array()), FormatError);
  CHECK_THROWS_AS(scenario_from_json(Json{{"dim", 0}}), FormatError);
  CHECK_THROWS_AS(scenario_from_json(Json{{"dim", 2}, {"preparations", Json::array()}}), FormatError);
  Json wrong = scenario_to_json(mazurek_scenario());
  wrong["dim"] = 3;
  CHECK_THROWS_AS(scenario_from_json(wrong), FormatError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/ncb.json"), FormatError);
}
