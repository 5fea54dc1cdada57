#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncb/conic.hpp"
#include "ncb/quantum.hpp"
#include "ncb/scenario_json.hpp"

namespace ncb {

struct WitnessTerm {
  std::size_t prep = 0;
  std::size_t effect = 0;  // flat effect index of the scenario
  std::string prep_name;
  std::string povm_name;
  std::size_t outcome = 0;
  double coefficient = 0.0;
};

/// Linear inequality sum_(t,e) c_te p(e|t) <= bound, violated by the scenario
/// it was extracted from. Without scenario labels only the raw Farkas data is kept.
struct ContextualityWitness {
  std::vector<WitnessTerm> terms;
  double bound = 0.0;
  double value_on_scenario = 0.0;
  std::optional<FarkasCertificate> raw;

  [[nodiscard]] double violation() const { return value_on_scenario - bound; }
};

/// Groups the equality duals of a pseudo-broadcasting certificate by
/// (preparation, effect), summing over legs. With Farkas balance
///   sum_te a_te p_te - sum_t z^TP_t = gap,   a_te = -sum_leg z_te,leg
/// every table reachable by a feasible W satisfies sum a p <= sum z^TP.
/// Coefficients are scaled to max |a| = 1.
inline ContextualityWitness extract_witness(const FeasibilityReport& report, const ConicProblem& problem,
                                            const Scenario* scenario = nullptr) {
  if (report.status != Status::Infeasible || !report.certificate)
    throw ArgumentError(std::string("witness needs an Infeasible report, got ") + to_string(report.status));
  const FarkasCertificate& cert = *report.certificate;
  ContextualityWitness w;
  w.raw = cert;

  const bool labelled = scenario != nullptr && std::any_of(problem.equality_labels.begin(), problem.equality_labels.end(),
                                                           [](const ConstraintLabel& l) { return l.kind == ConstraintKind::Marginal; });
  if (!labelled) {
    w.bound = 0.0;
    w.value_on_scenario = cert.gap;
    return w;
  }

  std::map<std::pair<int, int>, double> coeff;
  double bound = 0.0;
  for (std::size_t i = 0; i < problem.equality_labels.size(); ++i) {
    const auto& lab = problem.equality_labels[i];
    const double z = cert.equality_duals(static_cast<Eigen::Index>(i));
    if (lab.kind == ConstraintKind::Marginal) {
      coeff[{lab.prep, lab.effects.at(0)}] -= z;
    } else if (lab.kind == ConstraintKind::TraceNormalization) {
      bound += z;
    } else {
      throw ArgumentError("extract_witness: unexpected equality kind " + std::string(to_string(lab.kind)));
    }
  }
  double scale = 0.0;
  for (const auto& [k, v] : coeff) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0)) scale = 1.0;

  const auto index = scenario->effect_index();
  const auto effects = scenario->effects();
  double value = 0.0;
  for (const auto& [k, v] : coeff) {
    const auto t = static_cast<std::size_t>(k.first);
    const auto e = static_cast<std::size_t>(k.second);
    if (t >= scenario->preparations.size() || e >= effects.size())
      throw ShapeError("extract_witness: certificate labels do not match the scenario");
    WitnessTerm term{t, e, scenario->preparations[t].name, scenario->measurements[index[e].first].name, index[e].second, v / scale};
    value += term.coefficient * trace_product(scenario->preparations[t].op, effects[e]->op);
    w.terms.push_back(std::move(term));
  }
  w.bound = bound / scale;
  w.value_on_scenario = value;
  return w;
}

/// Witness value on another scenario with the same preparation/effect layout.
inline double evaluate_witness(const ContextualityWitness& w, const Scenario& scenario) {
  const auto effects = scenario.effects();
  double value = 0.0;
  for (const auto& t : w.terms) {
    if (t.prep >= scenario.preparations.size() || t.effect >= effects.size())
      throw ShapeError("evaluate_witness: scenario layout differs from the witness");
    value += t.coefficient * trace_product(scenario.preparations[t.prep].op, effects[t.effect]->op);
  }
  return value;
}

inline Json witness_to_json(const ContextualityWitness& w) {
  Json j;
  j["terms"] = Json::array();
  for (const auto& t : w.terms)
    j["terms"].push_back({{"prep", t.prep_name}, {"povm", t.povm_name}, {"outcome", t.outcome}, {"coefficient", t.coefficient}});
  j["bound"] = w.bound;
  j["value_on_scenario"] = w.value_on_scenario;
  j["violation"] = w.violation();
  if (w.terms.empty() && w.raw) {
    j["farkas"] = {{"nonneg_duals", std::vector<double>(w.raw->nonneg_duals.data(), w.raw->nonneg_duals.data() + w.raw->nonneg_duals.size())},
                   {"equality_duals",
                    std::vector<double>(w.raw->equality_duals.data(), w.raw->equality_duals.data() + w.raw->equality_duals.size())},
                   {"residual", w.raw->residual},
                   {"gap", w.raw->gap}};
  }
  return j;
}

/// Reads back the terms and bound; value_on_scenario is recomputed by the caller.
inline ContextualityWitness witness_from_json(const Json& j, const Scenario& scenario) {
  if (!j.is_object() || !j.contains("terms") || !j.contains("bound")) throw FormatError("witness: missing 'terms' or 'bound'");
  const auto index = scenario.effect_index();
  ContextualityWitness w;
  w.bound = j["bound"].get<double>();
  for (const auto& t : j["terms"]) {
    WitnessTerm term;
    term.prep_name = t.at("prep").get<std::string>();
    term.povm_name = t.at("povm").get<std::string>();
    term.outcome = t.at("outcome").get<std::size_t>();
    term.coefficient = t.at("coefficient").get<double>();
    bool found = false;
    for (std::size_t p = 0; p < scenario.preparations.size() && !found; ++p)
      if (scenario.preparations[p].name == term.prep_name) {
        term.prep = p;
        found = true;
      }
    if (!found) throw FormatError("witness: unknown preparation '" + term.prep_name + "'");
    found = false;
    for (std::size_t e = 0; e < index.size() && !found; ++e)
      if (scenario.measurements[index[e].first].name == term.povm_name && index[e].second == term.outcome) {
        term.effect = e;
        found = true;
      }
    if (!found) throw FormatError("witness: unknown effect '" + term.povm_name + "'[" + std::to_string(term.outcome) + "]");
    w.terms.push_back(std::move(term));
  }
  w.value_on_scenario = evaluate_witness(w, scenario);
  return w;
}

}  // namespace ncb
