#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncb/ncb.hpp"

namespace ncb::cli {

enum ExitCode : int {
  kOk = 0,
  kWitnessOnFeasible = 1,
  kInvalidInput = 2,
  kIndeterminate = 3,
  kVerifyFailed = 4,
};

struct RunConfig {
  double feas_tol = 1e-7;
  double cert_tol = 1e-6;
  std::size_t n_max = kDefaultMaxLegs;
  double mu_step = 0.05;
  double eta_step = 0.02;
  std::string output_dir = ".";
  bool emit_svg = false;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  [[nodiscard]] SolverConfig solver() const { return {feas_tol, cert_tol}; }

  void check() const {
    if (!(feas_tol > 0.0) || !(cert_tol > 0.0)) throw ArgumentError("tolerances must be positive");
    if (!(mu_step > 0.0 && mu_step <= 1.0) || !(eta_step > 0.0 && eta_step <= 1.0))
      throw ArgumentError("grid steps must lie in (0, 1]");
    if (n_max < 1 || n_max > kDefaultMaxLegs) throw ArgumentError("n_max must lie in 1..4");
  }
};

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ArgumentError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// key = value lines; '#' starts a comment.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "feas_tol") cfg.feas_tol = std::stod(val);
      else if (key == "cert_tol") cfg.cert_tol = std::stod(val);
      else if (key == "n_max") cfg.n_max = std::stoul(val);
      else if (key == "mu_step") cfg.mu_step = std::stod(val);
      else if (key == "eta_step") cfg.eta_step = std::stod(val);
      else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "emit_svg") cfg.emit_svg = parse_bool(val, key);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "threads") cfg.threads = static_cast<unsigned>(std::stoul(val));
      else throw ArgumentError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ArgumentError*>(&e)) throw;
      throw ArgumentError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
}

inline double round12(double v) { return std::stod(format_number(v)); }

inline Json matrix_json12(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({round12(m(i, j).real()), round12(m(i, j).imag())}));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rounds every floating-point number in a document to 12 significant digits.
inline void round_json(Json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_array() || j.is_object()) {
    for (auto& v : j) round_json(v);
  }
}

inline std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 1) throw ArgumentError("invalid n value '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ArgumentError("empty n list");
  return out;
}

inline std::string output_stem(const std::string& sub, const std::string& tag) {
  if (!tag.empty()) return sub + "-" + tag;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return sub + "-" + buf;
}

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& sub, const std::string& tag,
                                         const std::string& ext) {
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir / (output_stem(sub, tag) + ext);
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ArgumentError("cannot write '" + p.string() + "'");
  f << content;
}

inline Scenario load_valid_scenario(const std::string& path) {
  Scenario sc = load_scenario(path);
  if (sc.preparations.empty() || sc.measurements.empty())
    throw ArgumentError("scenario '" + path + "' needs at least one preparation and one measurement");
  const auto rep = validate(sc);
  if (!rep.ok()) throw ArgumentError("scenario '" + path + "' is invalid:\n" + rep.summary());
  return sc;
}

inline Json report_json(const FeasibilityReport& rep, const ConicProblem& problem) {
  Json j;
  j["status"] = to_string(rep.status);
  j["max_primal_residual"] = std::isfinite(rep.max_primal_residual) ? Json(rep.max_primal_residual) : Json(nullptr);
  j["certificate_gap"] = rep.certificate_gap;
  j["farkas_consistent"] = rep.farkas_consistent;
  j["iterations"] = rep.iterations;
  j["diagnostics"] = rep.diagnostics;
  j["variable_dim"] = problem.variable_dim;
  j["equalities"] = problem.equalities.rows();
  j["nonnegatives"] = problem.nonnegatives.rows();
  j["psd_block"] = problem.psd_block ? Json(*problem.psd_block) : Json(nullptr);
  if (rep.status == Status::Feasible && rep.primal && problem.operator_dim)
    j["primal_operator"] = matrix_json12(primal_operator(rep, problem).matrix());
  if (rep.certificate) j["certificate"] = {{"residual", rep.certificate->residual}, {"gap", rep.certificate->gap}};
  return j;
}

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// examples --verify

struct Verifier {
  std::ostream& out;
  int failures = 0;

  void check(bool ok, const std::string& what, double value) {
    out << (ok ? "[ok]   " : "[FAIL] ") << what << " (value " << format_number(value) << ")\n";
    if (!ok) ++failures;
  }
};

inline int run_examples_verify(Streams s, const RunConfig& cfg) {
  Verifier v{s.out};
  const SolverConfig solver = cfg.solver();

  // Mazurek operators and the closed-form inequality value.
  {
    const Scenario sc = mazurek_scenario();
    double worst = 0.0;
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t bp = 0; bp < 2; ++bp)
          worst = std::max(worst, std::abs(trace_product(sc.preparations[2 * t + b].op, sc.measurements[t][bp]) - (b == bp ? 1.0 : 0.0)));
    v.check(worst <= 1e-12, "mazurek tr(sigma_tb M_tb') = delta_bb'", worst);
    double cf = 0.0;
    for (double mu : {0.0, 0.3, 1.0})
      for (double eta : {0.0, 0.55, 1.0}) {
        const Scenario noisy = apply_noise(sc, NoiseSetting(mu, eta));
        double sum = 0.0;
        for (std::size_t i = 0; i < 6; ++i) sum += born(noisy.preparations[i], noisy.measurements[i / 2].effects[i % 2]);
        cf = std::max(cf, std::abs(sum - mazurek_inequality_closed_form(mu, eta)));
      }
    v.check(cf <= 1e-10, "mazurek inequality closed form residual <= 1e-10", cf);
    const auto r_in = solve(assemble_pseudo(sc, 3, NoiseSetting(1.0, 1.0)), solver);
    v.check(r_in.status == Status::Infeasible, "mazurek n=3 (mu, eta) = (1, 1) Infeasible", r_in.certificate_gap);
    const auto r_fe = solve(assemble_pseudo(sc, 3, NoiseSetting(0.0, 0.9)), solver);
    v.check(r_fe.status == Status::Feasible, "mazurek n=3 (mu, eta) = (0, 0.9) Feasible", r_fe.max_primal_residual);
  }

  // SIC-POVM overlaps and the explicit pseudo-broadcasting maps.
  {
    const auto vecs = sic_qubit_vectors();
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(std::norm(vecs[i].dot(vecs[j])) - (2.0 * (i == j) + 1.0) / 3.0));
    v.check(worst <= 1e-12, "SIC overlaps (2 delta + 1)/3", worst);
    const Scenario sic = sic_qubit_scenario();
    for (std::size_t n = 1; n <= 4; ++n) {
      const double r = constraint_residual(assemble_pseudo(sic, n), sic_xi(n));
      v.check(r <= 1e-10, "SIC \xCE\x9E" + std::to_string(n) + " residual \xE2\x89\xA4 1e-10", r);
    }
    const auto rep = solve(assemble_broadcast(FullStateSpace{}, {std::vector<Povm>{sic_qubit_povm()}}, 2), solver);
    v.check(rep.status == Status::Infeasible && rep.certificate_gap >= cfg.cert_tol, "SIC not broadcastable (1 -> 2)",
            rep.certificate_gap);
  }

  // Five-dimensional norm-1 POVM.
  {
    for (double a : {0.25, 0.5, 0.75}) {
      const Povm e = norm1_example(a);
      const NoncontextualModel m = norm1_example_model(a);
      double fixed = 0.0;
      for (const auto& eff : e.effects) fixed = std::max(fixed, max_abs_diff(mp_heisenberg(m, eff.op), eff.op));
      v.check(fixed <= 1e-12, "5dim fixed-point residual \xE2\x89\xA4 1e-12 at a = " + format_number(a), fixed);
      const double c = commutator_norm(e[1].matrix(), e[2].matrix());
      v.check(std::abs(c - a * (1 - a) / 2) <= 1e-10, "5dim ||[E2, E3]|| = a(1-a)/2 at a = " + format_number(a), c);
      const auto dec = norm1_decompose(e);
      double pres = 1.0;
      if (const auto* d = std::get_if<Norm1Decomposition>(&dec)) {
        pres = 0.0;
        for (std::size_t k = 0; k < 3; ++k) pres = std::max(pres, max_abs_diff(d->projective_parts[k], basis_projector(5, k + 2)));
      }
      v.check(pres <= 1e-9, "5dim norm-1 projective parts |2>,|3>,|4> at a = " + format_number(a), pres);
    }
  }

  // Qutrit non-disturbing pair.
  {
    const auto [a, b] = qutrit_nondisturb_pair();
    const auto rep = solve(assemble_broadcast(FullStateSpace{}, {std::vector<Povm>{a, b}}, 2), solver);
    v.check(rep.status == Status::Infeasible, "qutrit pair {A, B} not broadcastable", rep.certificate_gap);
    v.check(!commutation_report({a[0], b[0]}).is_commutative, "qutrit pair does not commute",
            commutator_norm(a[0].matrix(), b[0].matrix()));
  }

  s.out << (v.failures ? "examples: " + std::to_string(v.failures) + " check(s) failed\n" : "examples: all checks passed\n");
  return v.failures ? kVerifyFailed : kOk;
}

// ---------------------------------------------------------------------------
// diagnose

inline Json diagnose_json(const Scenario& sc) {
  Json j;
  const auto val = validate(sc);
  j["valid"] = val.ok();
  j["violations"] = Json::array();
  for (const auto& v : val.violations)
    j["violations"].push_back({{"kind", to_string(v.kind)}, {"subject", v.subject}, {"residual", v.residual}});

  const auto states = classify_states(sc.preparations);
  j["states"] = {{"verdict", to_string(states.verdict)}, {"max_commutator_norm", states.commutation.max_norm}};
  if (states.commutation.worst_pair)
    j["states"]["worst_pair"] = {sc.preparations[states.commutation.worst_pair->first].name,
                                 sc.preparations[states.commutation.worst_pair->second].name};

  j["measurements"] = Json::array();
  std::vector<HermitianOperator> all;
  for (const auto& m : sc.measurements) {
    Json mj;
    mj["name"] = m.name;
    const auto comm = commutation_report(operators_of(m));
    mj["commutative"] = comm.is_commutative;
    mj["max_commutator_norm"] = comm.max_norm;
    mj["rank_one"] = is_rank_one_povm(m);
    try {
      const auto dec = norm1_decompose(m);
      if (const auto* bad = std::get_if<NotNorm1>(&dec)) {
        mj["norm1"] = {{"ok", false}, {"effect", m.effects[bad->index].name}, {"norm", bad->norm}};
      } else {
        mj["norm1"] = {{"ok", true}, {"delta_residual", std::get<Norm1Decomposition>(dec).delta_residual}};
      }
    } catch (const DeltaViolation& e) {
      mj["norm1"] = {{"ok", false}, {"error", e.what()}};
    }
    for (const auto& e : m.effects) all.push_back(e.op);
    j["measurements"].push_back(std::move(mj));
  }
  const auto eff = commutation_report(all);
  j["effects_commutative"] = eff.is_commutative;
  j["effects_max_commutator_norm"] = eff.max_norm;
  return j;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Streams s{out, err};
  CLI::App app{"Certify operational contextuality with broadcasting and pseudo-broadcasting feasibility programs", "ncb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ncb 1.0.0");

  std::string config_path, tag, log_level = "warning";
  double feas_tol = 0, cert_tol = 0, mu_step = 0, eta_step = 0;
  std::size_t n_max = 0;
  std::string output_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<CLI::Option*> cfg_opts;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file (overrides $NCB_CONFIG)");
    cfg_opts.push_back(sub->add_option("--feas-tol", feas_tol, "primal residual tolerance"));
    cfg_opts.push_back(sub->add_option("--cert-tol", cert_tol, "minimum Farkas gap"));
    cfg_opts.push_back(sub->add_option("--n-max", n_max, "largest allowed n"));
    cfg_opts.push_back(sub->add_option("--output-dir", output_dir, "directory for output files"));
    cfg_opts.push_back(sub->add_option("--seed", seed, "seed for randomized checks"));
    cfg_opts.push_back(sub->add_option("--threads", threads, "worker threads for scans (0 = all cores)"));
    sub->add_option("--tag", tag, "output file tag (default: UTC timestamp)");
    sub->add_option("--log-level", log_level, "debug, info, warning, error or off")
        ->check(CLI::IsMember({"debug", "info", "warning", "error", "off"}));
  };

  auto* scan = app.add_subcommand("scan", "noise-grid scan of a scenario family");
  std::string scenario_name = "mazurek", n_spec = "3";
  bool svg = false, tp_diag = false;
  add_common(scan);
  scan->add_option("--scenario", scenario_name, "scenario family")->check(CLI::IsMember({"mazurek"}));
  scan->add_option("--n", n_spec, "comma-separated list of n");
  auto* mu_opt = scan->add_option("--mu-step", mu_step, "dephasing grid step");
  auto* eta_opt = scan->add_option("--eta-step", eta_step, "visibility grid step");
  auto* svg_opt = scan->add_flag("--svg", svg, "also write an SVG heatmap");
  scan->add_flag("--tp-diagnostic", tp_diag, "also solve without trace-preservation rows");

  auto* check = app.add_subcommand("check", "feasibility report for a scenario file");
  std::string file, program = "pseudo";
  std::size_t n = 2;
  add_common(check);
  check->add_option("--file", file, "scenario JSON")->required();
  check->add_option("--n", n, "number of output legs");
  check->add_option("--program", program, "pseudo, measurement-broadcast or state-broadcast")
      ->check(CLI::IsMember({"pseudo", "measurement-broadcast", "state-broadcast"}));

  auto* diagnose = app.add_subcommand("diagnose", "structural report for a scenario file");
  add_common(diagnose);
  diagnose->add_option("--file", file, "scenario JSON")->required();

  auto* witness = app.add_subcommand("witness", "contextuality witness from an infeasible scenario");
  add_common(witness);
  witness->add_option("--file", file, "scenario JSON")->required();
  witness->add_option("--n", n, "number of output legs");

  auto* examples = app.add_subcommand("examples", "built-in examples");
  bool verify = false;
  std::string export_name;
  add_common(examples);
  examples->add_flag("--verify", verify, "run every built-in check");
  examples->add_option("--export", export_name, "write a built-in scenario as JSON to the output directory")
      ->check(CLI::IsMember({"mazurek", "sic_qubit", "qutrit_nondisturb"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    static const std::map<std::string, LogLevel> levels{{"debug", LogLevel::Debug}, {"info", LogLevel::Info},
                                                        {"warning", LogLevel::Warning}, {"error", LogLevel::Error},
                                                        {"off", LogLevel::Off}};
    set_log_level(levels.at(log_level));

    RunConfig cfg;
    if (const char* env = std::getenv("NCB_CONFIG"); env && *env) apply_config_file(cfg, env);
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    const auto given = [&](const CLI::Option* o) {
      return std::any_of(cfg_opts.begin(), cfg_opts.end(), [&](const CLI::Option* c) { return c == o && c->count() > 0; });
    };
    for (auto* o : cfg_opts) {
      if (!given(o)) continue;
      const std::string name = o->get_name();
      if (name == "--feas-tol") cfg.feas_tol = feas_tol;
      else if (name == "--cert-tol") cfg.cert_tol = cert_tol;
      else if (name == "--n-max") cfg.n_max = n_max;
      else if (name == "--output-dir") cfg.output_dir = output_dir;
      else if (name == "--seed") cfg.seed = seed;
      else if (name == "--threads") cfg.threads = threads;
    }
    if (mu_opt->count()) cfg.mu_step = mu_step;
    if (eta_opt->count()) cfg.eta_step = eta_step;
    if (svg_opt->count()) cfg.emit_svg = svg;
    cfg.check();

    if (*scan) {
      const auto ns = parse_n_list(n_spec);
      for (auto k : ns)
        if (k > cfg.n_max) throw ArgumentError("n = " + std::to_string(k) + " exceeds n_max = " + std::to_string(cfg.n_max));
      ScanOptions so;
      so.solver = cfg.solver();
      so.threads = cfg.threads;
      so.tp_diagnostic = tp_diag;
      const RegionTable table = scan_mazurek(unit_grid(cfg.mu_step), unit_grid(cfg.eta_step), ns, so);
      std::ostringstream csv;
      write_csv(table, csv);
      const auto path = output_path(cfg, "scan", tag, ".csv");
      write_file(path, csv.str());
      out << csv.str();
      err << "wrote " << path.string() << '\n';
      if (cfg.emit_svg) {
        std::ostringstream svgs;
        write_svg(table, svgs);
        const auto p = output_path(cfg, "scan", tag, ".svg");
        write_file(p, svgs.str());
        err << "wrote " << p.string() << '\n';
      }
      if (tp_diag) {
        std::ostringstream d;
        write_tp_diagnostic_csv(table, d);
        const auto p = output_path(cfg, "scan", tag.empty() ? "" : tag, "-tp.csv");
        write_file(p, d.str());
        err << "wrote " << p.string() << '\n';
      }
      return kOk;
    }

    if (*check) {
      if (n < 1 || n > cfg.n_max) throw ArgumentError("n must lie in 1.." + std::to_string(cfg.n_max));
      const Scenario sc = load_valid_scenario(file);
      ConicProblem problem;
      if (program == "pseudo") {
        problem = assemble_pseudo(sc, n);
      } else if (program == "measurement-broadcast") {
        problem = assemble_broadcast(FullStateSpace{}, {sc.measurements}, n);
      } else {
        problem = assemble_broadcast(sc.preparations, {FullObservableAlgebra{}}, n);
      }
      const FeasibilityReport rep = solve(problem, cfg.solver());
      Json j = report_json(rep, problem);
      j["program"] = program;
      j["n"] = n;
      if (program == "pseudo" && rep.status == Status::Infeasible) j["witness"] = witness_to_json(extract_witness(rep, problem, &sc));
      round_json(j);
      const std::string text = j.dump(2) + "\n";
      const auto path = output_path(cfg, "check", tag, ".json");
      write_file(path, text);
      out << text;
      err << "wrote " << path.string() << '\n';
      return rep.status == Status::Indeterminate ? kIndeterminate : kOk;
    }

    if (*diagnose) {
      const Scenario sc = load_scenario(file);
      if (sc.preparations.empty() || sc.measurements.empty())
        throw ArgumentError("scenario '" + file + "' needs at least one preparation and one measurement");
      Json j = diagnose_json(sc);
      round_json(j);
      const std::string text = j.dump(2) + "\n";
      const auto path = output_path(cfg, "diagnose", tag, ".json");
      write_file(path, text);
      out << text;
      err << "wrote " << path.string() << '\n';
      return kOk;
    }

    if (*witness) {
      if (n < 1 || n > cfg.n_max) throw ArgumentError("n must lie in 1.." + std::to_string(cfg.n_max));
      const Scenario sc = load_valid_scenario(file);
      const ConicProblem problem = assemble_pseudo(sc, n);
      const FeasibilityReport rep = solve(problem, cfg.solver());
      if (rep.status == Status::Feasible) {
        err << "scenario is 1->" << n << " pseudo-broadcastable; no witness exists at this n\n";
        return kWitnessOnFeasible;
      }
      if (rep.status == Status::Indeterminate) {
        err << "solver could not decide feasibility: " << rep.diagnostics << '\n';
        return kIndeterminate;
      }
      Json j = witness_to_json(extract_witness(rep, problem, &sc));
      j["n"] = n;
      round_json(j);
      const std::string text = j.dump(2) + "\n";
      const auto path = output_path(cfg, "witness", tag, ".json");
      write_file(path, text);
      out << text;
      err << "wrote " << path.string() << '\n';
      return kOk;
    }

    if (*examples) {
      if (!export_name.empty()) {
        const auto obj = build_example(export_name);
        std::filesystem::create_directories(cfg.output_dir);
        const auto p = std::filesystem::path(cfg.output_dir) / (export_name + ".json");
        save_scenario(std::get<Scenario>(obj), p.string());
        err << "wrote " << p.string() << '\n';
        if (!verify) return kOk;
      }
      if (verify) return run_examples_verify(s, cfg);
      out << "mazurek\nsic_qubit\nnorm1_example\nnorm1_model\nqutrit_nondisturb\nsic_xi\n";
      return kOk;
    }
  } catch (const std::invalid_argument& e) {  // ArgumentError, ShapeError, FormatError
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::length_error& e) {  // SizeError
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {  // UnsupportedDimension
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace ncb::cli
