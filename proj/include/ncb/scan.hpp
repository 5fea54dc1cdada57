#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "ncb/broadcast.hpp"
#include "ncb/builtin.hpp"
#include "ncb/witness.hpp"

namespace ncb {

struct ScanRow {
  double mu = 0.0;
  double eta = 0.0;
  std::size_t n = 0;
  Status status = Status::Indeterminate;
  double residual_or_gap = 0.0;  // primal residual when Feasible, certificate gap when Infeasible
  std::optional<double> witness_value;  // violation of the extracted witness
  std::optional<ContextualityWitness> witness;
  std::optional<Status> status_without_tp;
  bool farkas_consistent = true;

  ScanRow() = default;
  ScanRow(double mu_, double eta_, std::size_t n_) : mu(mu_), eta(eta_), n(n_) {}
};

struct RegionTable {
  std::vector<ScanRow> rows;

  [[nodiscard]] const ScanRow* find(double mu, double eta, std::size_t n) const {
    for (const auto& r : rows)
      if (r.n == n && std::abs(r.mu - mu) < 1e-12 && std::abs(r.eta - eta) < 1e-12) return &r;
    return nullptr;
  }
};

struct ScanOptions {
  SolverConfig solver;
  unsigned threads = 0;  // 0: hardware concurrency
  bool tp_diagnostic = false;
  bool keep_witnesses = false;
};

/// {0, step, 2 step, ..., 1}; step must divide 1 up to rounding.
inline std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ArgumentError("grid step must lie in (0, 1]");
  const double count = 1.0 / step;
  const auto k = static_cast<long>(std::llround(count));
  if (std::abs(count - static_cast<double>(k)) > 1e-9 * count)
    throw ArgumentError("grid step must divide 1 evenly");
  std::vector<double> g;
  for (long i = 0; i <= k; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(k));
  return g;
}

inline ScanRow scan_point(const Scenario& base, double mu, double eta, std::size_t n, const ScanOptions& opts) {
  ScanRow row(mu, eta, n);
  const NoiseSetting noise(mu, eta);
  const Scenario noisy = apply_noise(base, noise);
  const ConicProblem problem = assemble_pseudo(noisy, n);
  const FeasibilityReport rep = solve(problem, opts.solver);
  row.status = rep.status;
  row.farkas_consistent = rep.farkas_consistent;
  if (rep.status == Status::Feasible) {
    row.residual_or_gap = rep.max_primal_residual;
  } else if (rep.status == Status::Infeasible) {
    row.residual_or_gap = rep.certificate_gap;
    ContextualityWitness w = extract_witness(rep, problem, &noisy);
    row.witness_value = w.violation();
    if (opts.keep_witnesses) row.witness = std::move(w);
  } else {
    row.residual_or_gap = std::min(rep.max_primal_residual, std::abs(rep.certificate_gap));
  }
  if (opts.tp_diagnostic) {
    AssemblyOptions ao;
    ao.include_tp = false;
    row.status_without_tp = solve(assemble_pseudo(noisy, n, std::nullopt, ao), opts.solver).status;
  }
  return row;
}

/// Pseudo-broadcasting verdicts of the noisy Mazurek family on a grid. Points
/// are solved concurrently; rows come back sorted by (mu, eta, n).
inline RegionTable scan_mazurek(const std::vector<double>& mu_grid, const std::vector<double>& eta_grid,
                                const std::vector<std::size_t>& n_list, const ScanOptions& opts = {}) {
  for (double v : mu_grid)
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("mu grid outside [0, 1]");
  for (double v : eta_grid)
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("eta grid outside [0, 1]");
  for (auto n : n_list)
    if (n < 1 || n > kDefaultMaxLegs) throw ArgumentError("n must lie in 1..4");

  std::vector<double> mus = mu_grid, etas = eta_grid;
  std::vector<std::size_t> ns = n_list;
  std::sort(mus.begin(), mus.end());
  std::sort(etas.begin(), etas.end());
  std::sort(ns.begin(), ns.end());

  struct Job {
    double mu, eta;
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (double mu : mus)
    for (double eta : etas)
      for (auto n : ns) jobs.push_back({mu, eta, n});

  const Scenario base = mazurek_scenario();
  RegionTable table;
  table.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        table.rows[i] = scan_point(base, jobs[i].mu, jobs[i].eta, jobs[i].n, opts);
      } catch (const SizeError&) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      } catch (const std::exception& e) {
        // Numerical trouble at one point is recorded, never fatal.
        table.rows[i] = ScanRow(jobs[i].mu, jobs[i].eta, jobs[i].n);
        log(LogLevel::Warning, std::string("scan point failed: ") + e.what());
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline void write_csv(const RegionTable& table, std::ostream& out) {
  out << "mu,eta,n,status,residual_or_gap,witness_value\n";
  for (const auto& r : table.rows) {
    out << format_number(r.mu) << ',' << format_number(r.eta) << ',' << r.n << ',' << to_string(r.status) << ','
        << format_number(r.residual_or_gap) << ',';
    if (r.witness_value) out << format_number(*r.witness_value);
    out << '\n';
  }
}

inline void write_tp_diagnostic_csv(const RegionTable& table, std::ostream& out) {
  out << "mu,eta,n,status,status_without_tp,changed\n";
  for (const auto& r : table.rows) {
    const char* other = r.status_without_tp ? to_string(*r.status_without_tp) : "";
    const bool changed = r.status_without_tp && *r.status_without_tp != r.status;
    out << format_number(r.mu) << ',' << format_number(r.eta) << ',' << r.n << ',' << to_string(r.status) << ',' << other << ','
        << (changed ? 1 : 0) << '\n';
  }
}

inline const char* status_color(Status s) {
  switch (s) {
    case Status::Feasible: return "#2e9d4a";
    case Status::Infeasible: return "#d43d3d";
    case Status::Indeterminate: return "#9a9a9a";
  }
  return "#000000";
}

/// One panel per n: cells colored by status over (mu, eta), with the
/// analytic inequality boundary eta = 4 / (3 (1 + mu)) overlaid.
inline void write_svg(const RegionTable& table, std::ostream& out) {
  std::vector<double> mus, etas;
  std::vector<std::size_t> ns;
  for (const auto& r : table.rows) {
    mus.push_back(r.mu);
    etas.push_back(r.eta);
    ns.push_back(r.n);
  }
  const auto uniq = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(mus);
  uniq(etas);
  uniq(ns);
  const double panel = 300.0, margin = 50.0, gap = 40.0;
  const double width = margin + static_cast<double>(ns.size()) * (panel + gap) + 120.0;
  const double height = margin + panel + 60.0;
  const auto index_of = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), x - 1e-12) - v.begin());
  };
  const double cw = panel / static_cast<double>(std::max<std::size_t>(1, mus.size()));
  const double ch = panel / static_cast<double>(std::max<std::size_t>(1, etas.size()));

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width) << "\" height=\""
      << format_number(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t p = 0; p < ns.size(); ++p) {
    const double x0 = margin + static_cast<double>(p) * (panel + gap);
    const double y0 = margin;
    out << "<text x=\"" << format_number(x0) << "\" y=\"" << format_number(y0 - 10) << "\">n = " << ns[p] << "</text>\n";
    for (const auto& r : table.rows) {
      if (r.n != ns[p]) continue;
      const double x = x0 + index_of(mus, r.mu) * cw;
      const double y = y0 + panel - (index_of(etas, r.eta) + 1.0) * ch;
      out << "<rect x=\"" << format_number(x) << "\" y=\"" << format_number(y) << "\" width=\"" << format_number(cw)
          << "\" height=\"" << format_number(ch) << "\" fill=\"" << status_color(r.status) << "\"/>\n";
    }
    // Analytic boundary through cell centers.
    if (mus.size() > 1 && etas.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\" points=\"";
      for (int k = 0; k <= 100; ++k) {
        const double mu = static_cast<double>(k) / 100.0;
        const double eta = mazurek_boundary(mu);
        if (eta > 1.0) continue;
        const double fx = (mu - mus.front()) / (mus.back() - mus.front());
        const double fy = (eta - etas.front()) / (etas.back() - etas.front());
        const double x = x0 + cw / 2 + fx * (panel - cw);
        const double y = y0 + panel - ch / 2 - fy * (panel - ch);
        out << format_number(x) << ',' << format_number(y) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<rect x=\"" << format_number(x0) << "\" y=\"" << format_number(y0) << "\" width=\"" << format_number(panel)
        << "\" height=\"" << format_number(panel) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << format_number(x0 + panel / 2 - 5) << "\" y=\"" << format_number(y0 + panel + 20) << "\">mu</text>\n";
    out << "<text x=\"" << format_number(x0 - 30) << "\" y=\"" << format_number(y0 + panel / 2) << "\">eta</text>\n";
  }
  const double lx = margin + static_cast<double>(ns.size()) * (panel + gap);
  const std::pair<Status, const char*> legend[] = {{Status::Feasible, "pseudo-broadcastable"},
                                                   {Status::Infeasible, "not pseudo-broadcastable"},
                                                   {Status::Indeterminate, "indeterminate"}};
  double ly = margin;
  for (const auto& [s, label] : legend) {
    out << "<rect x=\"" << format_number(lx) << "\" y=\"" << format_number(ly) << "\" width=\"12\" height=\"12\" fill=\""
        << status_color(s) << "\"/>\n";
    out << "<text x=\"" << format_number(lx + 18) << "\" y=\"" << format_number(ly + 11) << "\">" << label << "</text>\n";
    ly += 20;
  }
  out << "<text x=\"" << format_number(lx) << "\" y=\"" << format_number(ly + 11) << "\">- - inequality boundary</text>\n";
  out << "</svg>\n";
}

}  // namespace ncb
