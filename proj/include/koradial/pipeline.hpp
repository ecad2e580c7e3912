#pragma once

/**
 * @file pipeline.hpp
 * @brief solve → profile → classify → verify, with CSV and plain-text output.
 *
 * Exit status: 0 success, 1 configuration or I/O failure, 2 Picard iteration
 * did not converge, 3 overflow inside [0, r_max], 4 no rule applies.
 */

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "koradial/classifier.hpp"
#include "koradial/config.hpp"
#include "koradial/oracle.hpp"
#include "koradial/picard.hpp"
#include "koradial/transforms.hpp"

namespace koradial {

enum class ExitCode : int {
  Ok = 0,
  ConfigError = 1,
  NotConverged = 2,
  Overflow = 3,
  HypothesesNotMet = 4,
};

inline const char* kCsvHeader =
    "r,u,v,du,dv,P1,P2,Plower,Qlower,Pbar1,Pbar2,zinv_bound,ko_bound_u,ko_bound_v";

struct RunResult {
  ExitCode exit = ExitCode::Ok;
  std::string report;
  std::string csv;
  std::optional<ClassificationReport> classification;
  std::optional<SolutionPair> solution;
  std::string overflow_note;
};

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// KO⁻¹(√(2c̄) P̄(r_k)) when P̄ is available and below KO(∞).
inline std::optional<double> ko_bound(const PartialFn& pbar, const FunctionTable& ko_inv, double cbar,
                                      std::size_t k) {
  if (!pbar.available(k)) return std::nullopt;
  const double arg = std::sqrt(2.0 * cbar) * pbar.values[k];
  if (arg >= ko_inv.domain_hi()) return std::nullopt;
  return arg <= 0.0 ? ko_inv.range_lo() : ko_inv(arg);
}

inline std::string build_csv(const IntegralProfile& prof, const ProblemSpec& spec,
                             const SolutionPair* sol) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  auto cell = [&](std::optional<double> v) { out << ',' << (v ? num(*v) : std::string()); };
  auto part = [](const PartialFn& f, std::size_t k) -> std::optional<double> {
    if (!f.available(k)) return std::nullopt;
    return f.values[k];
  };
  for (std::size_t k = 0; k < prof.grid.size(); ++k) {
    out << num(prof.grid[k]);
    if (sol) {
      cell(sol->u[k]);
      cell(sol->v[k]);
      cell(sol->du[k]);
      cell(sol->dv[k]);
    } else {
      for (int i = 0; i < 4; ++i) cell(std::nullopt);
    }
    cell(prof.p1_tab[k]);
    cell(prof.p2_tab[k]);
    cell(prof.plower[k]);
    cell(prof.qlower[k]);
    cell(part(prof.pbar1, k));
    cell(part(prof.pbar2, k));
    cell(part(prof.zinv_sum, k));
    cell(ko_bound(prof.pbar1, prof.ko1_inv, spec.nonlin.env1.cbar, k));
    cell(ko_bound(prof.pbar2, prof.ko2_inv, spec.nonlin.env2.cbar, k));
    out << '\n';
  }
  return out.str();
}

inline ProfileOptions profile_options(const RunConfig& cfg) {
  ProfileOptions opts;
  opts.tail.start = cfg.numerics.tail_radius_start;
  opts.tail.doublings = cfg.numerics.tail_doublings;
  return opts;
}

inline void write_limits(std::ostream& out, const IntegralProfile& prof) {
  if (!prof.limits) return;
  const auto& l = *prof.limits;
  const std::pair<const char*, const LimitClass*> rows[] = {
      {"Z(inf)", &l.z},           {"KO1(inf)", &l.ko1},           {"KO2(inf)", &l.ko2},
      {"Pbar1(inf)", &l.pbar1},   {"Pbar2(inf)", &l.pbar2},       {"Pbar1eps(inf)", &l.pbar1_eps},
      {"Pbar2eps(inf)", &l.pbar2_eps}, {"Plower(inf)", &l.plower}, {"Qlower(inf)", &l.qlower}};
  out << "\n== limits at infinity ==\n";
  for (const auto& [name, c] : rows) {
    out << "  " << name << ": " << to_string(c->verdict);
    if (!std::isnan(c->estimate)) out << " (" << short_num(c->estimate) << ")";
    if (!c->note.empty()) out << "  -- " << c->note;
    out << '\n';
  }
  auto radius = [](const std::optional<double>& r) {
    return r ? short_num(*r) : std::string("not found");
  };
  out << "  R1 (tail grid): " << radius(l.r_monotone1) << "\n"
      << "  R2 (tail grid): " << radius(l.r_monotone2) << "\n";
}

inline void write_classification(std::ostream& out, const ClassificationReport& rep) {
  out << "\n== classification ==\n"
      << "verdict: " << to_string(rep.verdict) << " via " << to_string(rep.theorem) << '\n';
  for (const auto& e : rep.evidence) {
    if (e.flag) out << "  " << e.criterion << ": " << (*e.flag ? "yes" : "no") << " (" << e.detail << ")\n";
  }
  for (const auto& w : rep.warnings) out << "  warning: " << w << '\n';
}

inline void write_audit(std::ostream& out, const AprioriReport& rep) {
  out << "\n== a priori bounds ==\n";
  for (const auto& c : rep.checks) {
    out << "  " << c.name << ": " << (c.pass ? "pass" : "FAIL") << (c.informational ? " (info)" : "")
        << ", max(lhs - rhs) = " << short_num(c.max_violation) << " at r = " << short_num(c.worst_radius)
        << ", nodes " << c.nodes_checked;
    if (c.nodes_unavailable) out << ", unavailable " << c.nodes_unavailable;
    if (!c.note.empty()) out << "  -- " << c.note;
    out << '\n';
  }
  out << "  C1 = " << short_num(rep.c1) << ", C2 = " << short_num(rep.c2) << '\n';
}

inline void write_sandwich(std::ostream& out, const SandwichReport& rep) {
  out << "\n== sandwich bounds ==\n";
  for (const auto* s : {&rep.lower_u, &rep.upper_u, &rep.lower_v, &rep.upper_v}) {
    out << "  " << s->name << ": " << (s->pass ? "pass" : "FAIL") << ", nodes " << s->nodes_checked
        << ", vacuous " << s->vacuous_nodes;
    if (s->nodes_checked) out << ", max(lhs - rhs) = " << short_num(s->max_violation);
    if (!s->note.empty()) out << "  -- " << s->note;
    out << '\n';
  }
}

}  // namespace detail

/**
 * Full pipeline. With `with_solve` false only the profile and the verdict
 * are produced (no Picard, no oracle).
 */
inline RunResult run_pipeline(const RunConfig& cfg, bool with_solve = true) {
  RunResult res;
  const ProblemSpec spec = make_problem(cfg);
  const RadialGrid grid = make_grid(cfg.numerics);
  std::ostringstream out;
  out << "ko-radial report\n\n== configuration ==\n" << emit_config(cfg);

  bool overflowed = false;
  if (with_solve) {
    IterationConfig it;
    it.tol = cfg.numerics.tol;
    it.max_iter = cfg.numerics.max_iter;
    it.audit = true;
    out << "\n== solve ==\n";
    try {
      SolutionPair sol = picard_solve(spec, grid, it);
      out << "iterations: " << sol.iterations << "\nconverged: " << (sol.converged ? "yes" : "no")
          << "\nfinal sup delta: " << detail::short_num(sol.sup_delta_history.back())
          << "\nmonotone iterates: " << (audit_monotone_iterates(sol.history) ? "yes" : "no")
          << "\nu(r_max) = " << detail::num(sol.u.back()) << "\nv(r_max) = " << detail::num(sol.v.back())
          << '\n';
      sol.history = {};
      if (!sol.converged) res.exit = ExitCode::NotConverged;
      try {
        const auto ode = direct_integrate(spec, grid);
        const auto d = compare_solutions(sol, ode);
        out << "oracle: sup_abs = " << detail::short_num(d.sup_abs)
            << ", sup_rel = " << detail::short_num(d.sup_rel) << " at r = " << detail::short_num(d.argmax_radius)
            << '\n';
      } catch (const Error& e) {
        out << "oracle: " << e.what() << '\n';
      }
      res.solution = std::move(sol);
    } catch (const Error& e) {
      if (e.code() != Errc::Overflow) throw;
      overflowed = true;
      res.exit = ExitCode::Overflow;
      res.overflow_note = e.what();
      out << "overflow: " << e.what() << '\n';
    }
  }

  const IntegralProfile prof = build_profile(spec, grid, detail::profile_options(cfg));
  detail::write_limits(out, prof);
  ClassificationReport rep = classify(spec, prof);
  bool growing = overflowed;
  if (res.solution) growing = growing || res.solution->u.back() > 1e6 || res.solution->v.back() > 1e6;
  add_consistency_warnings(rep, prof, growing);
  detail::write_classification(out, rep);

  if (res.solution && res.solution->converged) {
    detail::write_audit(out, audit_apriori_bounds(*res.solution, prof, spec));
    if (rep.theorem == Theorem::T4 || rep.theorem == Theorem::T5i || rep.theorem == Theorem::T5ii) {
      detail::write_sandwich(out, verify_sandwich(*res.solution, prof, spec));
    }
  }
  if (res.exit == ExitCode::Ok && rep.verdict == Verdict::HypothesesNotMet) {
    res.exit = ExitCode::HypothesesNotMet;
  }
  out << "\nexit status: " << int(res.exit) << '\n';

  res.csv = detail::build_csv(prof, spec, res.solution ? &*res.solution : nullptr);
  res.report = out.str();
  res.classification = std::move(rep);
  return res;
}

inline RunResult run_check_envelope(const RunConfig& cfg) {
  const ProblemSpec spec = make_problem(cfg);
  const auto env = check_c2_envelope(spec.nonlin, default_lattice());
  const auto mono = check_monotone(spec.nonlin, default_lattice());
  std::ostringstream out;
  out << "ko-radial envelope audit\n\n== configuration ==\n" << emit_config(cfg) << "\n== envelope ==\n"
      << "holds: " << (env.holds ? "yes" : "no") << "\nworst ratio: " << detail::num(env.worst_ratio)
      << " at t = " << detail::short_num(env.worst_t) << ", s = " << detail::short_num(env.worst_s)
      << " (f" << env.worst_component << ")\n"
      << "monotone in each variable: " << (mono.holds ? "yes" : "no")
      << " (worst drop " << detail::short_num(mono.worst_drop) << ")\n";
  RunResult res;
  res.exit = env.holds && mono.holds ? ExitCode::Ok : ExitCode::HypothesesNotMet;
  out << "\nexit status: " << int(res.exit) << '\n';
  res.report = out.str();
  return res;
}

struct SweepRow {
  std::size_t index = 0;
  std::vector<std::string> values;
  int exit = 0;
  std::string verdict;
  std::string theorem;
  std::string u_end, v_end;
  std::string error;
};

/// One row per cell of the Cartesian product of cfg.sweep, in cell order.
inline std::vector<SweepRow> run_sweep_cells(const RunConfig& cfg, unsigned threads = 0) {
  RunConfig base = cfg;
  base.sweep.clear();
  base.output = {};
  const RawConfig raw = parse_raw_config(emit_config(base));

  std::size_t cells = 1;
  for (const auto& axis : cfg.sweep) cells *= axis.values.size();
  std::vector<SweepRow> rows(cells);

  auto run_cell = [&](std::size_t index) {
    SweepRow& row = rows[index];
    row.index = index;
    RawConfig cell = raw;
    std::size_t rest = index;
    for (auto it = cfg.sweep.rbegin(); it != cfg.sweep.rend(); ++it) {
      const auto& v = it->values[rest % it->values.size()];
      rest /= it->values.size();
      row.values.insert(row.values.begin(), v);
      cell.set(it->key, v);
    }
    try {
      const RunResult r = run_pipeline(build_config(cell));
      row.exit = int(r.exit);
      row.verdict = to_string(r.classification->verdict);
      row.theorem = to_string(r.classification->theorem);
      if (r.solution) {
        row.u_end = detail::num(r.solution->u.back());
        row.v_end = detail::num(r.solution->v.back());
      }
      if (!r.overflow_note.empty()) row.error = r.overflow_note;
    } catch (const Error& e) {
      row.exit = int(ExitCode::ConfigError);
      row.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, cells));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells; i = next++) run_cell(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

inline RunResult run_sweep(const RunConfig& cfg, unsigned threads = 0) {
  if (cfg.sweep.empty()) throw Error(Errc::ValidationError, "sweep: no [sweep] axes given");
  const auto rows = run_sweep_cells(cfg, threads);
  std::ostringstream csv, rep;
  csv << "cell";
  for (const auto& axis : cfg.sweep) csv << ',' << axis.key;
  csv << ",exit,verdict,theorem,u_rmax,v_rmax\n";
  rep << "ko-radial sweep\n\n== configuration ==\n" << emit_config(cfg) << "\n== cells ==\n";
  for (const auto& row : rows) {
    csv << row.index;
    for (const auto& v : row.values) csv << ',' << v;
    csv << ',' << row.exit << ',' << row.verdict << ',' << row.theorem << ',' << row.u_end << ','
        << row.v_end << '\n';
    rep << "  cell " << row.index << ":";
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      rep << ' ' << cfg.sweep[i].key << '=' << row.values[i];
    }
    rep << "  -> " << (row.verdict.empty() ? "-" : row.verdict) << " via "
        << (row.theorem.empty() ? "-" : row.theorem) << ", exit " << row.exit;
    if (!row.error.empty()) rep << "  -- " << row.error;
    rep << '\n';
  }
  RunResult res;
  res.csv = csv.str();
  res.report = rep.str();
  return res;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace koradial
