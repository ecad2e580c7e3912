#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: a line-oriented `key = value` format with
 * `[section]` headers and `#` comments.
 *
 * Sections: problem, weight1, weight2, nonlinearity, numerics, output, sweep.
 * Keys in [sweep] name another key (`section.key`) and list comma-separated
 * values; a sweep runs the Cartesian product.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "koradial/error.hpp"
#include "koradial/grid.hpp"
#include "koradial/model.hpp"

namespace koradial {

struct WeightConfig {
  std::string family = "constant";  ///< constant | power_decay | power | tabulated
  double c = 1.0;
  double sigma = 0.0;  ///< power_decay exponent
  double k = 0.0;      ///< power exponent
  std::vector<double> radii;
  std::vector<double> values;

  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;
};

struct NonlinearityConfig {
  std::string family = "power_pair";  ///< power_pair | sum_power
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<double> cbar1, cbar2;  ///< explicit envelope constants

  friend bool operator==(const NonlinearityConfig&, const NonlinearityConfig&) = default;
};

struct NumericsConfig {
  double r_max = 2.0;
  std::size_t grid_points = 2048;  ///< number of cells
  std::string grading = "uniform";
  double grading_ratio = 1.001;
  double tol = 0.0;  ///< filled with 1e-10·(1 + a₁ + a₂) when absent
  std::size_t max_iter = 200;
  double tail_radius_start = 1.0;
  int tail_doublings = 12;

  friend bool operator==(const NumericsConfig&, const NumericsConfig&) = default;
};

struct OutputConfig {
  std::string csv_path;
  std::string report_path;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct SweepAxis {
  std::string key;  ///< section.key
  std::vector<std::string> values;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct RunConfig {
  int n_dim = 3;
  double a1 = 1.0;
  double a2 = 1.0;
  double eps = 0.5;
  double m1 = 1.0;
  double m2 = 1.0;
  WeightConfig weight1, weight2;
  NonlinearityConfig nonlinearity;
  NumericsConfig numerics;
  OutputConfig output;
  std::vector<SweepAxis> sweep;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sections of `key = value` entries, keeping the source line for messages.
struct RawConfig {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::vector<std::string> sweep_order;  ///< [sweep] keys in file order

  void set(const std::string& dotted, const std::string& value, int line = 0) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size()) {
      throw Error(Errc::ParseError, "expected section.key, got '" + dotted + "'");
    }
    const auto section = dotted.substr(0, dot), key = dotted.substr(dot + 1);
    if (section == "sweep" && !sections[section].count(key)) sweep_order.push_back(key);
    sections[section][key] = {value, line};
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string parse_error(int line, const std::string& reason) {
  return "line " + std::to_string(line) + ": " + reason;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::stringstream in(text);
  std::string line_text, section;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    if (const auto hash = line_text.find('#'); hash != std::string::npos) line_text.erase(hash);
    const std::string s = detail::trim(line_text);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw Error(Errc::ParseError, detail::parse_error(line, "malformed section header"));
      }
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      raw.sections[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ParseError, detail::parse_error(line, "expected 'key = value'"));
    }
    if (section.empty()) {
      throw Error(Errc::ParseError, detail::parse_error(line, "key outside of any [section]"));
    }
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw Error(Errc::ParseError, detail::parse_error(line, "empty key"));
    if (raw.sections[section].count(key)) {
      throw Error(Errc::ParseError, detail::parse_error(line, "duplicate key '" + key + "'"));
    }
    raw.set(section + "." + key, value, line);
  }
  return raw;
}

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(const RawConfig& raw) : raw_(raw) {}

  const RawConfig::Entry* find(const std::string& section, const std::string& key) {
    used_[section].push_back(key);
    auto s = raw_.sections.find(section);
    if (s == raw_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::optional<double> number(const std::string& section, const std::string& key) {
    const auto* e = find(section, key);
    if (!e) return std::nullopt;
    return to_double(*e, section + "." + key);
  }

  void number(const std::string& section, const std::string& key, double& out) {
    if (auto v = number(section, key)) out = *v;
  }

  template <class Int>
  void integer(const std::string& section, const std::string& key, Int& out) {
    const auto* e = find(section, key);
    if (!e) return;
    long long v = 0;
    const auto& s = e->value;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw Error(Errc::ParseError, parse_error(e->line, section + "." + key + ": not an integer"));
    }
    if (v < 0 && std::is_unsigned_v<Int>) {
      throw Error(Errc::ValidationError, section + "." + key + ": must be nonnegative");
    }
    out = static_cast<Int>(v);
  }

  void text(const std::string& section, const std::string& key, std::string& out) {
    if (const auto* e = find(section, key)) out = e->value;
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    std::vector<double> out;
    const auto* e = find(section, key);
    if (!e) return out;
    for (const auto& item : split_list(e->value)) out.push_back(to_double({item, e->line}, section + "." + key));
    return out;
  }

  /// Rejects keys and sections nobody asked for.
  void check_unknown() const {
    for (const auto& [section, keys] : raw_.sections) {
      if (section == "sweep") continue;
      auto u = used_.find(section);
      if (u == used_.end()) throw Error(Errc::ValidationError, section + ": unknown section");
      for (const auto& [key, entry] : keys) {
        if (std::find(u->second.begin(), u->second.end(), key) == u->second.end()) {
          throw Error(Errc::ValidationError, section + "." + key + ": unknown key");
        }
      }
    }
  }

 private:
  static double to_double(const RawConfig::Entry& e, const std::string& field) {
    double v = 0.0;
    const auto& s = e.value;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(Errc::ParseError, parse_error(e.line, field + ": not a finite number '" + s + "'"));
    }
    return v;
  }

  const RawConfig& raw_;
  std::map<std::string, std::vector<std::string>> used_;
};

inline void fail(const std::string& field, const std::string& reason) {
  throw Error(Errc::ValidationError, field + ": " + reason);
}

inline void read_weight(ConfigReader& in, const std::string& section, WeightConfig& w) {
  in.text(section, "family", w.family);
  in.number(section, "c", w.c);
  in.number(section, "sigma", w.sigma);
  in.number(section, "k", w.k);
  w.radii = in.list(section, "radii");
  w.values = in.list(section, "values");
  if (w.family != "constant" && w.family != "power_decay" && w.family != "power" &&
      w.family != "tabulated") {
    fail(section + ".family", "unknown weight family '" + w.family + "'");
  }
  if (!(w.c >= 0.0)) fail(section + ".c", "must be >= 0");
  if (w.family == "power" && !(w.k >= 0.0)) fail(section + ".k", "must be >= 0");
  if (w.family == "tabulated") {
    if (w.radii.empty() || w.radii.size() != w.values.size()) {
      fail(section + ".values", "radii and values must be non-empty lists of equal length");
    }
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      if (!(w.values[i] >= 0.0)) fail(section + ".values", "samples must be >= 0");
      if (i > 0 && !(w.radii[i] > w.radii[i - 1])) fail(section + ".radii", "must increase strictly");
    }
  }
}

}  // namespace detail

/// Builds and validates a RunConfig; defaults fill everything not given.
inline RunConfig build_config(const RawConfig& raw) {
  RunConfig cfg;
  detail::ConfigReader in(raw);
  using detail::fail;

  in.integer("problem", "n_dim", cfg.n_dim);
  in.number("problem", "a1", cfg.a1);
  in.number("problem", "a2", cfg.a2);
  in.number("problem", "eps", cfg.eps);
  if (cfg.n_dim < 3) fail("problem.n_dim", "N must be at least 3");
  if (!(cfg.a1 > 0.0)) fail("problem.a1", "must lie in (0, inf)");
  if (!(cfg.a2 > 0.0)) fail("problem.a2", "must lie in (0, inf)");
  if (!(cfg.eps > 0.0)) fail("problem.eps", "must be positive");
  cfg.m1 = in.number("problem", "m1").value_or(std::max(1.0, 1.0 / cfg.a1));
  cfg.m2 = in.number("problem", "m2").value_or(std::max(1.0, 1.0 / cfg.a2));
  if (!(cfg.m1 >= std::max(1.0, 1.0 / cfg.a1))) fail("problem.m1", "must be >= max(1, 1/a1)");
  if (!(cfg.m2 >= std::max(1.0, 1.0 / cfg.a2))) fail("problem.m2", "must be >= max(1, 1/a2)");

  detail::read_weight(in, "weight1", cfg.weight1);
  detail::read_weight(in, "weight2", cfg.weight2);

  auto& nl = cfg.nonlinearity;
  in.text("nonlinearity", "family", nl.family);
  in.number("nonlinearity", "alpha", nl.alpha);
  in.number("nonlinearity", "beta", nl.beta);
  nl.cbar1 = in.number("nonlinearity", "cbar1");
  nl.cbar2 = in.number("nonlinearity", "cbar2");
  if (nl.family != "power_pair" && nl.family != "sum_power") {
    fail("nonlinearity.family", "unknown family '" + nl.family + "'");
  }
  if (!(nl.alpha > 0.0)) fail("nonlinearity.alpha", "must be positive");
  if (!(nl.beta > 0.0)) fail("nonlinearity.beta", "must be positive");
  if (nl.cbar1 && !(*nl.cbar1 > 0.0)) fail("nonlinearity.cbar1", "must be positive");
  if (nl.cbar2 && !(*nl.cbar2 > 0.0)) fail("nonlinearity.cbar2", "must be positive");

  auto& num = cfg.numerics;
  in.number("numerics", "r_max", num.r_max);
  in.integer("numerics", "grid_points", num.grid_points);
  in.text("numerics", "grading", num.grading);
  in.number("numerics", "grading_ratio", num.grading_ratio);
  num.tol = in.number("numerics", "tol").value_or(1e-10 * (1.0 + cfg.a1 + cfg.a2));
  in.integer("numerics", "max_iter", num.max_iter);
  in.number("numerics", "tail_radius_start", num.tail_radius_start);
  in.integer("numerics", "tail_doublings", num.tail_doublings);
  if (!(num.r_max > 0.0)) fail("numerics.r_max", "must be positive");
  if (num.grid_points < 16) fail("numerics.grid_points", "must be at least 16");
  if (num.grading != "uniform" && num.grading != "geometric") {
    fail("numerics.grading", "must be uniform or geometric");
  }
  if (num.grading == "geometric" && !(num.grading_ratio > 1.0 && num.grading_ratio <= 1.2)) {
    fail("numerics.grading_ratio", "must lie in (1, 1.2]");
  }
  if (!(num.tol > 0.0)) fail("numerics.tol", "must be positive");
  if (num.max_iter < 1) fail("numerics.max_iter", "must be positive");
  if (!(num.tail_radius_start > 0.0)) fail("numerics.tail_radius_start", "must be positive");
  if (num.tail_doublings < 3) fail("numerics.tail_doublings", "must be at least 3");

  in.text("output", "csv_path", cfg.output.csv_path);
  in.text("output", "report_path", cfg.output.report_path);

  if (auto s = raw.sections.find("sweep"); s != raw.sections.end()) {
    for (const auto& key : raw.sweep_order) {
      const auto& entry = s->second.at(key);
      SweepAxis axis{key, detail::split_list(entry.value)};
      if (axis.values.empty()) {
        throw Error(Errc::ParseError, detail::parse_error(entry.line, "sweep." + key + ": no values"));
      }
      cfg.sweep.push_back(std::move(axis));
    }
  }
  in.check_unknown();
  return cfg;
}

inline RunConfig parse_config(const std::string& text) { return build_config(parse_raw_config(text)); }

/// Normalized text form; parse_config(emit_config(c)) == c.
inline std::string emit_config(const RunConfig& c) {
  using detail::format_double;
  std::ostringstream out;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
  };
  out << "[problem]\n"
      << "n_dim = " << c.n_dim << "\n"
      << "a1 = " << format_double(c.a1) << "\n"
      << "a2 = " << format_double(c.a2) << "\n"
      << "eps = " << format_double(c.eps) << "\n"
      << "m1 = " << format_double(c.m1) << "\n"
      << "m2 = " << format_double(c.m2) << "\n";
  for (int i : {1, 2}) {
    const auto& w = i == 1 ? c.weight1 : c.weight2;
    out << "\n[weight" << i << "]\n"
        << "family = " << w.family << "\n"
        << "c = " << format_double(w.c) << "\n"
        << "sigma = " << format_double(w.sigma) << "\n"
        << "k = " << format_double(w.k) << "\n";
    if (!w.radii.empty()) out << "radii = " << list(w.radii) << "\n";
    if (!w.values.empty()) out << "values = " << list(w.values) << "\n";
  }
  const auto& nl = c.nonlinearity;
  out << "\n[nonlinearity]\n"
      << "family = " << nl.family << "\n"
      << "alpha = " << format_double(nl.alpha) << "\n"
      << "beta = " << format_double(nl.beta) << "\n";
  if (nl.cbar1) out << "cbar1 = " << format_double(*nl.cbar1) << "\n";
  if (nl.cbar2) out << "cbar2 = " << format_double(*nl.cbar2) << "\n";
  const auto& n = c.numerics;
  out << "\n[numerics]\n"
      << "r_max = " << format_double(n.r_max) << "\n"
      << "grid_points = " << n.grid_points << "\n"
      << "grading = " << n.grading << "\n"
      << "grading_ratio = " << format_double(n.grading_ratio) << "\n"
      << "tol = " << format_double(n.tol) << "\n"
      << "max_iter = " << n.max_iter << "\n"
      << "tail_radius_start = " << format_double(n.tail_radius_start) << "\n"
      << "tail_doublings = " << n.tail_doublings << "\n";
  out << "\n[output]\n";
  if (!c.output.csv_path.empty()) out << "csv_path = " << c.output.csv_path << "\n";
  if (!c.output.report_path.empty()) out << "report_path = " << c.output.report_path << "\n";
  if (!c.sweep.empty()) {
    out << "\n[sweep]\n";
    for (const auto& axis : c.sweep) {
      out << axis.key << " = ";
      for (std::size_t i = 0; i < axis.values.size(); ++i) out << (i ? ", " : "") << axis.values[i];
      out << "\n";
    }
  }
  return out.str();
}

inline WeightFn make_weight(const WeightConfig& w) {
  if (w.family == "constant") return WeightFn::constant(w.c);
  if (w.family == "power_decay") return WeightFn::power_decay(w.c, w.sigma);
  if (w.family == "power") return WeightFn::power(w.c, w.k);
  return WeightFn::tabulated(w.radii, w.values);
}

inline ProblemSpec make_problem(const RunConfig& c) {
  const auto& nl = c.nonlinearity;
  NonlinearityPair pair =
      nl.family == "sum_power" ? sum_power(nl.alpha, nl.beta) : power_pair(nl.alpha, nl.beta);
  if (nl.cbar1) pair.env1.cbar = *nl.cbar1;
  if (nl.cbar2) pair.env2.cbar = *nl.cbar2;
  ProblemSpec spec = make_problem(c.n_dim, c.a1, c.a2, make_weight(c.weight1), make_weight(c.weight2),
                                  std::move(pair), c.eps);
  spec.m1 = c.m1;
  spec.m2 = c.m2;
  validate(spec);
  return spec;
}

inline RadialGrid make_grid(const NumericsConfig& n) {
  return make_grid(n.r_max, n.grid_points,
                   n.grading == "geometric" ? Grading::geometric(n.grading_ratio) : Grading::uniform());
}

}  // namespace koradial
