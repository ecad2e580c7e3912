#pragma once

/**
 * @file picard.hpp
 * @brief Monotone successive approximation for the radial system and audits
 * of the a priori inequalities along the computed solution.
 *
 *   u₀ = a₁,  uₙ(r) = a₁ + ∫₀ʳ t^{1−N} ∫₀ᵗ s^{N−1} p₁(s) f₁(uₙ₋₁, vₙ₋₁) ds dt
 *
 * and symmetrically for vₙ. Each iteration is a full sweep over the grid.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "koradial/error.hpp"
#include "koradial/grid.hpp"
#include "koradial/model.hpp"
#include "koradial/transforms.hpp"

namespace koradial {

inline constexpr double kOverflowLimit = 1e300;

struct IterateHistory {
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> v;
};

struct SolutionPair {
  RadialGrid grid;
  SampledFn u, v;
  SampledFn du, dv;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> sup_delta_history;
  IterateHistory history;  ///< filled only when auditing
};

struct IterationConfig {
  std::optional<double> tol;  ///< default 1e-10·(1 + a₁ + a₂)
  std::size_t max_iter = 200;
  bool audit = false;

  double tolerance(const ProblemSpec& spec) const {
    return tol ? *tol : 1e-10 * (1.0 + spec.a1 + spec.a2);
  }
};

namespace detail {

/// Throws Overflow at the first node where either component blew up.
inline void check_finite(const SampledFn& u, const SampledFn& v) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    const bool bad = !(std::abs(u[k]) <= kOverflowLimit) || !(std::abs(v[k]) <= kOverflowLimit);
    if (bad) {
      throw Error(Errc::Overflow, "iterate exceeds 1e300", u.grid[k]);
    }
  }
}

inline SampledFn forcing(const SampledFn& w, const std::function<double(double, double)>& f,
                         const SampledFn& u, const SampledFn& v) {
  SampledFn g(w.grid);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = w[k] == 0.0 ? 0.0 : w[k] * f(u[k], v[k]);
  return g;
}

}  // namespace detail

inline SolutionPair picard_solve(const ProblemSpec& spec, const RadialGrid& grid,
                                 const IterationConfig& cfg = {}) {
  validate(spec);
  const double tol = cfg.tolerance(spec);
  if (!(tol > 0.0)) throw Error(Errc::InvalidProblem, "tolerance must be positive");

  const SampledFn w1 = eval_weight_on_grid(spec.p1, grid);
  const SampledFn w2 = eval_weight_on_grid(spec.p2, grid);
  const auto& f = spec.nonlin;

  SolutionPair sol;
  sol.grid = grid;
  sol.u = SampledFn(grid, spec.a1);
  sol.v = SampledFn(grid, spec.a2);
  if (cfg.audit) {
    sol.history.u.push_back(sol.u.values);
    sol.history.v.push_back(sol.v.values);
  }

  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    SampledFn un = nested_radial_integral(detail::forcing(w1, f.f1, sol.u, sol.v), spec.n_dim);
    SampledFn vn = nested_radial_integral(detail::forcing(w2, f.f2, sol.u, sol.v), spec.n_dim);
    for (std::size_t k = 0; k < un.size(); ++k) {
      un[k] += spec.a1;
      vn[k] += spec.a2;
    }
    detail::check_finite(un, vn);

    double delta = 0.0;
    for (std::size_t k = 0; k < un.size(); ++k) {
      delta = std::max(delta, std::abs(un[k] - sol.u[k]) + std::abs(vn[k] - sol.v[k]));
    }
    sol.u = std::move(un);
    sol.v = std::move(vn);
    sol.iterations = n;
    sol.sup_delta_history.push_back(delta);
    if (cfg.audit) {
      sol.history.u.push_back(sol.u.values);
      sol.history.v.push_back(sol.v.values);
    }
    if (delta < tol) {
      sol.converged = true;
      break;
    }
  }

  sol.du = radial_flux(detail::forcing(w1, f.f1, sol.u, sol.v), spec.n_dim);
  sol.dv = radial_flux(detail::forcing(w2, f.f2, sol.u, sol.v), spec.n_dim);
  return sol;
}

/// uₙ ≤ uₙ₊₁ + 10⁻¹² and vₙ ≤ vₙ₊₁ + 10⁻¹² at every node.
inline bool audit_monotone_iterates(const IterateHistory& history) {
  auto ordered = [](const std::vector<std::vector<double>>& seq) {
    for (std::size_t n = 1; n < seq.size(); ++n) {
      for (std::size_t k = 0; k < seq[n].size(); ++k) {
        if (!(seq[n - 1][k] <= seq[n][k] + 1e-12)) return false;
      }
    }
    return true;
  };
  return ordered(history.u) && ordered(history.v);
}

struct BoundCheck {
  std::string name;
  std::size_t nodes_checked = 0;
  std::size_t nodes_unavailable = 0;
  double max_violation = -std::numeric_limits<double>::infinity();  ///< max of lhs − rhs
  double worst_radius = 0.0;
  bool pass = true;
  bool informational = false;  ///< reported but not part of the overall verdict
  std::string note;
};

struct AprioriReport {
  std::vector<BoundCheck> checks;
  double c1 = 0.0, c2 = 0.0;  ///< [R^{N−1}u′(R)]², [R^{N−1}v′(R)]² for the far-field bound

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return c.informational || c.pass; });
  }

  const BoundCheck& get(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return c;
    }
    throw Error(Errc::InvalidProblem, "no bound check named " + name);
  }
};

namespace detail {

inline double max_cell_width(const RadialGrid& grid) {
  double h = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) h = std::max(h, grid[k] - grid[k - 1]);
  return h;
}

/// Records lhs ≤ rhs at node k with tolerance (slack + h²)(1 + |rhs|).
struct CheckBuilder {
  BoundCheck check;
  double slack;

  void add(double r, double lhs, double rhs) {
    ++check.nodes_checked;
    const double excess = lhs - rhs;
    if (excess > check.max_violation) {
      check.max_violation = excess;
      check.worst_radius = r;
    }
    if (!(excess <= slack * (1.0 + std::abs(rhs)))) check.pass = false;
  }
  void skip(const std::string& why) {
    ++check.nodes_unavailable;
    if (check.note.empty()) check.note = "bound unavailable: " + why;
  }
};

inline double ko_or_zero(const FunctionTable& ko, double s) {
  if (s <= ko.domain_lo()) return 0.0;
  return ko(s);
}

/// ∫₀ˢ f(t,t) dt on a graded grid.
inline double diag_antiderivative(const ProblemSpec& spec, int which, double s) {
  if (!(s > 0.0)) return 0.0;
  const auto g = make_grid(s, 4096, Grading::geometric(1.0 + 20.0 / 4096.0));
  auto diag = [&](double t) { return which == 1 ? spec.nonlin.diag1(t) : spec.nonlin.diag2(t); };
  return cumulative_integral(sample(g, diag)).back();
}

}  // namespace detail

/**
 * Checks along a converged solution:
 *   zc2       u + v ≤ Z⁻¹(P₁ + P₂)
 *   ints_u    KO₁(u) ≤ √(2c̄₁) P̄₁,   ints_v likewise
 *   lower_u   u ≥ a₁ + P̲,            lower_v: v ≥ a₂ + Q̲
 *   far_u     KO₁(u(r)) ≤ KO₁(u(R)) + √C₁ ∫_R^r t^{1−N} dt / √F₁(u(R)) + c̄₁P̄₁ε(r) + 1/(εR^ε)
 *             for r ≥ R, reported only (informational); far_v likewise.
 * Nodes where a bound's table does not reach are counted as unavailable.
 */
inline AprioriReport audit_apriori_bounds(const SolutionPair& sol, const IntegralProfile& profile,
                                          const ProblemSpec& spec) {
  if (!(sol.grid == profile.grid)) {
    throw Error(Errc::GridMismatch, "solution and profile live on different grids");
  }
  const auto& grid = sol.grid;
  const double h = detail::max_cell_width(grid);
  const double slack = 1e-6 + h * h;
  const double c1 = spec.nonlin.env1.cbar, c2 = spec.nonlin.env2.cbar;

  detail::CheckBuilder zc2{{"zc2"}, slack};
  detail::CheckBuilder ints_u{{"ints_u"}, slack}, ints_v{{"ints_v"}, slack};
  detail::CheckBuilder lower_u{{"lower_u"}, slack}, lower_v{{"lower_v"}, slack};

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k], u = sol.u[k], v = sol.v[k];
    if (profile.zinv_sum.available(k)) {
      zc2.add(r, u + v, profile.zinv_sum.values[k]);
    } else {
      zc2.skip(profile.zinv_sum.stop_message());
    }
    auto ints = [&](detail::CheckBuilder& b, const FunctionTable& ko, const PartialFn& pbar,
                    double cbar, double s) {
      if (!pbar.available(k)) {
        b.skip(pbar.stop_message());
      } else if (!ko.covers(s) && s > ko.domain_lo()) {
        b.skip("solution value beyond KO table");
      } else {
        b.add(r, detail::ko_or_zero(ko, s), std::sqrt(2.0 * cbar) * pbar.values[k]);
      }
    };
    ints(ints_u, profile.ko1, profile.pbar1, c1, u);
    ints(ints_v, profile.ko2, profile.pbar2, c2, v);
    lower_u.add(r, spec.a1 + profile.plower[k], u);
    lower_v.add(r, spec.a2 + profile.qlower[k], v);
  }

  AprioriReport rep;
  for (auto* b : {&zc2, &ints_u, &ints_v, &lower_u, &lower_v}) rep.checks.push_back(b->check);

  // far-field bound, starting at R = max(Rᵢ, first positive node)
  auto far = [&](int which) {
    detail::CheckBuilder b{{which == 1 ? "far_u" : "far_v"}, slack};
    b.check.informational = true;
    const auto& rmono = which == 1 ? profile.r_monotone1 : profile.r_monotone2;
    const auto& pbar_eps = which == 1 ? profile.pbar1_eps : profile.pbar2_eps;
    const auto& ko = which == 1 ? profile.ko1 : profile.ko2;
    const auto& val = which == 1 ? sol.u : sol.v;
    const auto& der = which == 1 ? sol.du : sol.dv;
    const double cbar = which == 1 ? c1 : c2;
    if (!rmono) {
      b.check.note = "monotone radius not found";
      return std::pair{b.check, 0.0};
    }
    std::size_t k0 = std::max<std::size_t>(1, grid.locate(*rmono));
    while (k0 < grid.size() && grid[k0] < *rmono) ++k0;
    if (k0 >= grid.size()) {
      b.check.note = "monotone radius at the end of the grid";
      return std::pair{b.check, 0.0};
    }
    const double R = grid[k0];
    const double flux = std::pow(R, spec.n_dim - 1) * der[k0];
    const double C = flux * flux;
    const double F = detail::diag_antiderivative(spec, which, val[k0]);
    const double ko_R = detail::ko_or_zero(ko, val[k0]);
    const double n2 = double(spec.n_dim - 2);
    for (std::size_t k = k0; k < grid.size(); ++k) {
      const double r = grid[k];
      if (!pbar_eps.available(k)) {
        b.skip(pbar_eps.stop_message());
        continue;
      }
      if (!ko.covers(val[k]) && val[k] > ko.domain_lo()) {
        b.skip("solution value beyond KO table");
        continue;
      }
      const double geom = (std::pow(R, -n2) - std::pow(r, -n2)) / n2;
      const double rhs = ko_R + std::sqrt(C) * geom / std::sqrt(F) + cbar * pbar_eps.values[k] +
                         1.0 / (spec.eps * std::pow(R, spec.eps));
      b.add(r, detail::ko_or_zero(ko, val[k]), rhs);
    }
    b.check.note += (b.check.note.empty() ? "" : "; ") + std::string("R = ") + std::to_string(R);
    return std::pair{b.check, C};
  };
  auto [far_u, C1] = far(1);
  auto [far_v, C2] = far(2);
  rep.checks.push_back(far_u);
  rep.checks.push_back(far_v);
  rep.c1 = C1;
  rep.c2 = C2;
  return rep;
}

}  // namespace koradial
