#pragma once

/**
 * @file classifier.hpp
 * @brief Existence / boundedness verdicts from the limits at infinity of the
 * integral functionals, and the two-sided bound check along a solution.
 *
 * Rules, tried in this order (first match wins):
 *   T4    P̄₁(∞) < KO₁(∞) < ∞ and P̄₂(∞) < KO₂(∞) < ∞            BothBounded
 *   T5i   KO₁(∞) = ∞, P̲(∞) = ∞, P̄₂(∞) < KO₂(∞) < ∞               ULargeVBounded
 *   T5ii  KO₂(∞) = ∞, Q̲(∞) = ∞, P̄₁(∞) < KO₁(∞) < ∞               UBoundedVLarge
 *   T2    KO₁ = KO₂ = ∞, both Rᵢ exist, P̄₁ε(∞), P̄₂ε(∞) finite      BothBounded
 *   T3a   KO₁ = KO₂ = ∞, R₁ exists, P̄₁ε(∞) finite, Q̲(∞) = ∞       UBoundedVLarge
 *   T3b   KO₁ = KO₂ = ∞, R₂ exists, P̲(∞) = ∞, P̄₂ε(∞) finite       ULargeVBounded
 *   T1    KO₁ = KO₂ = ∞, P̲(∞) = Q̲(∞) = ∞                         BothLarge
 * With KO₁ = KO₂ = ∞ and nothing sharper, a solution exists but its
 * behaviour at infinity is not decided (ExistsUnclassified).
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "koradial/limits.hpp"
#include "koradial/model.hpp"
#include "koradial/picard.hpp"
#include "koradial/transforms.hpp"

namespace koradial {

enum class Verdict {
  BothLarge,
  BothBounded,
  ULargeVBounded,
  UBoundedVLarge,
  ExistsUnclassified,
  HypothesesNotMet
};

enum class Theorem { T1, T2, T3a, T3b, T4, T5i, T5ii, None };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::BothLarge: return "BothLarge";
    case Verdict::BothBounded: return "BothBounded";
    case Verdict::ULargeVBounded: return "ULargeVBounded";
    case Verdict::UBoundedVLarge: return "UBoundedVLarge";
    case Verdict::ExistsUnclassified: return "ExistsUnclassified";
    case Verdict::HypothesesNotMet: return "HypothesesNotMet";
  }
  return "?";
}

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3a: return "T3a";
    case Theorem::T3b: return "T3b";
    case Theorem::T4: return "T4";
    case Theorem::T5i: return "T5i";
    case Theorem::T5ii: return "T5ii";
    case Theorem::None: return "None";
  }
  return "?";
}

struct Evidence {
  std::string criterion;
  std::optional<LimitClass> limit;
  std::optional<bool> flag;
  std::string detail;
};

struct ClassificationReport {
  Verdict verdict = Verdict::HypothesesNotMet;
  Theorem theorem = Theorem::None;
  std::vector<Evidence> evidence;
  std::vector<std::string> warnings;
};

inline constexpr double kStrictMargin = 1e-3;

namespace detail {

enum class Tri { Yes, No, Unknown };

inline Tri operator&&(Tri a, Tri b) {
  if (a == Tri::No || b == Tri::No) return Tri::No;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::Yes;
}

inline Tri is_divergent(const LimitClass& c) {
  return c.divergent() ? Tri::Yes : c.finite() ? Tri::No : Tri::Unknown;
}

inline Tri is_finite(const LimitClass& c) {
  return c.finite() ? Tri::Yes : c.divergent() ? Tri::No : Tri::Unknown;
}

inline Tri is_present(const std::optional<double>& r) { return r ? Tri::Yes : Tri::No; }

struct Rules {
  const ProfileLimits& lim;
  ClassificationReport& rep;

  /// P̄ᵢ(∞) < KOᵢ(∞) < ∞ with a relative margin.
  Tri strictly_below(const LimitClass& pbar, const LimitClass& ko, const char* name) const {
    const Tri known = is_finite(ko) && is_finite(pbar);
    if (known != Tri::Yes) return known;
    if (pbar.estimate < ko.estimate * (1.0 - kStrictMargin)) return Tri::Yes;
    if (std::abs(pbar.estimate - ko.estimate) <= kStrictMargin * std::abs(ko.estimate)) {
      rep.warnings.push_back(std::string("criterion marginal: ") + name + " (" +
                             std::to_string(pbar.estimate) + " vs " +
                             std::to_string(ko.estimate) + ")");
    }
    return Tri::No;
  }

  Tri ko_both_divergent() const { return is_divergent(lim.ko1) && is_divergent(lim.ko2); }
};

}  // namespace detail

/**
 * Applies the rules above to the limits stored in `profile` (which must have
 * been built with limits). Inconclusive limits block the rules that need them
 * and are reported in the warnings.
 */
inline ClassificationReport classify(const ProblemSpec& spec, const IntegralProfile& profile) {
  using detail::Tri;
  ClassificationReport rep;
  if (!profile.limits) {
    rep.warnings.push_back("profile carries no limits at infinity");
    return rep;
  }
  const ProfileLimits& lim = *profile.limits;

  auto cite = [&](const char* name, const LimitClass& c) {
    rep.evidence.push_back({name, c, std::nullopt, c.note});
  };
  cite("Z(inf)", lim.z);
  cite("KO1(inf)", lim.ko1);
  cite("KO2(inf)", lim.ko2);
  cite("Pbar1(inf)", lim.pbar1);
  cite("Pbar2(inf)", lim.pbar2);
  cite("Pbar1eps(inf)", lim.pbar1_eps);
  cite("Pbar2eps(inf)", lim.pbar2_eps);
  cite("Plower(inf)", lim.plower);
  cite("Qlower(inf)", lim.qlower);
  auto flag = [&](const char* name, bool value, std::string detail) {
    rep.evidence.push_back({name, std::nullopt, value, std::move(detail)});
  };
  flag("r^(2N-2) p1 eventually nondecreasing", lim.r_monotone1.has_value(),
       lim.r_monotone1 ? "R1 = " + std::to_string(*lim.r_monotone1) : "not found");
  flag("r^(2N-2) p2 eventually nondecreasing", lim.r_monotone2.has_value(),
       lim.r_monotone2 ? "R2 = " + std::to_string(*lim.r_monotone2) : "not found");

  const auto env = check_c2_envelope(spec.nonlin, default_lattice());
  flag("C2 envelope", env.holds, "worst ratio " + std::to_string(env.worst_ratio));
  const auto mono = check_monotone(spec.nonlin, default_lattice());
  flag("C1 monotone nonlinearity", mono.holds, "worst drop " + std::to_string(mono.worst_drop));
  if (!env.holds || !mono.holds) {
    rep.warnings.push_back("structural hypotheses fail on the sample lattice; no rule applies");
    return rep;
  }

  detail::Rules rules{lim, rep};
  const Tri below1 = rules.strictly_below(lim.pbar1, lim.ko1, "Pbar1(inf) < KO1(inf)");
  const Tri below2 = rules.strictly_below(lim.pbar2, lim.ko2, "Pbar2(inf) < KO2(inf)");
  const Tri ko_div = rules.ko_both_divergent();
  const Tri r1 = detail::is_present(lim.r_monotone1), r2 = detail::is_present(lim.r_monotone2);

  struct Candidate {
    Theorem theorem;
    Verdict verdict;
    Tri holds;
  };
  const Candidate candidates[] = {
      {Theorem::T4, Verdict::BothBounded, below1 && below2},
      {Theorem::T5i, Verdict::ULargeVBounded,
       detail::is_divergent(lim.ko1) && detail::is_divergent(lim.plower) && below2},
      {Theorem::T5ii, Verdict::UBoundedVLarge,
       detail::is_divergent(lim.ko2) && detail::is_divergent(lim.qlower) && below1},
      {Theorem::T2, Verdict::BothBounded,
       ko_div && r1 && r2 && detail::is_finite(lim.pbar1_eps) && detail::is_finite(lim.pbar2_eps)},
      {Theorem::T3a, Verdict::UBoundedVLarge,
       ko_div && r1 && detail::is_finite(lim.pbar1_eps) && detail::is_divergent(lim.qlower)},
      {Theorem::T3b, Verdict::ULargeVBounded,
       ko_div && r2 && detail::is_divergent(lim.plower) && detail::is_finite(lim.pbar2_eps)},
      {Theorem::T1, Verdict::BothLarge,
       ko_div && detail::is_divergent(lim.plower) && detail::is_divergent(lim.qlower)},
  };

  bool blocked = false;
  for (const auto& c : candidates) {
    if (c.holds == Tri::Yes) {
      rep.theorem = c.theorem;
      rep.verdict = c.verdict;
      break;
    }
    if (c.holds == Tri::Unknown) blocked = true;
  }
  if (rep.theorem == Theorem::None && ko_div == Tri::Yes) {
    rep.theorem = Theorem::T1;
    rep.verdict = Verdict::ExistsUnclassified;
  }
  if (blocked) {
    const std::pair<const char*, const LimitClass*> all[] = {
        {"Z(inf)", &lim.z},           {"KO1(inf)", &lim.ko1},       {"KO2(inf)", &lim.ko2},
        {"Pbar1(inf)", &lim.pbar1},   {"Pbar2(inf)", &lim.pbar2},   {"Pbar1eps(inf)", &lim.pbar1_eps},
        {"Pbar2eps(inf)", &lim.pbar2_eps}, {"Plower(inf)", &lim.plower}, {"Qlower(inf)", &lim.qlower}};
    for (const auto& [name, c] : all) {
      if (c->inconclusive()) {
        rep.warnings.push_back(std::string(name) + " inconclusive (" + c->note + ")");
      }
    }
  }
  return rep;
}

/**
 * Warns when a solve looked like a large solution (overflow or a growing
 * solution) while some P̄ᵢε(∞) came out finite with Rᵢ present, which the
 * theory rules out. Never changes the verdict.
 */
inline void add_consistency_warnings(ClassificationReport& rep, const IntegralProfile& profile,
                                     bool solution_looks_large) {
  if (!solution_looks_large || !profile.limits) return;
  const auto& lim = *profile.limits;
  if ((lim.r_monotone1 && lim.pbar1_eps.finite()) || (lim.r_monotone2 && lim.pbar2_eps.finite())) {
    rep.warnings.push_back(
        "solution appears large but a Pbar_eps(inf) was classified finite; limit verdicts are "
        "heuristic");
  }
}

struct SandwichSide {
  std::string name;
  std::size_t nodes_checked = 0;
  std::size_t vacuous_nodes = 0;  ///< upper bound degenerate (+∞) or unavailable
  double max_violation = -std::numeric_limits<double>::infinity();
  double worst_radius = 0.0;
  bool pass = true;
  std::string note;
};

struct SandwichReport {
  SandwichSide lower_u, upper_u, lower_v, upper_v;
  bool pass() const { return lower_u.pass && upper_u.pass && lower_v.pass && upper_v.pass; }
};

/**
 * Checks aᵢ + P̲ ≤ u ≤ KO₁⁻¹(√(2c̄₁) P̄₁) and the v-analogue with Q̲ at each
 * node. Where √(2c̄ᵢ) P̄ᵢ(r) reaches KOᵢ(∞) the upper bound is +∞ and the node
 * passes vacuously (counted).
 */
inline SandwichReport verify_sandwich(const SolutionPair& sol, const IntegralProfile& profile,
                                      const ProblemSpec& spec) {
  if (!(sol.grid == profile.grid)) {
    throw Error(Errc::GridMismatch, "solution and profile live on different grids");
  }
  const auto& grid = sol.grid;
  const double h = detail::max_cell_width(grid);
  const double slack = 1e-6 + h * h;
  SandwichReport rep{{"lower_u"}, {"upper_u"}, {"lower_v"}, {"upper_v"}};

  auto record = [&](SandwichSide& side, double r, double lhs, double rhs) {
    ++side.nodes_checked;
    const double excess = lhs - rhs;
    if (excess > side.max_violation) {
      side.max_violation = excess;
      side.worst_radius = r;
    }
    if (!(excess <= slack * (1.0 + std::abs(rhs)))) side.pass = false;
  };
  auto upper = [&](SandwichSide& side, std::size_t k, double value, const PartialFn& pbar,
                   const FunctionTable& ko_inv, double cbar) {
    if (!pbar.available(k)) {
      ++side.vacuous_nodes;
      if (side.note.empty()) side.note = "vacuous where Pbar is unavailable: " + pbar.stop_message();
      return;
    }
    const double arg = std::sqrt(2.0 * cbar) * pbar.values[k];
    if (arg >= ko_inv.domain_hi()) {
      ++side.vacuous_nodes;
      if (side.note.empty()) {
        side.note = "BeyondKORange from r = " + std::to_string(grid[k]) + ": bound is +inf";
      }
      return;
    }
    record(side, grid[k], value, arg <= 0.0 ? ko_inv.range_lo() : ko_inv(arg));
  };

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k];
    record(rep.lower_u, r, spec.a1 + profile.plower[k], sol.u[k]);
    record(rep.lower_v, r, spec.a2 + profile.qlower[k], sol.v[k]);
    upper(rep.upper_u, k, sol.u[k], profile.pbar1, profile.ko1_inv, spec.nonlin.env1.cbar);
    upper(rep.upper_v, k, sol.v[k], profile.pbar2, profile.ko2_inv, spec.nonlin.env2.cbar);
  }
  return rep;
}

}  // namespace koradial
