#pragma once

/**
 * @file limits.hpp
 * @brief Finite / divergent verdicts for F(∞) = lim F(r) from samples of F at
 * geometrically spaced radii R₀·2ᵏ.
 *
 * Rules, applied to the full sequence F₀..F_K:
 *   - Divergent as soon as |F_k| exceeds div_threshold.
 *   - Divergent if the last three increment ratios ΔF_k/ΔF_{k−1} are all
 *     ≥ growth_floor (power-law growth), or all ≥ log_ratio_floor with
 *     increments above abs_tol (logarithmic growth: equal gains per doubling).
 *   - Finite if the last two doublings each change F by at most rel_tol·|F|.
 *   - Otherwise Inconclusive. Evaluation failures end the scan and are
 *     reported as Inconclusive with their cause.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "koradial/error.hpp"

namespace koradial {

struct TailPolicy {
  double start = 1.0;
  int doublings = 12;
  double rel_tol = 1e-3;
  double div_threshold = 1e6;
  double growth_floor = 1.1;
  double abs_tol = 1e-6;
  double log_ratio_floor = 0.95;
};

struct LimitClass {
  enum class Verdict { Finite, Divergent, Inconclusive };

  Verdict verdict = Verdict::Inconclusive;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  std::string note;
  std::vector<std::pair<double, double>> evidence;  ///< (radius, value)

  bool finite() const { return verdict == Verdict::Finite; }
  bool divergent() const { return verdict == Verdict::Divergent; }
  bool inconclusive() const { return verdict == Verdict::Inconclusive; }
};

inline const char* to_string(LimitClass::Verdict v) {
  switch (v) {
    case LimitClass::Verdict::Finite: return "Finite";
    case LimitClass::Verdict::Divergent: return "Divergent";
    case LimitClass::Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline LimitClass classify_limit(const std::function<double(double)>& tail_fn,
                                 const TailPolicy& policy = {}) {
  LimitClass out;
  std::vector<double> values;
  double radius = policy.start;
  for (int k = 0; k <= policy.doublings; ++k, radius *= 2.0) {
    double value = 0.0;
    try {
      value = tail_fn(radius);
    } catch (const Error& e) {
      out.note = std::string("EvaluationFailure: ") + e.what();
      return out;
    }
    out.evidence.emplace_back(radius, value);
    if (std::isnan(value)) {
      out.note = "EvaluationFailure: NaN at r = " + std::to_string(radius);
      return out;
    }
    if (std::abs(value) > policy.div_threshold) {
      out.verdict = LimitClass::Verdict::Divergent;
      out.estimate = value;
      out.note = "exceeds threshold at r = " + std::to_string(radius);
      return out;
    }
    values.push_back(value);
  }

  const std::size_t n = values.size();
  if (n < 4) {
    out.note = "too few tail samples";
    return out;
  }
  auto inc = [&](std::size_t k) { return values[k] - values[k - 1]; };

  bool growing = true, logarithmic = true;
  for (std::size_t k = n - 3; k < n; ++k) {
    const double prev = inc(k - 1), cur = inc(k);
    if (!(prev > policy.abs_tol && cur > policy.abs_tol)) {
      growing = logarithmic = false;
      break;
    }
    const double ratio = cur / prev;
    if (ratio < policy.growth_floor) growing = false;
    if (ratio < policy.log_ratio_floor) logarithmic = false;
  }
  if (growing || logarithmic) {
    out.verdict = LimitClass::Verdict::Divergent;
    out.estimate = values.back();
    out.note = growing ? "increments grow per doubling" : "equal increments per doubling (log growth)";
    return out;
  }

  const bool settled = std::abs(inc(n - 1)) <= policy.rel_tol * std::abs(values[n - 1]) &&
                       std::abs(inc(n - 2)) <= policy.rel_tol * std::abs(values[n - 2]);
  if (settled) {
    out.verdict = LimitClass::Verdict::Finite;
    out.estimate = values.back();
    out.note = "settled over last two doublings";
    return out;
  }
  out.note = "no rule matched";
  return out;
}

}  // namespace koradial
