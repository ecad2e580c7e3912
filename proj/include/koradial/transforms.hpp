#pragma once

/**
 * @file transforms.hpp
 * @brief The integral functionals that control radial solutions.
 *
 *   Z(s)     = ∫_{a₁+a₂}^s dt / (f₁(t,t) + f₂(t,t))
 *   KOᵢ(s)   = ∫_{aᵢ}^s (∫₀^σ fᵢ(t,t) dt)^{−1/2} dσ
 *   Pᵢ(r)    = ∫₀ʳ z^{1−N} ∫₀ᶻ t^{N−1} pᵢ(t) dt dz
 *   φᵢ(r)    = max_{t ≤ r} pᵢ(t)
 *   P̄ᵢ(r)    = √(f̄ᵢ(Mᵢ(1 + Z⁻¹(P₁+P₂)))) · ∫₀ʳ √φᵢ
 *   P̄ᵢε(r)   = f̄ᵢ(Mᵢ(1 + Z⁻¹(P₁+P₂))) · ∫_{Rᵢ}^r t^{1+ε} pᵢ,   r ≥ Rᵢ
 *   P̲(r)     = ∫₀ʳ y^{1−N} ∫₀ʸ t^{N−1} p₁ f₁(a₁, a₂ + f₂(a₁,a₂) P₂) dt dy
 *   Q̲(r)     = ∫₀ʳ y^{1−N} ∫₀ʸ t^{N−1} p₂ f₂(a₁ + f₁(a₁,a₂) P₁, a₂) dt dy
 *
 * Rᵢ is the smallest grid radius beyond which r^{2N−2} pᵢ(r) is nondecreasing.
 * Z and KO live on the solution-value axis s and are tabulated on log-spaced
 * nodes up to a cap of 10¹²; everything else is tabulated on a RadialGrid.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "koradial/error.hpp"
#include "koradial/grid.hpp"
#include "koradial/limits.hpp"
#include "koradial/model.hpp"
#include "koradial/table.hpp"

namespace koradial {

inline constexpr double kValueCap = 1e12;

/// Grid function that exists only on the index range [begin, end).
struct PartialFn {
  RadialGrid grid;
  std::vector<double> values;
  std::size_t begin = 0;
  std::size_t end = 0;
  Errc stop_code = Errc::BeyondRange;
  std::string stop_reason;

  bool available(std::size_t k) const { return k >= begin && k < end; }
  bool complete() const { return begin == 0 && end == grid.size(); }
  /// Why the values stop, prefixed with the error category.
  std::string stop_message() const { return std::string(to_string(stop_code)) + ": " + stop_reason; }

  double at(double r) const {
    if (end <= begin) throw Error(stop_code, stop_reason.empty() ? "no values" : stop_reason);
    if (r < grid[begin]) {
      throw Error(Errc::BeyondRange, "defined only for r >= " + std::to_string(grid[begin]));
    }
    if (r > grid[end - 1]) {
      if (end == grid.size() && r <= grid.r_max() * (1.0 + 1e-14)) return values[end - 1];
      throw Error(stop_code, stop_reason + " (query r = " + std::to_string(r) + ")");
    }
    if (end - begin == 1) return values[begin];
    std::size_t k = std::clamp(grid.locate(r), begin, end - 2);
    const double w = std::clamp((r - grid[k]) / (grid[k + 1] - grid[k]), 0.0, 1.0);
    return values[k] + w * (values[k + 1] - values[k]);
  }
};

namespace detail {

inline double z_integrand(const ProblemSpec& spec, double t) {
  const double den = spec.nonlin.diag1(t) + spec.nonlin.diag2(t);
  if (!(den > 0.0) || std::isnan(den)) {
    throw Error(Errc::ZeroDenominator, "f1(t,t) + f2(t,t) vanishes at t = " + std::to_string(t));
  }
  return 1.0 / den;
}

}  // namespace detail

inline FunctionTable compute_Z(const ProblemSpec& spec, double s_max) {
  const double lo = spec.a1 + spec.a2;
  if (!(s_max > lo)) throw Error(Errc::InvalidProblem, "s_max must exceed a1 + a2");
  FunctionTable z{{lo}, {0.0}};
  append_cumulative(z, s_max, [&](double t) { return detail::z_integrand(spec, t); });
  return z;
}

/**
 * Z⁻¹ with on-demand range growth: the Z table is extended by doubling its
 * upper end until a requested ordinate is covered, Z visibly converges to a
 * finite Z(∞) below it, or the 10¹² cap is reached.
 */
class ZInverse {
 public:
  explicit ZInverse(const ProblemSpec& spec, double cap = kValueCap)
      : spec_(&spec), cap_(cap), z_(compute_Z(spec, 2.0 * (spec.a1 + spec.a2))) {
    history_.push_back(z_.range_hi());
    inv_ = invert_table(z_);
  }

  void cover(double q) {
    bool grown = false;
    while (z_.range_hi() < q && !exhausted_) {
      if (z_.domain_hi() >= cap_) {
        exhausted_ = true;
        reason_ = "Z table reached the value cap " + std::to_string(cap_);
        break;
      }
      if (converged() && q > z_.range_hi() * (1.0 + 1e-3)) {
        exhausted_ = true;
        reason_ = "Z(inf) ~ " + std::to_string(z_.range_hi()) + " is finite and below the argument";
        break;
      }
      const double next = std::min(2.0 * z_.domain_hi(), cap_);
      append_cumulative(z_, next, [this](double t) { return detail::z_integrand(*spec_, t); });
      history_.push_back(z_.range_hi());
      grown = true;
    }
    if (grown) inv_ = invert_table(z_);
  }

  bool covers(double q) const { return q >= 0.0 && q <= inv_.domain_hi(); }

  double operator()(double q) const {
    if (covers(q)) return inv_(q);
    if (exhausted_) throw Error(Errc::ZRangeExhausted, reason_);
    throw Error(Errc::BeyondZRange, "Z^-1 queried at " + std::to_string(q) + " beyond table");
  }

  const FunctionTable& table() const { return z_; }
  const FunctionTable& inverse() const { return inv_; }
  bool exhausted() const { return exhausted_; }
  const std::string& reason() const { return reason_; }

 private:
  bool converged() const {
    const std::size_t n = history_.size();
    if (n < 3) return false;
    auto rel = [&](std::size_t k) {
      return std::abs(history_[k] - history_[k - 1]) <= 1e-3 * std::abs(history_[k]);
    };
    return rel(n - 1) && rel(n - 2);
  }

  const ProblemSpec* spec_;
  double cap_;
  FunctionTable z_;
  FunctionTable inv_;
  std::vector<double> history_;
  bool exhausted_ = false;
  std::string reason_;
};

/// KOᵢ on [aᵢ, s_max]; which ∈ {1, 2}.
inline FunctionTable compute_KO(const ProblemSpec& spec, int which, double s_max) {
  const double lo = which == 1 ? spec.a1 : spec.a2;
  auto diag = [&](double t) { return which == 1 ? spec.nonlin.diag1(t) : spec.nonlin.diag2(t); };
  if (!(s_max > lo)) throw Error(Errc::InvalidProblem, "s_max must exceed a_i");

  // ∫₀^lo f(t,t) dt on a graded grid (fᵢ may be non-smooth at 0)
  constexpr std::size_t kCells = 4096;
  const auto head = make_grid(lo, kCells, Grading::geometric(1.0 + 20.0 / double(kCells)));
  double inner = cumulative_integral(sample(head, diag)).back();
  if (!(inner > 0.0)) {
    throw Error(Errc::ZeroInnerIntegral, "int_0^a f(t,t) dt vanishes at a = " + std::to_string(lo));
  }

  FunctionTable ko{{lo}, {0.0}};
  const double q = 1.0 + 1e-3;
  double s = lo, fs = diag(lo), gs = 1.0 / std::sqrt(inner);
  while (s < s_max) {
    double next = std::min(s * q, s_max);
    if (s_max - next < 1e-9 * s_max) next = s_max;
    const double fn = diag(next);
    inner += 0.5 * (next - s) * (fs + fn);
    if (!(inner > 0.0)) {
      throw Error(Errc::ZeroInnerIntegral, "inner integral vanishes at s = " + std::to_string(next));
    }
    const double gn = 1.0 / std::sqrt(inner);
    ko.x.push_back(next);
    ko.y.push_back(ko.y.back() + 0.5 * (next - s) * (gs + gn));
    s = next;
    fs = fn;
    gs = gn;
  }
  return ko;
}

inline SampledFn compute_P(const ProblemSpec& spec, int which, const RadialGrid& grid) {
  const auto& w = which == 1 ? spec.p1 : spec.p2;
  return nested_radial_integral(eval_weight_on_grid(w, grid), spec.n_dim);
}

/// Z⁻¹(P₁ + P₂) on the grid prefix where Z⁻¹ is available.
inline PartialFn compute_zinv_sum(const SampledFn& p1, const SampledFn& p2, ZInverse& zinv) {
  PartialFn out{p1.grid, std::vector<double>(p1.size(), std::numeric_limits<double>::quiet_NaN())};
  double needed = 0.0;
  for (std::size_t k = 0; k < p1.size(); ++k) needed = std::max(needed, p1[k] + p2[k]);
  zinv.cover(needed);
  for (std::size_t k = 0; k < p1.size(); ++k) {
    try {
      out.values[k] = zinv(p1[k] + p2[k]);
    } catch (const Error& e) {
      out.stop_code = e.code();
      out.stop_reason = e.detail();
      break;
    }
    out.end = k + 1;
  }
  return out;
}

/// Shared factor f̄ᵢ(Mᵢ(1 + Z⁻¹(P₁+P₂))) at node k.
inline double envelope_factor(const ProblemSpec& spec, int which, double zinv_value) {
  const auto& env = which == 1 ? spec.nonlin.env1 : spec.nonlin.env2;
  const double m = which == 1 ? spec.m1 : spec.m2;
  return env.fbar(m * (1.0 + zinv_value));
}

namespace detail {

/// factor(k) · integral[k], available where the integral vanishes or the factor exists.
inline PartialFn combine_with_factor(const ProblemSpec& spec, int which, const PartialFn& zinv_sum,
                                     const SampledFn& integral, std::size_t begin, bool take_sqrt) {
  PartialFn out{integral.grid,
                std::vector<double>(integral.size(), std::numeric_limits<double>::quiet_NaN())};
  out.begin = begin;
  out.end = begin;
  out.stop_code = zinv_sum.stop_code;
  out.stop_reason = zinv_sum.stop_reason;
  for (std::size_t k = begin; k < integral.size(); ++k) {
    if (integral[k] == 0.0) {
      out.values[k] = 0.0;
    } else if (zinv_sum.available(k)) {
      const double f = envelope_factor(spec, which, zinv_sum.values[k]);
      out.values[k] = (take_sqrt ? std::sqrt(f) : f) * integral[k];
    } else {
      break;
    }
    out.end = k + 1;
  }
  return out;
}

}  // namespace detail

/// ∫₀ʳ √φᵢ(s) ds
inline SampledFn sqrt_phi_integral(const SampledFn& weight) {
  SampledFn root = running_max(weight);
  for (auto& v : root.values) v = std::sqrt(v);
  return cumulative_integral(root);
}

inline PartialFn compute_Pbar(const ProblemSpec& spec, int which, const SampledFn& weight,
                              const PartialFn& zinv_sum) {
  return detail::combine_with_factor(spec, which, zinv_sum, sqrt_phi_integral(weight), 0, true);
}

inline std::optional<std::size_t> monotone_radius_index(const WeightFn& w, int n_dim,
                                                        const RadialGrid& grid) {
  const std::size_t n = grid.size();
  auto log_g = [&](std::size_t k) {
    const double p = w(grid[k]);
    if (p <= 0.0 || grid[k] == 0.0) return -std::numeric_limits<double>::infinity();
    return double(2 * n_dim - 2) * std::log(grid[k]) + std::log(p);
  };
  const double slack = std::log1p(-1e-10);
  std::size_t j = n - 1;
  double next = log_g(j);
  while (j > 0) {
    const double cur = log_g(j - 1);
    if (!(next >= cur + slack || next == cur)) break;
    next = cur;
    --j;
  }
  if (j == n - 1) return std::nullopt;
  return j;
}

/// Smallest grid radius R with r^{2N−2} p(r) nondecreasing on the nodes ≥ R.
inline std::optional<double> detect_monotone_radius(const WeightFn& w, int n_dim,
                                                    const RadialGrid& grid) {
  auto k = monotone_radius_index(w, n_dim, grid);
  if (!k) return std::nullopt;
  return grid[*k];
}

inline PartialFn compute_Pbar_eps(const ProblemSpec& spec, int which, const SampledFn& weight,
                                  const PartialFn& zinv_sum, std::optional<std::size_t> r_index) {
  if (!r_index) {
    throw Error(Errc::MonotoneRadiusNotFound,
                "r^(2N-2) p" + std::to_string(which) + " is not eventually nondecreasing on the grid");
  }
  const auto& grid = weight.grid;
  SampledFn integrand(grid);
  for (std::size_t k = *r_index; k < grid.size(); ++k) {
    integrand[k] = std::pow(grid[k], 1.0 + spec.eps) * weight[k];
  }
  SampledFn integral(grid);
  for (std::size_t k = *r_index + 1; k < grid.size(); ++k) {
    integral[k] = integral[k - 1] + 0.5 * (grid[k] - grid[k - 1]) * (integrand[k] + integrand[k - 1]);
  }
  return detail::combine_with_factor(spec, which, zinv_sum, integral, *r_index, false);
}

struct LowerBounds {
  SampledFn plower;
  SampledFn qlower;
};

inline LowerBounds compute_lower_bounds(const ProblemSpec& spec, const SampledFn& w1,
                                        const SampledFn& w2, const SampledFn& p1,
                                        const SampledFn& p2) {
  const auto& f = spec.nonlin;
  const double f1c = f.f1(spec.a1, spec.a2), f2c = f.f2(spec.a1, spec.a2);
  SampledFn g1(w1.grid), g2(w2.grid);
  for (std::size_t k = 0; k < g1.size(); ++k) {
    g1[k] = w1[k] == 0.0 ? 0.0 : w1[k] * f.f1(spec.a1, spec.a2 + f2c * p2[k]);
    g2[k] = w2[k] == 0.0 ? 0.0 : w2[k] * f.f2(spec.a1 + f1c * p1[k], spec.a2);
  }
  return {nested_radial_integral(g1, spec.n_dim), nested_radial_integral(g2, spec.n_dim)};
}

inline LowerBounds compute_lower_bounds(const ProblemSpec& spec, const RadialGrid& grid) {
  const auto w1 = eval_weight_on_grid(spec.p1, grid), w2 = eval_weight_on_grid(spec.p2, grid);
  return compute_lower_bounds(spec, w1, w2, nested_radial_integral(w1, spec.n_dim),
                              nested_radial_integral(w2, spec.n_dim));
}

struct ProfileLimits {
  LimitClass z;
  LimitClass ko1, ko2;
  LimitClass pbar1, pbar2;
  LimitClass pbar1_eps, pbar2_eps;
  LimitClass plower, qlower;
  std::optional<double> r_monotone1, r_monotone2;  ///< on the tail grid
};

struct ProfileOptions {
  double value_cap = kValueCap;
  TailPolicy tail;                 ///< radii R₀·2ᵏ for the r-functionals
  std::size_t tail_cells = 4096;   ///< cells of the geometric tail grid
  bool with_limits = true;
};

struct IntegralProfile {
  RadialGrid grid;
  SampledFn w1, w2;
  SampledFn p1_tab, p2_tab;
  SampledFn phi1, phi2;
  PartialFn zinv_sum;
  PartialFn pbar1, pbar2;
  PartialFn pbar1_eps, pbar2_eps;  ///< empty (end == begin) when Rᵢ is absent
  SampledFn plower, qlower;
  FunctionTable z_tab, z_inv;
  FunctionTable ko1, ko2, ko1_inv, ko2_inv;
  std::optional<double> r_monotone1, r_monotone2;
  std::optional<ProfileLimits> limits;
};

namespace detail {

inline PartialFn pbar_eps_or_empty(const ProblemSpec& spec, int which, const SampledFn& w,
                                   const PartialFn& zinv_sum, std::optional<std::size_t> r_index) {
  if (!r_index) {
    PartialFn empty{w.grid, std::vector<double>(w.size(), std::numeric_limits<double>::quiet_NaN())};
    empty.stop_code = Errc::MonotoneRadiusNotFound;
    empty.stop_reason = "monotone radius not found";
    return empty;
  }
  return compute_Pbar_eps(spec, which, w, zinv_sum, r_index);
}

}  // namespace detail

/// Grid tables only; the value-axis tables (Z, KO) are shared through `zinv`.
inline IntegralProfile build_tables(const ProblemSpec& spec, const RadialGrid& grid, ZInverse& zinv) {
  IntegralProfile prof;
  prof.grid = grid;
  prof.w1 = eval_weight_on_grid(spec.p1, grid);
  prof.w2 = eval_weight_on_grid(spec.p2, grid);
  prof.p1_tab = nested_radial_integral(prof.w1, spec.n_dim);
  prof.p2_tab = nested_radial_integral(prof.w2, spec.n_dim);
  prof.phi1 = running_max(prof.w1);
  prof.phi2 = running_max(prof.w2);
  prof.zinv_sum = compute_zinv_sum(prof.p1_tab, prof.p2_tab, zinv);
  prof.pbar1 = compute_Pbar(spec, 1, prof.w1, prof.zinv_sum);
  prof.pbar2 = compute_Pbar(spec, 2, prof.w2, prof.zinv_sum);
  const auto r1 = monotone_radius_index(spec.p1, spec.n_dim, grid);
  const auto r2 = monotone_radius_index(spec.p2, spec.n_dim, grid);
  if (r1) prof.r_monotone1 = grid[*r1];
  if (r2) prof.r_monotone2 = grid[*r2];
  prof.pbar1_eps = detail::pbar_eps_or_empty(spec, 1, prof.w1, prof.zinv_sum, r1);
  prof.pbar2_eps = detail::pbar_eps_or_empty(spec, 2, prof.w2, prof.zinv_sum, r2);
  auto lb = compute_lower_bounds(spec, prof.w1, prof.w2, prof.p1_tab, prof.p2_tab);
  prof.plower = std::move(lb.plower);
  prof.qlower = std::move(lb.qlower);
  prof.z_tab = zinv.table();
  prof.z_inv = zinv.inverse();
  return prof;
}

/// Geometric grid reaching the last tail radius R₀·2^K.
inline RadialGrid tail_grid(const TailPolicy& tail, std::size_t cells) {
  const double r_end = tail.start * std::ldexp(1.0, tail.doublings);
  const double ratio = std::min(1.2, 1.0 + 20.0 / double(cells));
  return make_grid(r_end, cells, Grading::geometric(ratio));
}

/// Tail policy for a value-axis functional starting just above `lo`.
inline TailPolicy value_tail_policy(double lo, double cap, const TailPolicy& base) {
  TailPolicy p = base;
  p.start = 2.0 * lo;
  p.doublings = std::max(0, int(std::floor(std::log2(cap / p.start))));
  return p;
}

/// Tail policy for P̄ᵢε, which only exists from Rᵢ on; the last radius is kept.
inline TailPolicy from_radius_policy(const TailPolicy& base, double r_start) {
  TailPolicy p = base;
  while (p.start < r_start && p.doublings > 0) {
    p.start *= 2.0;
    --p.doublings;
  }
  return p;
}

inline ProfileLimits compute_limits(const ProblemSpec& spec, const ProfileOptions& opts,
                                    const FunctionTable& ko1, const FunctionTable& ko2) {
  ProfileLimits lim;
  const double cap = opts.value_cap;
  {
    const auto z_full = compute_Z(spec, cap);
    lim.z = classify_limit([&](double s) { return z_full(s); },
                           value_tail_policy(spec.a1 + spec.a2, cap, opts.tail));
  }
  lim.ko1 = classify_limit([&](double s) { return ko1(s); }, value_tail_policy(spec.a1, cap, opts.tail));
  lim.ko2 = classify_limit([&](double s) { return ko2(s); }, value_tail_policy(spec.a2, cap, opts.tail));

  const auto grid = tail_grid(opts.tail, opts.tail_cells);
  ZInverse zinv(spec, cap);
  const auto tail = build_tables(spec, grid, zinv);
  lim.r_monotone1 = tail.r_monotone1;
  lim.r_monotone2 = tail.r_monotone2;
  auto on = [&](const PartialFn& f) { return [&f](double r) { return f.at(r); }; };
  lim.pbar1 = classify_limit(on(tail.pbar1), opts.tail);
  lim.pbar2 = classify_limit(on(tail.pbar2), opts.tail);
  if (tail.r_monotone1) {
    lim.pbar1_eps = classify_limit(on(tail.pbar1_eps), from_radius_policy(opts.tail, *tail.r_monotone1));
  } else {
    lim.pbar1_eps.note = "monotone radius not found";
  }
  if (tail.r_monotone2) {
    lim.pbar2_eps = classify_limit(on(tail.pbar2_eps), from_radius_policy(opts.tail, *tail.r_monotone2));
  } else {
    lim.pbar2_eps.note = "monotone radius not found";
  }
  lim.plower = classify_limit([&](double r) { return tail.plower.at(r); }, opts.tail);
  lim.qlower = classify_limit([&](double r) { return tail.qlower.at(r); }, opts.tail);
  return lim;
}

/**
 * Tabulates every functional on `grid`, the value-axis tables up to the cap,
 * and (optionally) classifies the limits at infinity on a separate geometric
 * tail grid.
 */
inline IntegralProfile build_profile(const ProblemSpec& spec, const RadialGrid& grid,
                                     const ProfileOptions& opts = {}) {
  validate(spec);
  ZInverse zinv(spec, opts.value_cap);
  IntegralProfile prof = build_tables(spec, grid, zinv);
  prof.ko1 = compute_KO(spec, 1, opts.value_cap);
  prof.ko2 = compute_KO(spec, 2, opts.value_cap);
  prof.ko1_inv = invert_table(prof.ko1);
  prof.ko2_inv = invert_table(prof.ko2);
  if (opts.with_limits) prof.limits = compute_limits(spec, opts, prof.ko1, prof.ko2);
  return prof;
}

}  // namespace koradial
