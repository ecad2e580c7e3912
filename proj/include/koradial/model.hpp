#pragma once

/**
 * @file model.hpp
 * @brief Radial weights p₁, p₂, the nonlinearities f₁, f₂ with their growth
 * envelopes, and the problem description tying them together.
 *
 * The system is Δu = p₁(|x|) f₁(u,v), Δv = p₂(|x|) f₂(u,v) on ℝᴺ with
 * u(0) = a₁, v(0) = a₂. Nonlinearities carry an envelope (c̄, f̄) with
 * f₁(t, t·s) ≤ c̄ · f₁(t,t) · f̄(s) (f₂ mirrored); the library samples this inequality instead
 * of trusting it.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "koradial/error.hpp"
#include "koradial/grid.hpp"

namespace koradial {

class WeightFn {
 public:
  enum class Family { Constant, PowerDecay, Power, Tabulated };

  /// p(r) = c
  static WeightFn constant(double c) {
    require_nonnegative(c, "constant weight");
    WeightFn w;
    w.family_ = Family::Constant;
    w.c_ = c;
    return w;
  }

  /// p(r) = c·(1+r)^{−σ}
  static WeightFn power_decay(double c, double sigma) {
    require_nonnegative(c, "power_decay coefficient");
    WeightFn w;
    w.family_ = Family::PowerDecay;
    w.c_ = c;
    w.exponent_ = sigma;
    return w;
  }

  /// p(r) = c·r^k, k ≥ 0 so that p stays continuous at the origin.
  static WeightFn power(double c, double k) {
    require_nonnegative(c, "power coefficient");
    if (!(k >= 0.0)) throw Error(Errc::InvalidProblem, "power weight exponent must be >= 0");
    WeightFn w;
    w.family_ = Family::Power;
    w.c_ = c;
    w.exponent_ = k;
    return w;
  }

  /// Linear interpolation between knots, constant beyond the ends.
  static WeightFn tabulated(std::vector<double> radii, std::vector<double> values) {
    if (radii.empty() || radii.size() != values.size()) {
      throw Error(Errc::InvalidProblem, "tabulated weight needs matching, non-empty radii and values");
    }
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (!std::isfinite(values[k]) || values[k] < 0.0) {
        throw Error(Errc::NegativeWeightValue,
                    "tabulated weight sample " + std::to_string(k) + " is negative or not finite");
      }
      if (k > 0 && !(radii[k] > radii[k - 1])) {
        throw Error(Errc::InvalidProblem, "tabulated weight radii must be strictly increasing");
      }
    }
    WeightFn w;
    w.family_ = Family::Tabulated;
    w.knots_ = std::move(radii);
    w.samples_ = std::move(values);
    return w;
  }

  static WeightFn tabulated(const SampledFn& f) {
    return tabulated({f.grid.nodes().begin(), f.grid.nodes().end()}, f.values);
  }

  double operator()(double r) const {
    switch (family_) {
      case Family::Constant: return c_;
      case Family::PowerDecay: return c_ * std::pow(1.0 + r, -exponent_);
      case Family::Power: return c_ * std::pow(r, exponent_);
      case Family::Tabulated: return interpolate(r);
    }
    return 0.0;
  }

  Family family() const { return family_; }
  double coefficient() const { return c_; }
  double exponent() const { return exponent_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& samples() const { return samples_; }

  /// Copy of this weight multiplied by s ≥ 0.
  WeightFn scaled(double s) const {
    require_nonnegative(s, "weight scale");
    WeightFn w = *this;
    w.c_ *= s;
    for (auto& v : w.samples_) v *= s;
    return w;
  }

  bool is_zero() const {
    if (family_ == Family::Tabulated) {
      return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
    }
    return c_ == 0.0;
  }

 private:
  static void require_nonnegative(double c, const char* what) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(Errc::NegativeWeightValue, std::string(what) + " must be finite and >= 0");
    }
  }

  double interpolate(double r) const {
    if (r <= knots_.front()) return samples_.front();
    if (r >= knots_.back()) return samples_.back();
    auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
    std::size_t k = std::size_t(it - knots_.begin()) - 1;
    double w = (r - knots_[k]) / (knots_[k + 1] - knots_[k]);
    return samples_[k] + w * (samples_[k + 1] - samples_[k]);
  }

  Family family_ = Family::Constant;
  double c_ = 0.0;
  double exponent_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> samples_;
};

inline SampledFn eval_weight_on_grid(const WeightFn& w, const RadialGrid& grid) {
  SampledFn out = sample(grid, w);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k] >= 0.0) || !std::isfinite(out[k])) {
      throw Error(Errc::NegativeWeightValue, "weight negative or not finite", grid[k]);
    }
  }
  return out;
}

/// (c̄, f̄) with f₁(t, t·s) ≤ c̄ · f₁(t,t) · f̄(s), and f₂(t·s, t) ≤ c̄ · f₂(t,t) · f̄(s).
struct Envelope {
  double cbar = 1.0;
  std::function<double(double)> fbar;
};

struct NonlinearityPair {
  enum class Family { PowerPair, SumPower, Custom };

  std::function<double(double, double)> f1;
  std::function<double(double, double)> f2;
  Envelope env1;
  Envelope env2;
  Family family = Family::Custom;
  double alpha = 0.0;
  double beta = 0.0;

  double diag1(double t) const { return f1(t, t); }
  double diag2(double t) const { return f2(t, t); }
};

inline void require_positive_exponents(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(Errc::NonPositiveExponent, "exponents must be positive");
  }
}

/// f₁(u,v) = v^α, f₂(u,v) = u^β; the envelope f̄₁(s) = s^α, f̄₂(s) = s^β is tight.
inline NonlinearityPair power_pair(double alpha, double beta) {
  require_positive_exponents(alpha, beta);
  NonlinearityPair p;
  p.family = NonlinearityPair::Family::PowerPair;
  p.alpha = alpha;
  p.beta = beta;
  p.f1 = [alpha](double, double v) { return std::pow(v, alpha); };
  p.f2 = [beta](double u, double) { return std::pow(u, beta); };
  p.env1 = {1.0, [alpha](double s) { return std::pow(s, alpha); }};
  p.env2 = {1.0, [beta](double s) { return std::pow(s, beta); }};
  return p;
}

/// f₁(u,v) = u^α + v^α, f₂(u,v) = u^β + v^β; envelope f̄(s) = (1 + s^γ)/2, c̄ = 1.
inline NonlinearityPair sum_power(double alpha, double beta) {
  require_positive_exponents(alpha, beta);
  NonlinearityPair p;
  p.family = NonlinearityPair::Family::SumPower;
  p.alpha = alpha;
  p.beta = beta;
  p.f1 = [alpha](double u, double v) { return std::pow(u, alpha) + std::pow(v, alpha); };
  p.f2 = [beta](double u, double v) { return std::pow(u, beta) + std::pow(v, beta); };
  p.env1 = {1.0, [alpha](double s) { return 0.5 * (1.0 + std::pow(s, alpha)); }};
  p.env2 = {1.0, [beta](double s) { return 0.5 * (1.0 + std::pow(s, beta)); }};
  return p;
}

using Lattice = std::vector<std::pair<double, double>>;

/// t, s ∈ {2⁻⁴, …, 2⁴}: 81 points.
inline Lattice default_lattice() {
  Lattice out;
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) out.emplace_back(std::ldexp(1.0, i), std::ldexp(1.0, j));
  }
  return out;
}

struct EnvelopeReport {
  bool holds = true;
  double worst_ratio = 0.0;
  double worst_t = 0.0;
  double worst_s = 0.0;
  int worst_component = 0;
};

inline EnvelopeReport check_c2_envelope(const NonlinearityPair& pair, const Lattice& lattice) {
  if (lattice.empty()) throw Error(Errc::EmptyLattice, "envelope lattice is empty");
  EnvelopeReport rep;
  // f₂ is probed with the ratio on its first argument: f₂(t·s, t)
  auto probe = [&](int which, const std::function<double(double, double)>& f, const Envelope& env) {
    for (auto [t, s] : lattice) {
      const double lhs = which == 1 ? f(t, t * s) : f(t * s, t);
      const double rhs = env.cbar * f(t, t) * env.fbar(s);
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_t = t;
        rep.worst_s = s;
        rep.worst_component = which;
      }
      if (!(lhs <= rhs * (1.0 + 1e-12))) rep.holds = false;
    }
  };
  probe(1, pair.f1, pair.env1);
  probe(2, pair.f2, pair.env2);
  return rep;
}

struct MonotonicityReport {
  bool holds = true;
  double worst_drop = 0.0;  ///< max of f(u,v) − f(u′,v′) over ordered lattice pairs
};

/// Spot check: u ≤ u′, v ≤ v′ ⇒ fᵢ(u,v) ≤ fᵢ(u′,v′) on every ordered pair of
/// lattice points (t, s) read as (u, v).
inline MonotonicityReport check_monotone(const NonlinearityPair& pair, const Lattice& lattice) {
  if (lattice.empty()) throw Error(Errc::EmptyLattice, "monotonicity lattice is empty");
  MonotonicityReport rep;
  for (auto [u, v] : lattice) {
    for (auto [u2, v2] : lattice) {
      if (!(u <= u2 && v <= v2)) continue;
      for (const auto* f : {&pair.f1, &pair.f2}) {
        const double lo = (*f)(u, v), hi = (*f)(u2, v2);
        const double drop = lo - hi;
        if (drop > rep.worst_drop) rep.worst_drop = drop;
        if (drop > 1e-12 * (1.0 + std::abs(hi))) rep.holds = false;
      }
    }
  }
  return rep;
}

struct ProblemSpec {
  int n_dim = 3;
  double a1 = 1.0;
  double a2 = 1.0;
  WeightFn p1 = WeightFn::constant(1.0);
  WeightFn p2 = WeightFn::constant(1.0);
  NonlinearityPair nonlin = power_pair(1.0, 1.0);
  double eps = 0.5;
  double m1 = 1.0;
  double m2 = 1.0;

  double min_m1() const { return std::max(1.0, 1.0 / a1); }
  double min_m2() const { return std::max(1.0, 1.0 / a2); }
};

inline void validate(const ProblemSpec& spec) {
  if (spec.n_dim < 3) {
    throw Error(Errc::DimensionTooSmall, "N must be at least 3, got " + std::to_string(spec.n_dim));
  }
  if (!(spec.a1 > 0.0) || !(spec.a2 > 0.0) || !std::isfinite(spec.a1) || !std::isfinite(spec.a2)) {
    throw Error(Errc::InvalidProblem, "central values a1, a2 must be positive");
  }
  if (!(spec.eps > 0.0)) throw Error(Errc::InvalidProblem, "eps must be positive");
  if (!(spec.m1 >= spec.min_m1()) || !(spec.m2 >= spec.min_m2())) {
    throw Error(Errc::InvalidProblem, "M_i must be >= max(1, 1/a_i)");
  }
  if (!spec.nonlin.f1 || !spec.nonlin.f2 || !spec.nonlin.env1.fbar || !spec.nonlin.env2.fbar) {
    throw Error(Errc::InvalidProblem, "nonlinearity pair is incomplete");
  }
  if (!(spec.nonlin.env1.cbar > 0.0) || !(spec.nonlin.env2.cbar > 0.0)) {
    throw Error(Errc::InvalidProblem, "envelope constants must be positive");
  }
}

/// Builds a validated problem with the minimal Mᵢ = max(1, 1/aᵢ).
inline ProblemSpec make_problem(int n_dim, double a1, double a2, WeightFn p1, WeightFn p2,
                                NonlinearityPair nonlin, double eps = 0.5) {
  ProblemSpec spec;
  spec.n_dim = n_dim;
  spec.a1 = a1;
  spec.a2 = a2;
  spec.p1 = std::move(p1);
  spec.p2 = std::move(p2);
  spec.nonlin = std::move(nonlin);
  spec.eps = eps;
  if (a1 > 0.0) spec.m1 = spec.min_m1();
  if (a2 > 0.0) spec.m2 = spec.min_m2();
  validate(spec);
  return spec;
}

}  // namespace koradial
