#pragma once

/**
 * @file table.hpp
 * @brief Sampled monotone scalar functions with piecewise-linear evaluation
 * and inversion.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "koradial/error.hpp"

namespace koradial {

/// Nondecreasing table y = F(x) on increasing abscissae, linear between nodes.
struct FunctionTable {
  std::vector<double> x;
  std::vector<double> y;

  bool empty() const { return x.empty(); }
  std::size_t size() const { return x.size(); }
  double domain_lo() const { return x.front(); }
  double domain_hi() const { return x.back(); }
  double range_lo() const { return y.front(); }
  double range_hi() const { return y.back(); }

  bool covers(double q) const { return !x.empty() && q >= x.front() && q <= x.back(); }

  double operator()(double q) const {
    if (!covers(q)) {
      throw Error(Errc::BeyondRange, "query " + std::to_string(q) + " outside table [" +
                                         std::to_string(domain_lo()) + ", " +
                                         std::to_string(domain_hi()) + "]");
    }
    if (x.size() == 1) return y.front();
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t k = it == x.begin() ? 0 : std::size_t(it - x.begin()) - 1;
    k = std::min(k, x.size() - 2);
    const double h = x[k + 1] - x[k];
    const double w = h > 0.0 ? (q - x[k]) / h : 0.0;
    return y[k] + w * (y[k + 1] - y[k]);
  }

  /// Width of the cell containing q, used as the interpolation error scale.
  double cell_width(double q) const {
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t k = it == x.begin() ? 0 : std::size_t(it - x.begin()) - 1;
    k = std::min(k, x.size() - 2);
    return x[k + 1] - x[k];
  }
};

/**
 * Swap abscissae and ordinates. Flat spans collapse to their left endpoint,
 * so the inverse of a value inside a plateau is the plateau's first abscissa.
 */
inline FunctionTable invert_table(const FunctionTable& t) {
  FunctionTable inv;
  inv.x.reserve(t.size());
  inv.y.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0 && t.y[k] < t.y[k - 1]) {
      throw Error(Errc::NotStrictlyMonotone,
                  "table decreases at x = " + std::to_string(t.x[k]));
    }
    if (!inv.x.empty() && t.y[k] <= inv.x.back()) continue;
    inv.x.push_back(t.y[k]);
    inv.y.push_back(t.x[k]);
  }
  if (inv.x.size() < 2) {
    throw Error(Errc::NotStrictlyMonotone, "table has no strictly increasing span to invert");
  }
  return inv;
}

/**
 * Extends a cumulative trapezoid table y(x) = y(x₀) + ∫ integrand on
 * log-spaced nodes x·(1+rel_step) up to hi. `integrand` may throw.
 */
template <class F>
void append_cumulative(FunctionTable& t, double hi, F&& integrand, double rel_step = 1e-3) {
  const double q = 1.0 + rel_step;
  double x = t.x.back();
  double fx = integrand(x);
  while (x < hi) {
    double next = std::min(x * q, hi);
    if (hi - next < 1e-9 * hi) next = hi;
    const double fn = integrand(next);
    t.x.push_back(next);
    t.y.push_back(t.y.back() + 0.5 * (next - x) * (fx + fn));
    x = next;
    fx = fn;
  }
}

}  // namespace koradial
