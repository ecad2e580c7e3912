#pragma once

/**
 * @file grid.hpp
 * @brief Radial grids and the fixed-grid quadrature kernels.
 *
 * Every functional in the library is tabulated on a RadialGrid, so all
 * cumulative tables share nodes and can be combined pointwise. Quadrature is
 * second order on uniform and graded grids alike.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "koradial/error.hpp"

namespace koradial {

struct Grading {
  enum class Kind { Uniform, Geometric };
  Kind kind = Kind::Uniform;
  double ratio = 1.0;  ///< cell growth factor, Geometric only

  static Grading uniform() { return {}; }
  static Grading geometric(double ratio) { return {Kind::Geometric, ratio}; }

  friend bool operator==(const Grading&, const Grading&) = default;
};

/// Immutable node set 0 = r_0 < r_1 < ... < r_M = r_max. Copies share storage.
class RadialGrid {
 public:
  RadialGrid() = default;

  std::span<const double> nodes() const { return *nodes_; }
  double operator[](std::size_t k) const { return (*nodes_)[k]; }
  std::size_t size() const { return nodes_ ? nodes_->size() : 0; }
  std::size_t cells() const { return size() - 1; }
  double r_max() const { return nodes_->back(); }
  const Grading& grading() const { return grading_; }

  /// Index of the cell [r_k, r_{k+1}] containing r (clamped to the last cell).
  std::size_t locate(double r) const {
    auto it = std::upper_bound(nodes_->begin(), nodes_->end(), r);
    std::size_t k = it == nodes_->begin() ? 0 : std::size_t(it - nodes_->begin()) - 1;
    return std::min(k, cells() - 1);
  }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.nodes_ == b.nodes_ || (a.nodes_ && b.nodes_ && *a.nodes_ == *b.nodes_);
  }

 private:
  RadialGrid(std::vector<double> nodes, Grading g)
      : nodes_(std::make_shared<const std::vector<double>>(std::move(nodes))), grading_(g) {}

  friend RadialGrid make_grid(double, std::size_t, Grading);

  std::shared_ptr<const std::vector<double>> nodes_;
  Grading grading_;
};

/// Values of a function at the nodes of a grid.
struct SampledFn {
  RadialGrid grid;
  std::vector<double> values;

  SampledFn() = default;
  SampledFn(RadialGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw Error(Errc::GridMismatch, "sample count does not match grid size");
    }
  }
  explicit SampledFn(RadialGrid g, double fill = 0.0)
      : grid(std::move(g)), values(grid.size(), fill) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  double back() const { return values.back(); }

  /// Piecewise-linear value at r in [0, r_max].
  double at(double r) const {
    if (r < 0.0 || r > grid.r_max() * (1.0 + 1e-14)) {
      throw Error(Errc::BeyondRange, "radius " + std::to_string(r) + " outside grid");
    }
    std::size_t k = grid.locate(r);
    double a = grid[k], b = grid[k + 1];
    double w = std::clamp((r - a) / (b - a), 0.0, 1.0);
    return values[k] + w * (values[k + 1] - values[k]);
  }
};

inline RadialGrid make_grid(double r_max, std::size_t m, Grading grading = Grading::uniform()) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw Error(Errc::NonPositiveRadius, "r_max must be positive and finite");
  }
  if (m < 16) {
    throw Error(Errc::TooFewNodes, "need at least 16 cells, got " + std::to_string(m));
  }
  std::vector<double> nodes(m + 1);
  nodes[0] = 0.0;
  if (grading.kind == Grading::Kind::Uniform) {
    const double h = r_max / double(m);
    for (std::size_t k = 1; k < m; ++k) nodes[k] = double(k) * h;
  } else {
    const double q = grading.ratio;
    if (!(q > 1.0 && q <= 1.2)) {
      throw Error(Errc::BadGrading, "geometric ratio must lie in (1, 1.2]");
    }
    // cell k has width h1 * q^k; sum of m cells is r_max
    const double h1 = r_max * (q - 1.0) / std::expm1(double(m) * std::log(q));
    double width = h1;
    for (std::size_t k = 1; k < m; ++k) {
      nodes[k] = nodes[k - 1] + width;
      width *= q;
    }
  }
  nodes[m] = r_max;
  return RadialGrid(std::move(nodes), grading);
}

inline SampledFn sample(const RadialGrid& grid, auto&& fn) {
  SampledFn out(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = fn(grid[k]);
  return out;
}

/// F(r_k) = ∫₀^{r_k} f by composite trapezoid on the grid cells.
inline SampledFn cumulative_integral(const SampledFn& f) {
  SampledFn out(f.grid);
  const auto& r = f.grid;
  for (std::size_t k = 1; k < r.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * (r[k] - r[k - 1]) * (f[k] + f[k - 1]);
  }
  return out;
}

namespace detail {

/// Weights (wl, wr) with ∫_a^b t^p ℓ(t) dt = wl·ℓ(a) + wr·ℓ(b) for linear ℓ,
/// scaled by b^{-p} so that large radii cannot overflow.
inline std::pair<double, double> scaled_moment_weights(double a, double b, int p) {
  const double h = b - a;
  const double ra = a / b, rh = h / b;
  double wl = 0.0, wr = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= p; ++j) {
    const double term = binom * std::pow(ra, p - j) * std::pow(rh, j);
    wl += term / double((j + 1) * (j + 2));
    wr += term / double(j + 2);
    binom = binom * double(p - j) / double(j + 1);
  }
  return {wl * h, wr * h};
}

}  // namespace detail

/**
 * Radial flux r ↦ r^{1−N} ∫₀ʳ t^{N−1} g(t) dt, zero at r = 0.
 *
 * The inner integral treats g as piecewise linear and integrates the weight
 * t^{N−1} exactly, which keeps the rule second order down to the first cell.
 */
inline SampledFn radial_flux(const SampledFn& g, int n_dim) {
  if (n_dim < 3) {
    throw Error(Errc::DimensionTooSmall, "N must be at least 3, got " + std::to_string(n_dim));
  }
  const int p = n_dim - 1;
  const auto& r = g.grid;
  SampledFn flux(r);
  for (std::size_t k = 1; k < r.size(); ++k) {
    const auto [wl, wr] = detail::scaled_moment_weights(r[k - 1], r[k], p);
    const double shrink = std::pow(r[k - 1] / r[k], p);
    flux[k] = flux[k - 1] * shrink + wl * g[k - 1] + wr * g[k];
  }
  return flux;
}

/// r ↦ ∫₀ʳ y^{1−N} ∫₀ʸ t^{N−1} g(t) dt dy.
inline SampledFn nested_radial_integral(const SampledFn& g, int n_dim) {
  return cumulative_integral(radial_flux(g, n_dim));
}

/// Running maximum over nodes r_0..r_k.
inline SampledFn running_max(const SampledFn& f) {
  SampledFn out = f;
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = std::max(out[k], out[k - 1]);
  return out;
}

}  // namespace koradial
