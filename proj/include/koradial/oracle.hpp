#pragma once

/**
 * @file oracle.hpp
 * @brief Direct integration of the radial ODE system as an initial-value
 * problem, used to cross-check the Picard solver.
 *
 * The state is (u, v, w₁, w₂) with wᵢ = r^{N−1}·(radial derivative), so
 *   u′ = w₁ r^{1−N},   w₁′ = r^{N−1} p₁(r) f₁(u, v)
 * and no 1/r term appears. The step from r = 0 uses the series start
 * u(h) = a₁ + ½h²c₁, w₁(h) = hᴺc₁ with c₁ = p₁(0) f₁(a₁, a₂)/N.
 */

#include <array>
#include <cmath>
#include <string>

#include "koradial/error.hpp"
#include "koradial/grid.hpp"
#include "koradial/model.hpp"
#include "koradial/picard.hpp"

namespace koradial {

struct OdeState {
  double r = 0.0;
  double u = 0.0, v = 0.0;
  double du = 0.0, dv = 0.0;
};

inline SolutionPair direct_integrate(const ProblemSpec& spec, const RadialGrid& grid) {
  validate(spec);
  const auto& f = spec.nonlin;
  const double pw = double(spec.n_dim - 1);
  using State = std::array<double, 4>;  // u, v, w1, w2

  auto rhs = [&](double r, const State& y) -> State {
    const double rp = std::pow(r, pw);
    const double p1 = spec.p1(r), p2 = spec.p2(r);
    return {y[2] / rp, y[3] / rp, p1 == 0.0 ? 0.0 : rp * p1 * f.f1(y[0], y[1]),
            p2 == 0.0 ? 0.0 : rp * p2 * f.f2(y[0], y[1])};
  };
  auto axpy = [](const State& y, double h, const State& k) {
    return State{y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]};
  };

  SolutionPair sol;
  sol.grid = grid;
  sol.u = SampledFn(grid, spec.a1);
  sol.v = SampledFn(grid, spec.a2);
  sol.du = SampledFn(grid);
  sol.dv = SampledFn(grid);
  sol.converged = true;

  const double n = double(spec.n_dim);
  const double p10 = spec.p1(0.0), p20 = spec.p2(0.0);
  const double c1 = p10 == 0.0 ? 0.0 : p10 * f.f1(spec.a1, spec.a2) / n;
  const double c2 = p20 == 0.0 ? 0.0 : p20 * f.f2(spec.a1, spec.a2) / n;
  const double h1 = grid[1];
  State y{spec.a1 + 0.5 * h1 * h1 * c1, spec.a2 + 0.5 * h1 * h1 * c2, std::pow(h1, n) * c1,
          std::pow(h1, n) * c2};

  auto store = [&](std::size_t k) {
    const double r = grid[k];
    if (!(std::abs(y[0]) <= kOverflowLimit) || !(std::abs(y[1]) <= kOverflowLimit)) {
      throw Error(Errc::Overflow, "solution exceeds 1e300", r);
    }
    const double rp = std::pow(r, pw);
    sol.u[k] = y[0];
    sol.v[k] = y[1];
    sol.du[k] = y[2] / rp;
    sol.dv[k] = y[3] / rp;
  };
  store(1);

  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double r = grid[k], h = grid[k + 1] - grid[k];
    const State k1 = rhs(r, y);
    const State k2 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = rhs(r + h, axpy(y, h, k3));
    for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    store(k + 1);
  }
  return sol;
}

struct SolutionDiff {
  double sup_abs = 0.0;
  double sup_rel = 0.0;
  double argmax_radius = 0.0;
};

inline SolutionDiff compare_solutions(const SolutionPair& a, const SolutionPair& b) {
  if (!(a.grid == b.grid)) throw Error(Errc::GridMismatch, "solutions live on different grids");
  SolutionDiff d;
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    const double diff = std::abs(a.u[k] - b.u[k]) + std::abs(a.v[k] - b.v[k]);
    const double rel = diff / (1.0 + std::abs(a.u[k]) + std::abs(a.v[k]));
    if (diff > d.sup_abs) {
      d.sup_abs = diff;
      d.argmax_radius = a.grid[k];
    }
    d.sup_rel = std::max(d.sup_rel, rel);
  }
  return d;
}

}  // namespace koradial
