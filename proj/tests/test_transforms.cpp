#include <cmath>

#include <gtest/gtest.h>

#include "koradial/transforms.hpp"

using namespace koradial;

namespace {

ProblemSpec pair_problem(double gamma, double a, WeightFn p1 = WeightFn::constant(1),
                         WeightFn p2 = WeightFn::constant(1)) {
  return make_problem(3, a, a, std::move(p1), std::move(p2), power_pair(gamma, gamma));
}

bool nondecreasing(const std::vector<double>& v, std::size_t begin = 0, std::size_t end = SIZE_MAX) {
  end = std::min(end, v.size());
  for (std::size_t k = begin + 1; k < end; ++k) {
    if (v[k] < v[k - 1]) return false;
  }
  return true;
}

}  // namespace

TEST(Z, LogarithmForLinearPair) {
  const auto spec = pair_problem(1, 0.5);
  const auto z = compute_Z(spec, 10.0);
  EXPECT_EQ(z(1.0), 0.0);
  EXPECT_NEAR(z(std::exp(2.0)), 1.0, 1e-3);
}

TEST(Z, QuadraticPairAndInverse) {
  const auto spec = pair_problem(2, 0.5);
  const auto z = compute_Z(spec, 10.0);
  EXPECT_NEAR(z(2.0), 0.25, 1e-6);
  EXPECT_NEAR(invert_table(z)(0.25), 2.0, 1e-3);
}

TEST(Z, ZeroDenominator) {
  auto spec = pair_problem(1, 0.5);
  spec.nonlin.f1 = [](double, double) { return 0.0; };
  spec.nonlin.f2 = [](double, double) { return 0.0; };
  try {
    compute_Z(spec, 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroDenominator);
  }
}

TEST(ZInverse, GrowsOnDemand) {
  const auto spec = pair_problem(1, 0.5);
  ZInverse zinv(spec);
  EXPECT_FALSE(zinv.covers(5.0));
  zinv.cover(5.0);
  // trapezoid on cells of ratio 1 + 1e-3 leaves a relative error of order Z·1e-6/6
  EXPECT_NEAR(zinv(5.0), std::exp(10.0), std::exp(10.0) * 1e-5);
  EXPECT_NEAR(zinv(1.0 / 3.0), 1.9477340410546757, 1e-6);
}

TEST(ZInverse, FiniteLimitExhaustsRange) {
  const auto spec = pair_problem(2, 0.5);  // Z(∞) = 1/2
  ZInverse zinv(spec);
  zinv.cover(0.6);
  EXPECT_TRUE(zinv.exhausted());
  try {
    zinv(0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZRangeExhausted);
  }
  EXPECT_NEAR(zinv(0.25), 2.0, 1e-3);
}

TEST(ZInverse, UncoveredQueryIsBeyondRange) {
  const auto spec = pair_problem(1, 0.5);
  ZInverse zinv(spec);
  try {
    zinv(50.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BeyondZRange);
  }
}

TEST(KO, LinearDiagonal) {
  const auto ko = compute_KO(pair_problem(1, 1), 1, 10.0);
  EXPECT_EQ(ko(1.0), 0.0);
  EXPECT_NEAR(ko(std::exp(1.0)), std::sqrt(2.0), 1e-3);
}

TEST(KO, CubicDiagonal) {
  const auto ko = compute_KO(pair_problem(3, 1), 2, 10.0);
  EXPECT_NEAR(ko(2.0), 1.0, 1e-3);
  EXPECT_NEAR(ko(10.0), 2.0 * (1.0 - 0.1), 1e-3);
}

TEST(KO, ZeroInnerIntegral) {
  auto spec = pair_problem(1, 1);
  spec.nonlin.f1 = [](double, double) { return 0.0; };
  try {
    compute_KO(spec, 1, 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroInnerIntegral);
  }
}

TEST(KO, DivergenceLaw) {
  for (double gamma : {0.5, 1.0, 3.0}) {
    const auto spec = pair_problem(gamma, 1);
    const auto ko = compute_KO(spec, 1, kValueCap);
    const auto c = classify_limit([&](double s) { return ko(s); },
                                  value_tail_policy(spec.a1, kValueCap, TailPolicy{}));
    if (gamma <= 1.0) {
      EXPECT_TRUE(c.divergent()) << "gamma " << gamma << ": " << c.note;
    } else {
      ASSERT_TRUE(c.finite()) << c.note;
      EXPECT_NEAR(c.estimate, 2.0, 1e-3);
    }
  }
}

TEST(Z, RangeLaw) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto spec = pair_problem(gamma, 0.5);
    const auto z = compute_Z(spec, kValueCap);
    const auto c = classify_limit([&](double s) { return z(s); },
                                  value_tail_policy(1.0, kValueCap, TailPolicy{}));
    if (gamma <= 1.0) {
      EXPECT_TRUE(c.divergent()) << "gamma " << gamma << ": " << c.note;
    } else {
      ASSERT_TRUE(c.finite()) << c.note;
      EXPECT_NEAR(c.estimate, 0.5, 1e-3);
    }
  }
}

TEST(P, ConstantAndZeroWeights) {
  const auto g = make_grid(1.0, 256);
  const auto spec = pair_problem(1, 1, WeightFn::constant(1), WeightFn::constant(0));
  EXPECT_NEAR(compute_P(spec, 1, g).back(), 1.0 / 6.0, 1e-6);
  for (double v : compute_P(spec, 2, g).values) EXPECT_EQ(v, 0.0);
}

TEST(P, DecayingWeightHasFiniteLimit) {
  const auto g = make_grid(40.0, 4096);
  const auto spec = pair_problem(1, 1, WeightFn::power_decay(1, 4));
  const auto P = compute_P(spec, 1, g);
  // closed form r²/(6(1 + r)²), tending to 1/6; outer trapezoid error is O(h²) with h ≈ 0.01
  for (double r : {1.0, 10.0, 20.0, 40.0}) EXPECT_NEAR(P.at(r), r * r / (6.0 * (1 + r) * (1 + r)), 2e-5);
}

TEST(Pbar, ClosedFormChain) {
  const auto g = make_grid(1.0, 512);
  const auto spec = pair_problem(1, 0.5);
  ZInverse zinv(spec);
  const auto w = eval_weight_on_grid(spec.p1, g);
  const auto p = compute_P(spec, 1, g);
  const auto zs = compute_zinv_sum(p, p, zinv);
  ASSERT_TRUE(zs.complete());
  EXPECT_NEAR(zs.values.back(), 1.9477340410546757, 1e-5);
  const auto pbar = compute_Pbar(spec, 1, w, zs);
  EXPECT_NEAR(pbar.values.back(), 2.4280585005533437, 1e-5);
}

TEST(Pbar, DecreasingWeightUsesValueAtOrigin) {
  const auto g = make_grid(3.0, 300);
  const auto spec = pair_problem(1, 1, WeightFn::power_decay(4, 2));
  ZInverse zinv(spec);
  const auto w = eval_weight_on_grid(spec.p1, g);
  const auto S = sqrt_phi_integral(w);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(S[k], 2.0 * g[k], 1e-12);
}

TEST(Pbar, ZeroWeightIsZeroEvenWithoutZInverse) {
  // cubic pair: Z(∞) is finite, so Z⁻¹(P₁+P₂) stops existing; P̄₂ stays 0
  const auto g = make_grid(10.0, 1000);
  const auto spec = make_problem(3, 1, 1, WeightFn::constant(1), WeightFn::constant(0), power_pair(3, 3));
  ZInverse zinv(spec);
  const auto w1 = eval_weight_on_grid(spec.p1, g), w2 = eval_weight_on_grid(spec.p2, g);
  const auto zs = compute_zinv_sum(compute_P(spec, 1, g), compute_P(spec, 2, g), zinv);
  EXPECT_FALSE(zs.complete());
  EXPECT_EQ(zs.stop_code, Errc::ZRangeExhausted);
  const auto pbar2 = compute_Pbar(spec, 2, w2, zs);
  EXPECT_TRUE(pbar2.complete());
  const auto pbar1 = compute_Pbar(spec, 1, w1, zs);
  EXPECT_FALSE(pbar1.complete());
  EXPECT_THROW(pbar1.at(10.0), Error);
}

TEST(MonotoneRadius, Examples) {
  const auto g = make_grid(10.0, 500);
  EXPECT_EQ(detect_monotone_radius(WeightFn::constant(1), 3, g), 0.0);
  EXPECT_EQ(detect_monotone_radius(WeightFn::power_decay(1, 4), 3, g), 0.0);
  const auto fine = make_grid(10.0, 2000);
  const auto expo = WeightFn::tabulated(sample(fine, [](double r) { return std::exp(-r); }));
  EXPECT_FALSE(detect_monotone_radius(expo, 3, g).has_value());
  // on a grid ending before the turning point r = 4 the whole range qualifies
  EXPECT_EQ(detect_monotone_radius(expo, 3, make_grid(3.0, 300)), 0.0);
}

TEST(MonotoneRadius, EventuallyIncreasing) {
  // r⁴ p with p = tabulated hump: decreasing then flat
  const auto w = WeightFn::tabulated({0, 1, 2}, {0, 1, 0.01});
  const auto R = detect_monotone_radius(w, 3, make_grid(5.0, 500));
  ASSERT_TRUE(R.has_value());
  EXPECT_GT(*R, 1.0);
  EXPECT_LE(*R, 2.0 + 1e-9);
}

TEST(PbarEps, FiniteForDecayAndDivergentForConstant) {
  const auto g = make_grid(2.0, 256);
  const auto decay = build_profile(
      pair_problem(0.5, 1, WeightFn::power_decay(0.01, 4), WeightFn::power_decay(0.01, 4)), g);
  ASSERT_TRUE(decay.limits.has_value());
  EXPECT_TRUE(decay.limits->pbar1_eps.finite()) << decay.limits->pbar1_eps.note;
  const auto flat = build_profile(pair_problem(0.5, 1), g);
  EXPECT_TRUE(flat.limits->pbar1_eps.divergent()) << flat.limits->pbar1_eps.note;
}

TEST(PbarEps, RequiresMonotoneRadius) {
  const auto g = make_grid(2.0, 64);
  const auto spec = pair_problem(1, 1);
  ZInverse zinv(spec);
  const auto w = eval_weight_on_grid(spec.p1, g);
  const auto zs = compute_zinv_sum(compute_P(spec, 1, g), compute_P(spec, 2, g), zinv);
  try {
    compute_Pbar_eps(spec, 1, w, zs, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MonotoneRadiusNotFound);
  }
}

TEST(PbarEps, ZeroWeightIsConstantZero) {
  const auto g = make_grid(2.0, 64);
  const auto spec = pair_problem(1, 1, WeightFn::constant(0), WeightFn::constant(0));
  const auto prof = build_profile(spec, g, {.with_limits = false});
  ASSERT_TRUE(prof.pbar1_eps.complete());
  for (double v : prof.pbar1_eps.values) EXPECT_EQ(v, 0.0);
}

TEST(LowerBounds, ClosedFormForLinearPair) {
  const auto spec = pair_problem(1, 1);
  const auto g = make_grid(1.0, 512);
  const auto lb = compute_lower_bounds(spec, g);
  EXPECT_NEAR(lb.plower.back(), 0.175, 1e-6);
  EXPECT_NEAR(lb.qlower.back(), 0.175, 1e-6);
  EXPECT_EQ(lb.plower[0], 0.0);
}

TEST(LowerBounds, SecondOrderAgreement) {
  const auto spec = pair_problem(1, 1);
  auto err = [&](std::size_t m) {
    const auto lb = compute_lower_bounds(spec, make_grid(1.0, m));
    return std::abs(lb.plower.back() - 0.175);
  };
  const double e1 = err(64), e2 = err(128);
  EXPECT_GT(e1 / e2, 3.5);
}

TEST(LowerBounds, ZeroWeight) {
  const auto spec = pair_problem(1, 1, WeightFn::constant(0), WeightFn::constant(0));
  const auto lb = compute_lower_bounds(spec, make_grid(1.0, 64));
  for (double v : lb.plower.values) EXPECT_EQ(v, 0.0);
  for (double v : lb.qlower.values) EXPECT_EQ(v, 0.0);
}

TEST(LowerBounds, MirrorUsesFirstArgument) {
  // f₂(u, v) = u: Q̲ integrand is p₂·(a₁ + f₁(a₁,a₂) P₁)
  const auto spec = make_problem(3, 1, 2, WeightFn::constant(1), WeightFn::constant(1), power_pair(1, 1));
  const auto lb = compute_lower_bounds(spec, make_grid(1.0, 512));
  // f₁(a) = a₂ = 2, P₁ = t²/6: ∫ y⁻² ∫ t²(1 + t²/3) = r²/6 + r⁴/60
  EXPECT_NEAR(lb.qlower.back(), 1.0 / 6.0 + 1.0 / 60.0, 1e-6);
  // f₂(a) = a₁ = 1, P₂ = t²/6: integrand 2 + t²/6 gives r²/3 + r⁴/120
  EXPECT_NEAR(lb.plower.back(), 1.0 / 3.0 + 1.0 / 120.0, 1e-6);
}

TEST(Profile, TablesNondecreasing) {
  const auto spec = pair_problem(0.5, 1, WeightFn::power_decay(1, 2), WeightFn::constant(0.5));
  const auto prof = build_profile(spec, make_grid(4.0, 400, Grading::geometric(1.005)), {.with_limits = false});
  EXPECT_TRUE(nondecreasing(prof.p1_tab.values));
  EXPECT_TRUE(nondecreasing(prof.p2_tab.values));
  EXPECT_TRUE(nondecreasing(prof.phi1.values));
  EXPECT_TRUE(nondecreasing(prof.plower.values));
  EXPECT_TRUE(nondecreasing(prof.qlower.values));
  EXPECT_TRUE(nondecreasing(prof.pbar1.values, prof.pbar1.begin, prof.pbar1.end));
  EXPECT_TRUE(nondecreasing(prof.pbar2_eps.values, prof.pbar2_eps.begin, prof.pbar2_eps.end));
  EXPECT_TRUE(nondecreasing(prof.zinv_sum.values, 0, prof.zinv_sum.end));
  EXPECT_TRUE(nondecreasing(prof.ko1.y));
  EXPECT_TRUE(nondecreasing(prof.z_tab.y));
}

TEST(Profile, InversionRoundTrip) {
  const auto spec = pair_problem(1, 1);
  const auto prof = build_profile(spec, make_grid(2.0, 128), {.with_limits = false});
  for (const auto* t : {&prof.ko1, &prof.z_tab}) {
    const auto inv = invert_table(*t);
    const double lo = t->domain_lo(), hi = t->domain_hi();
    for (double x = lo + 0.05 * (hi - lo); x < lo + 0.95 * (hi - lo); x += 0.0371 * (hi - lo)) {
      EXPECT_LE(std::abs(inv((*t)(x)) - x), t->cell_width(x));
    }
  }
}
