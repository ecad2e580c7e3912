#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "koradial/classifier.hpp"

using namespace koradial;

namespace {

ProblemSpec problem(WeightFn p1, WeightFn p2, NonlinearityPair f) {
  return make_problem(3, 1, 1, std::move(p1), std::move(p2), std::move(f));
}

ClassificationReport run(const ProblemSpec& spec, double r_max = 2.0, std::size_t m = 256) {
  return classify(spec, build_profile(spec, make_grid(r_max, m)));
}

LimitClass finite_at(double v) {
  LimitClass c;
  c.verdict = LimitClass::Verdict::Finite;
  c.estimate = v;
  return c;
}

LimitClass divergent() {
  LimitClass c;
  c.verdict = LimitClass::Verdict::Divergent;
  c.estimate = 1e7;
  return c;
}

bool has_warning(const ClassificationReport& rep, const std::string& text) {
  return std::any_of(rep.warnings.begin(), rep.warnings.end(),
                     [&](const std::string& w) { return w.find(text) != std::string::npos; });
}

}  // namespace

TEST(Classify, SublinearConstantWeightsAreLarge) {
  const auto rep = run(problem(WeightFn::constant(1), WeightFn::constant(1), power_pair(0.5, 0.5)));
  EXPECT_EQ(rep.verdict, Verdict::BothLarge);
  EXPECT_EQ(rep.theorem, Theorem::T1);
}

TEST(Classify, ZeroWeightsWithFiniteKO) {
  const auto rep = run(problem(WeightFn::constant(0), WeightFn::constant(0), power_pair(3, 3)));
  EXPECT_EQ(rep.verdict, Verdict::BothBounded);
  EXPECT_EQ(rep.theorem, Theorem::T4);
}

TEST(Classify, ZeroWeightsWithDivergentKO) {
  const auto rep = run(problem(WeightFn::constant(0), WeightFn::constant(0), power_pair(0.5, 0.5)));
  EXPECT_EQ(rep.verdict, Verdict::BothBounded);
  EXPECT_EQ(rep.theorem, Theorem::T2);
}

TEST(Classify, DecayingWeightsKeepPbarDivergent) {
  // φ is a running maximum, so ∫₀^∞ √φ diverges for any nonzero weight and the
  // P̄ < KO(∞) test cannot succeed; nothing applies to this cubic problem.
  const auto spec = problem(WeightFn::power_decay(0.01, 4), WeightFn::power_decay(0.01, 4), power_pair(3, 3));
  const auto prof = build_profile(spec, make_grid(2.0, 256));
  ASSERT_TRUE(prof.limits);
  EXPECT_TRUE(prof.limits->ko1.finite());
  EXPECT_NEAR(prof.limits->ko1.estimate, 2.0, 1e-3);
  EXPECT_TRUE(prof.limits->pbar1.divergent());
  const auto rep = classify(spec, prof);
  EXPECT_EQ(rep.verdict, Verdict::HypothesesNotMet);
  EXPECT_EQ(rep.theorem, Theorem::None);
}

TEST(Classify, MixedWithZeroFirstWeight) {
  const auto rep = run(problem(WeightFn::constant(0), WeightFn::constant(1), power_pair(3, 0.5)));
  EXPECT_EQ(rep.verdict, Verdict::UBoundedVLarge);
  EXPECT_EQ(rep.theorem, Theorem::T5ii);
}

TEST(Classify, MixedWithZeroSecondWeight) {
  const auto rep = run(problem(WeightFn::constant(1), WeightFn::constant(0), power_pair(0.5, 3)));
  EXPECT_EQ(rep.verdict, Verdict::ULargeVBounded);
  EXPECT_EQ(rep.theorem, Theorem::T5i);
}

TEST(Classify, CompactlySupportedFirstWeight) {
  const auto spec = problem(WeightFn::tabulated({0, 1, 2}, {1, 0, 0}), WeightFn::constant(1), power_pair(0.5, 0.5));
  const auto rep = run(spec);
  EXPECT_EQ(rep.verdict, Verdict::UBoundedVLarge);
  EXPECT_EQ(rep.theorem, Theorem::T3a);
}

TEST(Classify, CompactlySupportedSecondWeight) {
  const auto spec = problem(WeightFn::constant(1), WeightFn::tabulated({0, 1, 2}, {1, 0, 0}), power_pair(0.5, 0.5));
  const auto rep = run(spec);
  EXPECT_EQ(rep.verdict, Verdict::ULargeVBounded);
  EXPECT_EQ(rep.theorem, Theorem::T3b);
}

TEST(Classify, EvidenceCarriesEveryLimit) {
  const auto rep = run(problem(WeightFn::constant(1), WeightFn::constant(1), power_pair(0.5, 0.5)));
  std::size_t with_limit = 0;
  for (const auto& e : rep.evidence) with_limit += e.limit.has_value();
  EXPECT_EQ(with_limit, 9u);
}

TEST(Classify, Deterministic) {
  const auto spec = problem(WeightFn::power_decay(1, 2), WeightFn::constant(1), power_pair(0.5, 1));
  const auto prof = build_profile(spec, make_grid(2.0, 128));
  const auto a = classify(spec, prof), b = classify(spec, prof);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.theorem, b.theorem);
  EXPECT_EQ(a.warnings, b.warnings);
  ASSERT_EQ(a.evidence.size(), b.evidence.size());
  for (std::size_t i = 0; i < a.evidence.size(); ++i) EXPECT_EQ(a.evidence[i].detail, b.evidence[i].detail);
}

TEST(Classify, ScalingWeightsKeepsLargeVerdict) {
  for (double c : {0.1, 3.0}) {
    const auto rep = run(problem(WeightFn::constant(c), WeightFn::constant(c), power_pair(0.5, 0.5)));
    EXPECT_EQ(rep.verdict, Verdict::BothLarge) << "scale " << c;
  }
}

TEST(Classify, AllInconclusiveBlocksEverything) {
  const auto spec = problem(WeightFn::constant(1), WeightFn::constant(1), power_pair(1, 1));
  IntegralProfile prof;
  prof.limits = ProfileLimits{};
  const auto rep = classify(spec, prof);
  EXPECT_EQ(rep.verdict, Verdict::HypothesesNotMet);
  EXPECT_EQ(rep.theorem, Theorem::None);
  EXPECT_TRUE(has_warning(rep, "KO1(inf) inconclusive"));
  EXPECT_TRUE(has_warning(rep, "Plower(inf) inconclusive"));
}

TEST(Classify, MarginalStrictInequalityWarns) {
  const auto spec = problem(WeightFn::constant(1), WeightFn::constant(1), power_pair(3, 3));
  IntegralProfile prof;
  ProfileLimits lim;
  lim.ko1 = finite_at(2.0);
  lim.ko2 = finite_at(2.0);
  lim.pbar1 = finite_at(1.9995);
  lim.pbar2 = finite_at(0.5);
  prof.limits = lim;
  const auto rep = classify(spec, prof);
  EXPECT_EQ(rep.verdict, Verdict::HypothesesNotMet);
  EXPECT_TRUE(has_warning(rep, "criterion marginal"));

  lim.pbar1 = finite_at(1.9);
  prof.limits = lim;
  const auto ok = classify(spec, prof);
  EXPECT_EQ(ok.verdict, Verdict::BothBounded);
  EXPECT_EQ(ok.theorem, Theorem::T4);
}

TEST(Classify, DivergentKOWithoutRefinementIsUnclassified) {
  const auto spec = problem(WeightFn::constant(1), WeightFn::constant(1), power_pair(1, 1));
  IntegralProfile prof;
  ProfileLimits lim;
  lim.ko1 = divergent();
  lim.ko2 = divergent();
  lim.plower = finite_at(1.0);
  lim.qlower = finite_at(1.0);
  prof.limits = lim;
  const auto rep = classify(spec, prof);
  EXPECT_EQ(rep.verdict, Verdict::ExistsUnclassified);
  EXPECT_EQ(rep.theorem, Theorem::T1);
}

TEST(Classify, FailedEnvelopeBlocks) {
  auto f = power_pair(0.5, 0.5);
  f.env1.cbar = 0.5;
  const auto rep = run(problem(WeightFn::constant(1), WeightFn::constant(1), f));
  EXPECT_EQ(rep.verdict, Verdict::HypothesesNotMet);
  EXPECT_TRUE(has_warning(rep, "structural"));
}

TEST(Classify, ConsistencyWarning) {
  const auto spec = problem(WeightFn::constant(0), WeightFn::constant(0), power_pair(0.5, 0.5));
  const auto prof = build_profile(spec, make_grid(2.0, 64));
  auto rep = classify(spec, prof);
  add_consistency_warnings(rep, prof, false);
  EXPECT_TRUE(rep.warnings.empty());
  add_consistency_warnings(rep, prof, true);
  EXPECT_TRUE(has_warning(rep, "appears large"));
  EXPECT_EQ(rep.verdict, Verdict::BothBounded);
}

TEST(Sandwich, ZeroWeightsHoldWithEquality) {
  const auto spec = problem(WeightFn::constant(0), WeightFn::constant(0), power_pair(3, 3));
  const auto g = make_grid(2.0, 64);
  const auto rep = verify_sandwich(picard_solve(spec, g), build_profile(spec, g, {.with_limits = false}), spec);
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.upper_u.vacuous_nodes, 0u);
  EXPECT_EQ(rep.upper_u.max_violation, 0.0);
  EXPECT_EQ(rep.lower_v.max_violation, 0.0);
}

TEST(Sandwich, DecayingCubicHoldsNodewise) {
  const auto spec = problem(WeightFn::power_decay(0.01, 4), WeightFn::power_decay(0.01, 4), power_pair(3, 3));
  const auto g = make_grid(2.0, 512);
  const auto rep = verify_sandwich(picard_solve(spec, g), build_profile(spec, g, {.with_limits = false}), spec);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.upper_u.nodes_checked, 0u);
}

TEST(Sandwich, SwappedLowerBoundsFail) {
  const auto spec = problem(WeightFn::constant(2), WeightFn::constant(1), power_pair(1, 1));
  const auto g = make_grid(2.0, 256);
  auto prof = build_profile(spec, g, {.with_limits = false});
  const auto sol = picard_solve(spec, g);
  EXPECT_TRUE(verify_sandwich(sol, prof, spec).pass());
  std::swap(prof.plower, prof.qlower);
  const auto rep = verify_sandwich(sol, prof, spec);
  EXPECT_FALSE(rep.lower_v.pass);
  EXPECT_FALSE(rep.pass());
}

TEST(Sandwich, DegenerateUpperBoundIsVacuous) {
  // P̄ grows linearly, so √2·P̄ passes KO(∞) = 2 inside the grid
  const auto spec = problem(WeightFn::power_decay(0.01, 4), WeightFn::power_decay(0.01, 4), power_pair(3, 3));
  const auto g = make_grid(20.0, 400);
  const auto rep = verify_sandwich(picard_solve(spec, g), build_profile(spec, g, {.with_limits = false}), spec);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.upper_u.vacuous_nodes, 0u);
  EXPECT_NE(rep.upper_u.note.find("BeyondKORange"), std::string::npos);
}
