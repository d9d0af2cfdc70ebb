#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adaexp/limitdist.hpp"
#include "adaexp/normal.hpp"
#include "adaexp/stats.hpp"

using namespace adaexp;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

LimitParams null_params(SelectionRule rule, Weighting w, bool normalized) {
  LimitParams p;
  p.c = 0.0;
  p.mu[0] = p.mu[1] = 0.0;
  p.m2[0] = p.m2[1] = 1.0;
  p.e0 = 0.5;
  p.rule = rule;
  p.q1 = p.q2 = 0.5;
  p.weighting = w;
  p.normalized = normalized;
  return p;
}

}  // namespace

TEST_CASE("selection score on hand examples") {
  CHECK(selection_score(1, 1, 1, 1, 0.0, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // 2/sqrt(0.5) - 0 + (-2)/sqrt(2) = 2*sqrt(2) - sqrt(2) = sqrt(2)
  CHECK(selection_score(1, 0, 4, 1, -2.0, 0.5) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(selection_score(0.3, -0.7, 1, 2, kNegInf, 0.4) == kNegInf);
}

TEST_CASE("stage-2 propensities in the strong-signal regime") {
  LimitParams p = null_params(SelectionRule::eps_greedy(0.1), Weighting::Constant, false);
  p.c = kNegInf;
  const Stage2Params s2 = limit_params_stage2(p, 0.2, -0.4);
  CHECK(s2.h2[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s2.h2[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("thompson at a zero first-stage pair splits evenly") {
  const LimitParams p = null_params(SelectionRule::thompson(0.0), Weighting::Adaptive, false);
  const Stage2Params s2 = limit_params_stage2(p, 0.0, 0.0);
  CHECK(s2.h2[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s2.h2[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s2.v2[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stage correlations vanish when an arm mean is zero") {
  LimitParams p = null_params(SelectionRule::thompson(0.0), Weighting::Adaptive, false);
  p.mu[0] = 0.0;
  p.mu[1] = 0.8;
  p.m2[1] = 1.64;
  CHECK(limit_rho1(p) == 0.0);
  CHECK(limit_params_stage2(p, 0.3, -0.3).rho2 == 0.0);
}

TEST_CASE("rho1 matches the closed form on a nonzero-mean instance") {
  LimitParams p = null_params(SelectionRule::thompson(0.0), Weighting::Adaptive, false);
  p.mu[0] = 0.5;
  p.mu[1] = -0.2;
  p.m2[0] = 1.5;
  p.m2[1] = 1.1;
  p.e0 = 0.4;
  const double v0 = 1.5 - 0.4 * 0.25, v1 = 1.1 - 0.6 * 0.04;
  const double expect = -std::sqrt(0.4 * 0.6 / (v0 * v1)) * 0.5 * (-0.2);
  CHECK(limit_rho1(p) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("symmetric stages get equal weights") {
  const double h[2] = {0.5, 0.5};
  const double v[2] = {1.3, 0.9};
  for (const Weighting w : {Weighting::Constant, Weighting::Adaptive, Weighting::M1}) {
    const LimitWeights lw = scheme_weights(w, false, 0.5, 0.5, h, h, v, v);
    for (int s = 0; s < 2; ++s) CHECK(lw.w[0][s] == doctest::Approx(lw.w[1][s]).epsilon(1e-12));
  }
}

TEST_CASE("normalized weights have unit sum of squares") {
  const double h1[2] = {0.3, 0.7};
  const double h2[2] = {0.8, 0.2};
  const double v1[2] = {1.1, 0.6};
  const double v2[2] = {0.9, 1.4};
  for (const Weighting w : {Weighting::Constant, Weighting::Adaptive, Weighting::M1}) {
    const LimitWeights lw = scheme_weights(w, true, 0.4, 0.6, h1, h2, v1, v2);
    double ss = 0;
    for (int t = 0; t < 2; ++t)
      for (int s = 0; s < 2; ++s) ss += lw.w[t][s] * lw.w[t][s];
    CHECK(ss == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("constant weighting hand value and its positivity requirement") {
  const double h[2] = {0.5, 0.5};
  const double v[2] = {1.0, 1.0};
  const LimitWeights lw = scheme_weights(Weighting::Constant, false, 0.5, 0.5, h, h, v, v);
  // w = sqrt(q V / H) = sqrt(0.5 * 1 / 0.5) = 1
  CHECK(lw.w[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lw.w[1][1] == doctest::Approx(1.0).epsilon(1e-12));
  const double hz[2] = {0.0, 1.0};
  CHECK_THROWS_AS(scheme_weights(Weighting::Constant, false, 0.5, 0.5, h, hz, v, v),
                  std::runtime_error);
}

TEST_CASE("matrix square root reproduces the correlation matrix") {
  for (int i = -99; i <= 99; ++i) {
    const double rho = i / 100.0;
    const MatSqrt2 m = mat_sqrt2(rho);
    CHECK(m.a * m.a + m.b * m.b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(2 * m.a * m.b == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mat_sqrt2(1.0), std::runtime_error);
}

TEST_CASE("clamp_rho counts boundary hits") {
  long count = 0;
  CHECK(clamp_rho(0.3, &count) == 0.3);
  CHECK(count == 0);
  const double r = clamp_rho(1.0, &count);
  CHECK(count == 1);
  CHECK(r < 1.0);
  CHECK(clamp_rho(-5.0, &count) > -1.0);
  CHECK(count == 2);
}

TEST_CASE("a deterministic even split yields a standard normal limit") {
  // huge interim scale makes the p-value selection inconclusive for every
  // score, so the stage-2 propensity is exactly 1/2 and all correlations
  // vanish; the normalized statistic is then N(0, 1) in closed form
  const LimitParams p = null_params(SelectionRule::enrich_pvalue(0.05, 1e9, 0.1),
                                    Weighting::Constant, true);
  const std::vector<double> draws = sample_limit(p, 100000, RngStream::keyed({301}));
  CHECK(ks_vs_cdf(draws, [](double x) { return normal_cdf(x); }) < 0.01);
}

TEST_CASE("the strong-signal limit is gaussian for every design") {
  const SelectionRule rules[] = {
      SelectionRule::thompson(0.0), SelectionRule::eps_greedy(0.0),
      SelectionRule::enrich_effect(0.3, 0.0), SelectionRule::enrich_pvalue(0.05, 1.0, 0.0)};
  std::uint64_t seed = 400;
  for (const auto& base : rules) {
    for (const Weighting w : {Weighting::Adaptive, Weighting::M1, Weighting::Constant}) {
      SelectionRule rule = base;
      if (w == Weighting::Constant) rule.clip = 0.1;  // limiting clip must be interior
      LimitParams p = null_params(rule, w, false);
      p.mu[0] = 0.3;
      p.mu[1] = -0.1;
      p.m2[0] = 1.2;
      p.m2[1] = 1.05;
      p.c = kNegInf;
      const std::vector<double> draws = sample_limit(p, 100000, RngStream::keyed({seed++}));
      const double m = sample_mean_of(draws);
      const double sd = std::sqrt(sample_variance_of(draws));
      CHECK(ks_vs_cdf(draws, [&](double x) { return normal_cdf((x - m) / sd); }) < 0.01);
    }
  }
}

TEST_CASE("single-arm variance matches the two-case average") {
  // eps-greedy at c = 0 with zero means: the score is symmetric, so the
  // stage-2 propensity of arm 0 is 1 or 0 with probability 1/2 each and the
  // adaptive weights take exactly two configurations
  const LimitParams p = null_params(SelectionRule::eps_greedy(0.0), Weighting::Adaptive, false);
  const std::vector<double> draws = sample_limit_arm(p, 0, 200000, RngStream::keyed({500}));
  const double r = 1.0 / std::sqrt(2.0);
  // stage-1 weight 2r/(1+r) and stage-2 weight 2r/(1+r) when the arm is kept
  // (h2 = 1); both weights equal 2 when it is dropped (h2 = 0)
  const double w_keep = 2.0 * r / (1.0 + r);
  const double m2_keep = 2.0 * w_keep * w_keep;  // both stages, E[A^2 1(case)] = 1/2 each
  const double m2_drop = 8.0;
  const double expect_m2 = 0.5 * (m2_keep + m2_drop);
  // E[A1(0) 1(S >= 0)] = corr(A1(0), S) * phi(0) with corr = 1/sqrt(2)
  const double half_moment = r * 0.3989422804014327;
  const double expect_mean = half_moment * (w_keep - 2.0);
  CHECK(sample_mean_of(draws) == doctest::Approx(expect_mean).epsilon(0.03));
  double s2 = 0.0;
  for (double d : draws) s2 += d * d;
  s2 /= static_cast<double>(draws.size());
  CHECK(s2 == doctest::Approx(expect_m2).epsilon(0.03));
}

TEST_CASE("sampling is deterministic in the stream") {
  const LimitParams p = null_params(SelectionRule::thompson(0.05), Weighting::Adaptive, true);
  const auto a = sample_limit(p, 1000, RngStream::keyed({601}));
  const auto b = sample_limit(p, 1000, RngStream::keyed({601}));
  CHECK(a == b);
}

TEST_CASE("wasserstein distance basics and signal monotonicity") {
  CHECK(wasserstein1({1, 2, 3}, {3, 1, 2}) == 0.0);
  CHECK(wasserstein1({0, 0, 0}, {1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(wasserstein1({1, 2}, {1}), std::invalid_argument);

  LimitParams p = null_params(SelectionRule::thompson(0.0), Weighting::Adaptive, false);
  p.c = kNegInf;
  const auto ref = sample_limit(p, 50000, RngStream::keyed({700}));
  p.c = -15.0;
  const auto near = sample_limit(p, 50000, RngStream::keyed({701}));
  p.c = -5.0;
  const auto far = sample_limit(p, 50000, RngStream::keyed({702}));
  CHECK(wasserstein1(near, ref) < wasserstein1(far, ref));
}

TEST_CASE("parameter validation") {
  LimitParams p = null_params(SelectionRule::thompson(0.0), Weighting::Adaptive, false);
  CHECK_NOTHROW(p.validate());
  p.c = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.c = 0.0;
  p.weighting = Weighting::Constant;  // needs an interior limiting clip
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.rule.clip = 0.1;
  CHECK_NOTHROW(p.validate());
  p.m2[0] = 0.0;  // v1 must be positive
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
