#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adaexp/montecarlo.hpp"

using namespace adaexp;

namespace {

StudyConfig small_study() {
  StudyConfig cfg;
  cfg.family = ModelFamily::Gaussian;
  cfg.thetas = {0.0, 0.3};
  cfg.epsilons = {0.1};
  cfg.selection = SelectionKind::EpsGreedy;
  cfg.n1 = 40;
  cfg.n2 = 40;
  cfg.methods = {Method::AdaptiveN, Method::ConstantU, Method::SampleSplit};
  cfg.sides = {Side::Right};
  cfg.reps = 20;
  cfg.b_draws = 100;
  cfg.master_seed = 5;
  cfg.emit_pvalues = true;
  return cfg;
}

}  // namespace

TEST_CASE("method and family names round-trip") {
  for (const Method m : {Method::ConstantU, Method::ConstantN, Method::AdaptiveU,
                         Method::AdaptiveN, Method::M1U, Method::M1N, Method::SampleSplit}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  for (const ModelFamily f : {ModelFamily::Bernoulli, ModelFamily::Gaussian,
                              ModelFamily::Poisson, ModelFamily::Student}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK(parse_side(side_name(Side::Left)) == Side::Left);
  CHECK_FALSE(parse_method("nonsense").has_value());
  CHECK(method_scaling_name(Method::SampleSplit) == "-");
  CHECK(method_weighting_name(Method::M1U) == "m1");
}

TEST_CASE("model families realize the documented arm laws") {
  const OutcomeModel b = model_from_theta(ModelFamily::Bernoulli, 0.2);
  CHECK(b.mean(0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(b.mean(1) == doctest::Approx(0.5).epsilon(1e-12));
  const OutcomeModel g = model_from_theta(ModelFamily::Gaussian, 0.3);
  CHECK(g.mean(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(g.second_moment(1) == doctest::Approx(0.25).epsilon(1e-12));
  const OutcomeModel p = model_from_theta(ModelFamily::Poisson, 0.4);
  CHECK(p.mean(0) == doctest::Approx(1.4).epsilon(1e-12));
  const OutcomeModel s = model_from_theta(ModelFamily::Student, 0.1);
  CHECK(s.mean(0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.mean(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a single replication produces a 0-or-1 rate with zero standard error") {
  StudyConfig cfg = small_study();
  cfg.reps = 1;
  cfg.thetas = {0.0};
  const StudyResult res = run_study(cfg);
  for (const StudyRow& row : res.rows) {
    CHECK((row.rejection_rate == 0.0 || row.rejection_rate == 1.0 ||
           row.abstentions == 1));
    CHECK(row.reps == 1);
    CHECK(row.mc_standard_error == 0.0);
  }
}

TEST_CASE("results are identical for any thread count") {
  StudyConfig cfg = small_study();
  cfg.threads = 1;
  const StudyResult a = run_study(cfg);
  cfg.threads = 4;
  const StudyResult b = run_study(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].rejections == b.rows[i].rejections);
    CHECK(a.rows[i].abstentions == b.rows[i].abstentions);
  }
  REQUIRE(a.pvalues.size() == b.pvalues.size());
  for (std::size_t i = 0; i < a.pvalues.size(); ++i) {
    CHECK((a.pvalues[i].p == b.pvalues[i].p ||
           (std::isnan(a.pvalues[i].p) && std::isnan(b.pvalues[i].p))));
    CHECK(a.pvalues[i].rep == b.pvalues[i].rep);
  }
}

TEST_CASE("row bookkeeping is exact") {
  const StudyConfig cfg = small_study();
  const StudyResult res = run_study(cfg);
  // 3 methods x 1 side x 1 epsilon x 2 thetas
  CHECK(res.rows.size() == 6);
  for (const StudyRow& row : res.rows) {
    CHECK(row.reps == cfg.reps);
    CHECK(row.rejections >= 0);
    CHECK(row.rejections + row.abstentions <= row.reps);
    const double r = row.rejection_rate;
    CHECK(r == doctest::Approx(static_cast<double>(row.rejections) / row.reps).epsilon(1e-12));
    CHECK(row.mc_standard_error ==
          doctest::Approx(std::sqrt(r * (1 - r) / row.reps)).epsilon(1e-12));
  }
  // p-values emitted for every (method, side, cell, rep)
  CHECK(res.pvalues.size() == 6 * static_cast<std::size_t>(cfg.reps));
}

TEST_CASE("power increases with the signal") {
  StudyConfig cfg = small_study();
  cfg.thetas = {0.0, 0.6};
  cfg.n1 = 100;
  cfg.n2 = 100;
  cfg.reps = 100;
  cfg.b_draws = 200;
  cfg.methods = {Method::AdaptiveN};
  const StudyResult res = run_study(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[1].rejection_rate > res.rows[0].rejection_rate + 0.3);
}

TEST_CASE("qq rows rank the emitted p-values against the uniform grid") {
  StudyConfig cfg = small_study();
  cfg.thetas = {0.0};
  cfg.methods = {Method::AdaptiveN};
  const StudyResult res = run_study(cfg);
  const std::vector<QqRow> rows = qq_rows(res);
  REQUIRE(!rows.empty());
  const long k_max = static_cast<long>(rows.size());
  double prev = 0.0;
  for (long i = 0; i < k_max; ++i) {
    CHECK(rows[i].k == i + 1);
    CHECK(rows[i].p_sorted >= prev);
    CHECK(rows[i].uniform_quantile ==
          doctest::Approx(static_cast<double>(i + 1) / (k_max + 1)).epsilon(1e-12));
    prev = rows[i].p_sorted;
  }
}

TEST_CASE("a degenerate model yields an all-zero histogram") {
  DesignConfig cfg;
  cfg.n1 = 20;
  cfg.n2 = 20;
  cfg.rule = SelectionRule::eps_greedy(0.1);
  cfg.seed = 9;
  const OutcomeModel model = OutcomeModel::gaussian(0, 0, 0, 0);
  const std::vector<double> draws = sampling_histogram(cfg, model, 50, 2);
  CHECK(draws.size() == 50);
  for (double d : draws) CHECK(d == 0.0);
}

TEST_CASE("histogram draws are centered near the signal under the null") {
  DesignConfig cfg;
  cfg.n1 = 200;
  cfg.n2 = 200;
  cfg.rule = SelectionRule::eps_greedy(0.05);
  cfg.seed = 10;
  const std::vector<double> draws =
      sampling_histogram(cfg, OutcomeModel::gaussian(0, 1, 0, 1), 2000, 4);
  double s = 0;
  for (double d : draws) s += d;
  CHECK(std::abs(s / 2000.0) < 0.2);
}

TEST_CASE("study validation rejects bad configurations") {
  StudyConfig cfg = small_study();
  cfg.b_draws = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_study();
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_study();
  cfg.epsilons = {0.0};
  cfg.methods = {Method::ConstantU};  // constant weighting needs a positive clip
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
