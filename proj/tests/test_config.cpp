#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "adaexp/config.hpp"

using namespace adaexp;

TEST_CASE("a full configuration parses with inheritance into the study") {
  const std::string text = R"({
    "seed": 9,
    "threads": 3,
    "outcome": {"family": "gaussian", "mu0": 0.1, "var0": 1.0, "mu1": 0.0, "var1": 0.25},
    "selection": {"kind": "eps_greedy", "l_n": 0.05},
    "design": {"n1": 500, "n2": 500, "e0": 0.5, "weighting": "adaptive"},
    "study": {
      "family": "gaussian",
      "thetas": [0.0, 0.2],
      "epsilons": [0.1],
      "methods": ["adaptive_n", "sample_split"],
      "sides": ["right", "left"],
      "reps": 100,
      "bootstrap_draws": 200,
      "alpha": 0.05,
      "emit_pvalues": true
    }
  })";
  const RunConfig rc = parse_run_config(text);
  REQUIRE(rc.outcome.has_value());
  REQUIRE(rc.design.has_value());
  REQUIRE(rc.study.has_value());
  CHECK(rc.seed == 9);
  CHECK(rc.study->threads == 3);
  CHECK(rc.study->master_seed == 9);
  CHECK(rc.study->n1 == 500);
  CHECK(rc.study->selection == SelectionKind::EpsGreedy);
  CHECK(rc.study->methods.size() == 2);
  CHECK(rc.study->sides.size() == 2);
  CHECK(rc.study->emit_pvalues);
  CHECK(rc.design->rule.clip == doctest::Approx(0.05));
  CHECK(rc.outcome->mean(0) == doctest::Approx(0.1));
}

TEST_CASE("unknown keys are rejected with the offending name") {
  const std::string text = R"({"outcome": {"family": "poisson", "lambda0": 1.0,
                               "lambda1": 1.0, "typo_key": 3}})";
  try {
    parse_run_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
  }
}

TEST_CASE("malformed JSON and wrong types are reported as config errors") {
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"seed": "abc"})"), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"outcome": {"family": "weibull"}})"), ConfigError);
}

TEST_CASE("constant weighting without clipping violates positivity") {
  const std::string text = R"({
    "selection": {"kind": "eps_greedy", "l_n": 0.0},
    "design": {"n1": 100, "n2": 100, "weighting": "constant"}
  })";
  try {
    parse_run_config(text);
    FAIL("expected a positivity error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK((msg.find("clip") != std::string::npos ||
           msg.find("positivity") != std::string::npos));
  }
}

TEST_CASE("sigma_hat accepts a number or the estimate keyword") {
  const std::string numeric = R"({
    "selection": {"kind": "enrich_pvalue", "alpha_sel": 0.05, "sigma_hat": 2.0, "l_n": 0.1}
  })";
  CHECK_FALSE(parse_run_config(numeric).design.has_value());
  const std::string estimated = R"({
    "selection": {"kind": "enrich_pvalue", "alpha_sel": 0.05, "sigma_hat": "estimate",
                  "l_n": 0.1},
    "design": {"n1": 50, "n2": 50}
  })";
  const RunConfig rc = parse_run_config(estimated);
  REQUIRE(rc.design.has_value());
  CHECK(rc.design->rule.sigma_from_pilot);
  CHECK_THROWS_AS(parse_run_config(R"({
    "selection": {"kind": "enrich_pvalue", "alpha_sel": 0.05, "sigma_hat": true, "l_n": 0.1}
  })"),
                  ConfigError);
}

TEST_CASE("trial data round-trips through the CSV format") {
  DesignConfig cfg;
  cfg.n1 = 30;
  cfg.n2 = 30;
  cfg.rule = SelectionRule::thompson(0.1);
  const TrialData t =
      run_trial(cfg, OutcomeModel::gaussian(0.2, 1, 0, 0.25), RngStream::keyed({1000}));
  std::ostringstream out;
  write_trial_data(out, t);
  std::istringstream in(out.str());
  const TrialData back = read_trial_data(in);
  CHECK(back.e0 == t.e0);
  CHECK(back.p2_arm0() == t.p2_arm0());
  CHECK(back.interim0 == t.interim0);
  CHECK(back.interim1 == t.interim1);
  CHECK(back.sigma_hat == t.sigma_hat);
  CHECK(back.stage[0].arms == t.stage[0].arms);
  CHECK(back.stage[0].outcomes == t.stage[0].outcomes);
  CHECK(back.stage[1].outcomes == t.stage[1].outcomes);
}

TEST_CASE("reading malformed trial data fails cleanly") {
  std::istringstream no_meta("stage,arm,outcome\n1,0,1.0\n");
  CHECK_THROWS_AS(read_trial_data(no_meta), ConfigError);
}

TEST_CASE("signal shifting hits the requested c exactly") {
  const OutcomeModel base = OutcomeModel::gaussian(0, 1, 0, 9);
  const OutcomeModel shifted = model_with_signal(base, -15.0, 10000);
  CHECK(shifted.signal(10000) == doctest::Approx(-15.0).epsilon(1e-9));
  CHECK(shifted.mean(0) == base.mean(0));
  const OutcomeModel nonneg = OutcomeModel::poisson(1, 1);
  CHECK_THROWS_AS(model_with_signal(nonneg, -5.0, 100), std::invalid_argument);
}

TEST_CASE("weighting names round-trip") {
  for (const Weighting w : {Weighting::Constant, Weighting::Adaptive, Weighting::M1})
    CHECK(parse_weighting(weighting_name(w)) == w);
  CHECK_FALSE(parse_weighting("banana").has_value());
}

TEST_CASE("the semisynthetic section parses") {
  const std::string text = R"({
    "seed": 3,
    "semisynthetic": {
      "permutations": 50,
      "etas": [0.0, 0.03],
      "epsilons": [0.1],
      "n1": 200,
      "n2": 200,
      "methods": ["constant_u", "sample_split"],
      "bootstrap_draws": 500,
      "with_replacement": false
    }
  })";
  const RunConfig rc = parse_run_config(text);
  REQUIRE(rc.semi.has_value());
  CHECK(rc.semi->permutations == 50);
  CHECK(rc.semi->etas.size() == 2);
  CHECK_FALSE(rc.semi->with_replacement);
  CHECK(rc.semi->master_seed == 3);
}
