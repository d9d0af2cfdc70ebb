#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaexp/bootstrap.hpp"
#include "adaexp/experiment.hpp"
#include "adaexp/outcomes.hpp"

namespace adaexp {

// The five test families of the study harness: four bootstrap tests
// (weighting x scaling) plus the stage-2-only sample-splitting z-test, with
// the m=1 weighting available as an extra pair.
enum class Method {
  ConstantU,
  ConstantN,
  AdaptiveU,
  AdaptiveN,
  M1U,
  M1N,
  SampleSplit,
};

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
bool method_is_bootstrap(Method m);
Weighting method_weighting(Method m);  // bootstrap methods only
bool method_normalized(Method m);      // bootstrap methods only
std::string method_weighting_name(Method m);  // "constant" | "adaptive" | "m1" | "-"
std::string method_scaling_name(Method m);    // "U" | "N" | "-"

enum class ModelFamily { Bernoulli, Gaussian, Poisson, Student };

std::string family_name(ModelFamily f);
std::optional<ModelFamily> parse_family(const std::string& name);

// Arm laws as functions of the signal parameter theta:
//   Bernoulli: Bern(0.5+theta) vs Bern(0.5)
//   Gaussian:  N(theta, 1) vs N(0, 0.25)
//   Poisson:   Pois(1+theta) vs Pois(1)
//   Student:   theta + t(5) vs t(10)
OutcomeModel model_from_theta(ModelFamily f, double theta);

std::string side_name(Side s);
std::optional<Side> parse_side(const std::string& name);

struct StudyConfig {
  ModelFamily family = ModelFamily::Gaussian;
  std::vector<double> thetas{0.0};
  std::vector<double> epsilons{0.1};  // mapped to l_N = eps/2
  SelectionKind selection = SelectionKind::Thompson;
  double beta = 0.0;        // enrich_effect threshold
  double alpha_sel = 0.05;  // enrich_pvalue level
  double sigma_hat = 0.0;   // enrich_pvalue scale; 0 means estimate from pilot
  long n1 = 500;
  long n2 = 500;
  double e0 = 0.5;
  std::vector<Method> methods;
  std::vector<Side> sides{Side::Right};
  long reps = 2000;
  long b_draws = 5000;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  int threads = 1;
  bool emit_pvalues = false;

  SelectionRule make_rule(double epsilon) const;
  void validate() const;  // throws std::invalid_argument
};

struct StudyRow {
  std::string method;
  std::string weighting;  // constant | adaptive | m1 | -
  std::string scaling;    // U | N | -
  double epsilon;
  double theta;
  std::string side;
  long reps;
  long rejections;
  long abstentions;
  double rejection_rate;
  double mc_standard_error;
};

struct PValueRow {
  std::string method;
  std::string side;
  double epsilon;
  double theta;
  long rep;
  double p;  // NaN when the replication abstained
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<PValueRow> pvalues;  // populated when cfg.emit_pvalues
};

// Result of one test on one trial: status 0 accept, 1 reject, 2 abstain.
struct TrialTestOutcome {
  std::uint8_t status = 0;
  double p = 0.0;  // NaN on abstention
};

// Applies every (method, side) test to one trial; bootstrap draws come from
// rep_root.fork(boot_tag).fork(weighting) and are shared across scalings and
// sides of the same weighting. `resolved` is the selection rule with any
// pilot-estimated sigma already substituted. Output index: mi * n_sides + si.
std::vector<TrialTestOutcome> test_trial_all(const TrialData& trial,
                                             const SelectionRule& resolved,
                                             const std::vector<Method>& methods,
                                             const std::vector<Side>& sides, double alpha,
                                             long b_draws, const RngStream& rep_root);

// Runs reps trials per (epsilon, theta) cell, tests each with every requested
// method and side, and aggregates exact integer counts. Replication streams
// are keyed (master_seed, cell, rep); bootstrap streams fork a dedicated tag
// plus the weighting, and the draws are shared across scalings and sides of
// the same weighting. Output is byte-identical for any thread count.
StudyResult run_study(const StudyConfig& cfg);

struct QqRow {
  std::string method;
  std::string side;
  long k;
  double p_sorted;
  double uniform_quantile;  // k / (reps + 1)
};

// Sorted p-values per (method, side) against the uniform grid; abstaining
// replications are dropped from the ranking.
std::vector<QqRow> qq_rows(const StudyResult& result);

// Draws of sqrt(N) T_N - c_N over reps independent trials, where c_N is the
// model's signal at N = n1 + n2.
std::vector<double> sampling_histogram(const DesignConfig& cfg, const OutcomeModel& model,
                                       long reps, int threads);

}  // namespace adaexp
