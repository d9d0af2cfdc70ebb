#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adaexp/experiment.hpp"
#include "adaexp/montecarlo.hpp"
#include "adaexp/rng.hpp"

namespace adaexp {

// A two-arm binary-outcome trial dataset: group 0 is control, group 1 is
// treatment. The permutation pipeline maps control to arm 0.
struct TrialCsv {
  std::vector<long> unit_id;
  std::vector<int> group;
  std::vector<double> outcome;

  long size() const { return static_cast<long>(unit_id.size()); }
  long group_count(int g) const;
  long control_zero_count() const;  // N_c^0

  // Throws std::invalid_argument on non-binary outcomes or an empty group.
  void validate() const;
};

TrialCsv parse_trial_csv(std::istream& in);
TrialCsv load_trial_csv(const std::string& path);
void write_trial_csv(std::ostream& out, const TrialCsv& data);

// Random reassignment of outcomes across the whole population; group labels
// stay put, so the outcome multiset is preserved and group-outcome
// dependence is broken.
TrialCsv permute_outcomes(const TrialCsv& data, RngStream& rng);

// Flips each control-group zero to 1 independently with probability eta,
// which realizes n0 ~ Binomial(N_c^0, eta) flips chosen uniformly.
TrialCsv inject_signal(const TrialCsv& data, double eta, RngStream& rng);

// Two-stage epsilon-greedy resampling from the group outcome pools: pilot of
// n1 units with a fair coin per arm, then n2 follow-up units at the clipped
// probability (l_N = epsilon/2). Outcomes are drawn with replacement by
// default; without-replacement draws from per-arm pool copies otherwise.
TrialData adaptive_resample(const TrialCsv& data, double epsilon, long n1, long n2,
                            const RngStream& root, bool with_replacement = true);

struct SemiConfig {
  long permutations = 500;
  std::vector<double> etas{0.0};
  std::vector<double> epsilons{0.1};
  long n1 = 1000;
  long n2 = 1000;
  std::vector<Method> methods;
  std::vector<Side> sides{Side::Right};
  double alpha = 0.05;
  long b_draws = 5000;
  std::uint64_t master_seed = 1;
  int threads = 1;
  bool with_replacement = true;
  bool emit_pvalues = false;

  void validate() const;
};

// Permute -> inject -> resample -> test, aggregated like run_study. The
// StudyRow theta column carries eta. Permutation streams are keyed
// (master_seed, cell, permutation).
StudyResult run_semisynthetic(const SemiConfig& cfg, const TrialCsv& data);

// Synthetic stand-in dataset: rare binary events at the given rate in both
// groups, a treat_fraction share of treatment labels.
TrialCsv generate_semisynthetic_data(long n_units, double event_rate, double treat_fraction,
                                     const RngStream& root);

}  // namespace adaexp
