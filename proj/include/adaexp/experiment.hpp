#pragma once

#include <cstdint>
#include <vector>

#include "adaexp/outcomes.hpp"
#include "adaexp/rng.hpp"
#include "adaexp/selection.hpp"

namespace adaexp {

// WIPW weight exponent m in h = e_bar^m / sqrt(N).
enum class Weighting { Constant, Adaptive, M1 };  // m = 0, 1/2, 1

inline double weight_exponent(Weighting w) {
  switch (w) {
    case Weighting::Constant: return 0.0;
    case Weighting::Adaptive: return 0.5;
    case Weighting::M1: return 1.0;
  }
  return 0.0;
}

struct DesignConfig {
  long n1 = 0;
  long n2 = 0;
  double e0 = 0.5;  // pilot probability of arm 0
  SelectionRule rule;
  Weighting weighting = Weighting::Adaptive;
  std::uint64_t seed = 0;

  long total() const { return n1 + n2; }

  // Checks the assumption set matching the weighting:
  //   Constant  requires clip > 0 (positivity),
  //   Adaptive  requires clip in (0, 1/2); warns via return when N*l_N < 10,
  //   M1        permits clip = 0.
  // Throws std::invalid_argument on a hard violation; returns warnings.
  std::vector<std::string> validate() const;
};

struct StageData {
  std::vector<std::uint8_t> arms;
  std::vector<double> outcomes;
  double p_arm0 = 0.5;  // assignment probability of arm 0 in this stage

  long size() const { return static_cast<long>(arms.size()); }
};

struct TrialData {
  StageData stage[2];
  double e0 = 0.5;
  double interim0 = 0.0;  // S_N^(1)(0)
  double interim1 = 0.0;  // S_N^(1)(1)
  double sigma_hat = 1.0; // resolved interim scale (p-value enrichment)

  double p2_arm0() const { return stage[1].p_arm0; }
  long n(int t) const { return stage[t].size(); }
  long total() const { return n(0) + n(1); }
  double propensity(int t, int s) const {
    const double p0 = stage[t].p_arm0;
    return s == 0 ? p0 : 1.0 - p0;
  }
};

// Interim IPW statistic S^(1)(s) = n1^{-1/2} sum 1(A=s) Y / e(s) from raw
// pilot arrays; exposed separately so hand-computed instances are testable.
double interim_statistic(const std::vector<std::uint8_t>& arms,
                         const std::vector<double>& outcomes, int arm, double e_arm);

// Plug-in standard deviation of the interim difference under the null,
// computed from pilot data: sigma^2 = V(0)/e(0) + V(1)/e(1) with
// V(s) = pilot IPW second moment - e(s) * (pilot IPW mean)^2.
double pilot_sigma_estimate(const StageData& pilot, double e0);

// Stage generators. Each unit u draws from stream root.fork(stage).fork(u),
// so trials are bit-reproducible independent of threading.
StageData run_pilot(const DesignConfig& cfg, const OutcomeModel& model, const RngStream& root);
StageData run_followup(const DesignConfig& cfg, const OutcomeModel& model, double p_arm0,
                       const RngStream& root);
TrialData run_trial(const DesignConfig& cfg, const OutcomeModel& model, const RngStream& root);

}  // namespace adaexp
