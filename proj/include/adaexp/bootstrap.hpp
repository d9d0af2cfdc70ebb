#pragma once

#include <vector>

#include "adaexp/estimators.hpp"
#include "adaexp/experiment.hpp"
#include "adaexp/limitdist.hpp"
#include "adaexp/rng.hpp"
#include "adaexp/selection.hpp"

namespace adaexp {

// Plug-in nuisances for the bootstrap: WIPW point and second-moment
// estimates, floored stage-1 variances, the clamped stage-1 correlation, and
// the selection rule with its limiting clip l_bar (the finite-sample clip
// under constant weighting, 0 otherwise). The null signal c=0 is hard-wired.
// floor_count / clamp_count accumulate across estimation and draws.
struct NuisanceEstimates {
  double mu_hat[2];
  double mu2_hat[2];
  double h1[2];     // stage-1 propensities
  double v1_hat[2]; // floored at kVarianceFloor
  double cov1_hat;  // clamped into (-1, 1)
  double q[2];      // stage fractions
  SelectionRule limit_rule;
  Weighting weighting;
  long floor_count = 0;
  long clamp_count = 0;
};

inline constexpr double kVarianceFloor = 1e-8;

// Throws std::runtime_error when a variance stays degenerate after flooring
// or an arm has no data.
NuisanceEstimates estimate_nuisance(const TrialData& data, const SelectionRule& rule,
                                    Weighting w);

// One bootstrap draw D^(b): two dependent standard-Gaussian pairs combined
// with plug-in weights. Constant work regardless of the original sample size.
double bootstrap_draw(NuisanceEstimates& nu, bool normalized, RngStream& rng);

// Both scalings of the same underlying Gaussian draw; the normalized value
// rescales the realized weight vector to unit length.
void bootstrap_draw_pair(NuisanceEstimates& nu, RngStream& rng,
                         double* unnormalized, double* normalized);

struct BootstrapResult {
  std::vector<double> draws;  // side-adjusted, sorted ascending
  double stat = 0.0;          // side-adjusted test statistic
  double quantile_used = 0.0; // order statistic at the requested level
  double p_value = 1.0;
  bool reject = false;
  bool abstain = false;
  long floor_count = 0;
  long clamp_count = 0;

  // Empirical (1 - alpha) quantile: order statistic ceil((1-alpha)B).
  double quantile(double alpha) const;
};

// Decision logic shared by run_test and the Monte Carlo harness: applies the
// side sign to the raw (right-side) statistic and draws, sorts, and fills
// quantile, rejection, and the add-one-smoothed p-value.
BootstrapResult evaluate_with_draws(double stat, std::vector<double> draws, double alpha,
                                    Side side);

// Full test: statistic sqrt(N) T_N (unnormalized) or W_N (normalized)
// against the empirical bootstrap quantile; left-sided tests negate both the
// statistic and the draws. p-value uses add-one smoothing. Draw b reads from
// stream root.fork(b).
BootstrapResult run_test(const TrialData& data, const SelectionRule& rule, Weighting w,
                         bool normalized, double alpha, Side side, long b_draws,
                         const RngStream& root);

// Kolmogorov sup-distance between two empirical CDFs (bootstrap draws against
// a reference limit sample).
double bootstrap_cdf_agreement(const std::vector<double>& boot_draws,
                               const std::vector<double>& ref_draws);

}  // namespace adaexp
