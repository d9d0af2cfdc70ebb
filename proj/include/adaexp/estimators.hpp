#pragma once

#include <utility>
#include <vector>

#include "adaexp/experiment.hpp"

namespace adaexp {

// Per-unit and stage-mean IPW values Lambda_hat for one (stage, arm).
// A stage with zero propensity and no assignments to the arm returns zeros
// (early-dropped arm convention). Zero propensity with assignments present
// signals inconsistent data.
struct StageIpw {
  double mean = 0.0;
  std::vector<double> per_unit;
  bool inconsistent = false;
};

StageIpw ipw_stage(const TrialData& data, int t, int s);

// Same weighting applied to squared outcomes (second-moment estimator).
StageIpw ipw_stage_squared(const TrialData& data, int t, int s);

// Realized WIPW stage weights N_t h^(t)(s) / sum_t N_t h^(t)(s) for the
// weight class h = e_bar^m / sqrt(N). Throws std::runtime_error when every
// stage weight vanishes (no data for the arm).
std::pair<double, double> stage_weights(const TrialData& data, Weighting w, int s);

double wipw(const TrialData& data, Weighting w, int s);
double wipws(const TrialData& data, Weighting w, int s);
double variance_hat(const TrialData& data, Weighting w, int s);

// Augmented estimator; waipw(data, w, s, 0) == wipw(data, w, s) exactly.
double waipw(const TrialData& data, Weighting w, int s, double mu_hat);

// Pooled mean of observed arm-s outcomes across both stages; an arm with no
// observations returns 1 (the 0/0 = 1 convention).
double sample_mean(const TrialData& data, int s);

struct EstimateReport {
  double lambda_hat[2][2];   // [stage][arm]
  double wipw_val[2];
  double wipws_val[2];
  double v_hat[2];
  double weights[2][2];      // stage weights [stage][arm]
  double t_stat = 0.0;       // T_N
  double s_hat = 0.0;        // S_hat_N
  double w_stat = 0.0;       // W_N (NaN when s_hat == 0)
  bool w_stat_valid = false;
};

EstimateReport compute_report(const TrialData& data, Weighting w);

enum class Side { Left, Right };

struct SplitTestResult {
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool abstain = false;
};

// Stage-2-only IPW difference normalized by its plug-in standard error and
// compared to the standard normal quantile.
SplitTestResult sample_split_test(const TrialData& data, double alpha, Side side);

}  // namespace adaexp
