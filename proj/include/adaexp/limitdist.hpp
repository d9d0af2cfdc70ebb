#pragma once

#include <vector>

#include "adaexp/experiment.hpp"
#include "adaexp/rng.hpp"
#include "adaexp/selection.hpp"

namespace adaexp {

// Parameters of the closed-form limiting distribution: a weighted sum of two
// dependent mean-zero Gaussian pairs. c is the limiting signal and may be
// -infinity (strong-signal regime); rule.clip holds the limiting clip l_bar
// (0 under adaptive weighting, interior under constant).
struct LimitParams {
  double c = 0.0;
  double mu[2] = {0.0, 0.0};  // lim E[Y(s)]
  double m2[2] = {1.0, 1.0};  // lim E[Y^2(s)]
  double e0 = 0.5;
  SelectionRule rule;
  double q1 = 0.5;  // stage fractions N_t / N
  double q2 = 0.5;
  Weighting weighting = Weighting::Adaptive;
  bool normalized = false;

  double h1(int s) const { return s == 0 ? e0 : 1.0 - e0; }
  double v1(int s) const { return m2[s] - h1(s) * mu[s] * mu[s]; }

  // Throws std::invalid_argument on a violated moment or clip condition.
  void validate() const;
};

struct Stage2Params {
  double h2[2];
  double v2[2];
  double rho2;
};

struct LimitWeights {
  double w[2][2];  // [stage][arm]
};

struct LimitDraw {
  double a1[2];
  double a2[2];
  double w_value;
};

// S(x, c) = x_0 sqrt(v_0)/sqrt(e(0)) - x_1 sqrt(v_1)/sqrt(e(1)) + c/sqrt(2);
// returns -infinity when c = -infinity.
double selection_score(double a10, double a11, double v10, double v11,
                       double c, double e0);

// Pulls rho into the open interval (-1, 1); increments *clamp_count when the
// input grazed or exceeded the boundary.
double clamp_rho(double rho, long* clamp_count = nullptr);

// Closed-form square root of [[1, rho], [rho, 1]]: entries a on the diagonal
// and b off it.
struct MatSqrt2 {
  double a;
  double b;
};
MatSqrt2 mat_sqrt2(double rho);

double limit_rho1(const LimitParams& p);

// Conditional stage-2 parameters given the realized first-stage pair a1:
// H^(2)(s) = clip of e_bar(s, S), V^(2)(s) = m2 - H^(2) mu^2, and the
// stage-2 correlation.
Stage2Params limit_params_stage2(const LimitParams& p, double a10, double a11);

// w_bar per scheme from raw per-stage propensities and variances; the
// normalized variant divides every entry by the root-sum-of-squares over the
// four (stage, arm) cells. Throws std::runtime_error when constant weighting
// meets a zero propensity.
LimitWeights scheme_weights(Weighting weighting, bool normalized, double q1, double q2,
                            const double h1[2], const double h2[2],
                            const double v1[2], const double v2[2]);

LimitWeights limit_weights(const LimitParams& p, const double h2[2], const double v2[2]);

LimitDraw sample_limit_one(const LimitParams& p, RngStream& rng);

// n_draws i.i.d. draws of the two-arm limit statistic; draw i uses the
// independent stream root.fork(i), so output is scheduling-invariant.
std::vector<double> sample_limit(const LimitParams& p, long n_draws, const RngStream& root);

// Single-arm limit sum_t w_bar^(t)(s) A^(t)(s) with unnormalized weights.
std::vector<double> sample_limit_arm(const LimitParams& p, int s, long n_draws,
                                     const RngStream& root);

// Empirical 1-Wasserstein distance for equal-size samples: mean absolute
// difference of order statistics. Throws std::invalid_argument on a length
// mismatch.
double wasserstein1(std::vector<double> xs, std::vector<double> ys);

}  // namespace adaexp
