#include "adaexp/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adaexp/stats.hpp"

namespace adaexp {

NuisanceEstimates estimate_nuisance(const TrialData& data, const SelectionRule& rule,
                                    Weighting w) {
  NuisanceEstimates nu{};
  nu.weighting = w;
  nu.limit_rule = rule;
  if (w != Weighting::Constant) nu.limit_rule.clip = 0.0;  // l_bar = lim l_N = 0

  const double n = static_cast<double>(data.total());
  nu.q[0] = static_cast<double>(data.n(0)) / n;
  nu.q[1] = static_cast<double>(data.n(1)) / n;
  for (int s = 0; s < 2; ++s) {
    nu.h1[s] = data.propensity(0, s);
    nu.mu_hat[s] = wipw(data, w, s);
    nu.mu2_hat[s] = wipws(data, w, s);
    double v = nu.mu2_hat[s] - nu.h1[s] * nu.mu_hat[s] * nu.mu_hat[s];
    if (v < kVarianceFloor) {
      v = kVarianceFloor;
      ++nu.floor_count;
    }
    nu.v1_hat[s] = v;
  }
  const double rho_raw = -std::sqrt(nu.h1[0] * nu.h1[1] / (nu.v1_hat[0] * nu.v1_hat[1])) *
                         nu.mu_hat[0] * nu.mu_hat[1];
  if (!std::isfinite(rho_raw))
    throw std::runtime_error("degenerate nuisance correlation");
  nu.cov1_hat = clamp_rho(rho_raw, &nu.clamp_count);
  return nu;
}

void bootstrap_draw_pair(NuisanceEstimates& nu, RngStream& rng,
                         double* unnormalized, double* normalized) {
  const MatSqrt2 m1 = mat_sqrt2(nu.cov1_hat);
  const double z10 = rng.normal();
  const double z11 = rng.normal();
  const double a1[2] = {m1.a * z10 + m1.b * z11, m1.b * z10 + m1.a * z11};

  // null-calibrated: the limiting signal in the score is fixed at c = 0
  const double score =
      selection_score(a1[0], a1[1], nu.v1_hat[0], nu.v1_hat[1], 0.0, nu.h1[0]);

  double h2[2], v2[2];
  for (int s = 0; s < 2; ++s) {
    h2[s] = nu.limit_rule.clipped(s, score);
    v2[s] = nu.mu2_hat[s] - h2[s] * nu.mu_hat[s] * nu.mu_hat[s];
    if (v2[s] < kVarianceFloor) {
      v2[s] = kVarianceFloor;
      ++nu.floor_count;
    }
  }
  double rho2 = 0.0;
  if (h2[0] > 0.0 && h2[1] > 0.0) {
    rho2 = clamp_rho(-std::sqrt(h2[0] * h2[1] / (v2[0] * v2[1])) * nu.mu_hat[0] * nu.mu_hat[1],
                     &nu.clamp_count);
  }
  const MatSqrt2 m2 = mat_sqrt2(rho2);
  const double z20 = rng.normal();
  const double z21 = rng.normal();
  const double a2[2] = {m2.a * z20 + m2.b * z21, m2.b * z20 + m2.a * z21};

  if (unnormalized) {
    const LimitWeights lw = scheme_weights(nu.weighting, false, nu.q[0], nu.q[1],
                                           nu.h1, h2, nu.v1_hat, v2);
    *unnormalized =
        lw.w[0][0] * a1[0] + lw.w[1][0] * a2[0] - lw.w[0][1] * a1[1] - lw.w[1][1] * a2[1];
  }
  if (normalized) {
    const LimitWeights lw = scheme_weights(nu.weighting, true, nu.q[0], nu.q[1],
                                           nu.h1, h2, nu.v1_hat, v2);
    *normalized =
        lw.w[0][0] * a1[0] + lw.w[1][0] * a2[0] - lw.w[0][1] * a1[1] - lw.w[1][1] * a2[1];
  }
}

double bootstrap_draw(NuisanceEstimates& nu, bool normalized, RngStream& rng) {
  double out = 0.0;
  if (normalized)
    bootstrap_draw_pair(nu, rng, nullptr, &out);
  else
    bootstrap_draw_pair(nu, rng, &out, nullptr);
  return out;
}

double BootstrapResult::quantile(double alpha) const {
  const long b = static_cast<long>(draws.size());
  long k = static_cast<long>(std::ceil((1.0 - alpha) * static_cast<double>(b)));
  k = std::max(1L, std::min(b, k));
  return draws[k - 1];
}

BootstrapResult evaluate_with_draws(double stat, std::vector<double> draws, double alpha,
                                    Side side) {
  BootstrapResult res;
  if (std::isnan(stat)) {
    res.abstain = true;
    return res;
  }
  const double sign = (side == Side::Left) ? -1.0 : 1.0;
  res.stat = sign * stat;
  if (sign < 0)
    for (double& d : draws) d = -d;
  std::sort(draws.begin(), draws.end());
  res.draws = std::move(draws);
  res.quantile_used = res.quantile(alpha);
  res.reject = res.stat > res.quantile_used;
  long ge = 0;
  for (double d : res.draws)
    if (d >= res.stat) ++ge;
  res.p_value =
      (1.0 + static_cast<double>(ge)) / (static_cast<double>(res.draws.size()) + 1.0);
  return res;
}

BootstrapResult run_test(const TrialData& data, const SelectionRule& rule, Weighting w,
                         bool normalized, double alpha, Side side, long b_draws,
                         const RngStream& root) {
  if (b_draws < 100) throw std::invalid_argument("bootstrap size B must be at least 100");
  BootstrapResult res;
  const EstimateReport rep = compute_report(data, w);
  double stat;
  if (normalized) {
    if (!rep.w_stat_valid) {
      res.abstain = true;
      return res;
    }
    stat = rep.w_stat;
  } else {
    stat = std::sqrt(static_cast<double>(data.total())) * rep.t_stat;
  }
  if (!std::isfinite(stat) && !std::isinf(stat)) {
    res.abstain = true;
    return res;
  }

  NuisanceEstimates nu = estimate_nuisance(data, rule, w);
  std::vector<double> draws(b_draws);
  for (long b = 0; b < b_draws; ++b) {
    RngStream s = root.fork(static_cast<std::uint64_t>(b));
    draws[b] = bootstrap_draw(nu, normalized, s);
  }
  res = evaluate_with_draws(stat, std::move(draws), alpha, side);
  res.floor_count = nu.floor_count;
  res.clamp_count = nu.clamp_count;
  return res;
}

double bootstrap_cdf_agreement(const std::vector<double>& boot_draws,
                               const std::vector<double>& ref_draws) {
  return ks_two_sample(boot_draws, ref_draws);
}

}  // namespace adaexp
