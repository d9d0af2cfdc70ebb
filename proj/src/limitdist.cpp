#include "adaexp/limitdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adaexp {

void LimitParams::validate() const {
  if (e0 <= 0.0 || e0 >= 1.0)
    throw std::invalid_argument("pilot probability e0 must lie in (0,1)");
  if (q1 <= 0.0 || q2 <= 0.0 || std::abs(q1 + q2 - 1.0) > 1e-9)
    throw std::invalid_argument("stage fractions q1, q2 must be positive and sum to 1");
  if (c > 0.0) throw std::invalid_argument("limiting signal c must lie in [-inf, 0]");
  for (int s = 0; s < 2; ++s) {
    if (v1(s) <= 0.0)
      throw std::invalid_argument("limiting stage-1 variance must be positive");
  }
  rule.validate();
  if (weighting == Weighting::Constant && rule.clip <= 0.0)
    throw std::invalid_argument(
        "constant weighting requires a positive limiting clip l_bar");
}

double selection_score(double a10, double a11, double v10, double v11,
                       double c, double e0) {
  if (std::isinf(c) && c < 0) return c;
  return a10 * std::sqrt(v10) / std::sqrt(e0) -
         a11 * std::sqrt(v11) / std::sqrt(1.0 - e0) + c / std::numbers::sqrt2;
}

double clamp_rho(double rho, long* clamp_count) {
  constexpr double bound = 1.0 - 1e-9;
  if (rho > bound || rho < -bound) {
    if (clamp_count) ++*clamp_count;
    return rho > 0 ? bound : -bound;
  }
  return rho;
}

MatSqrt2 mat_sqrt2(double rho) {
  if (!(std::abs(rho) < 1.0))
    throw std::runtime_error("correlation outside (-1, 1): covariance not PSD");
  const double sp = std::sqrt(1.0 + rho);
  const double sm = std::sqrt(1.0 - rho);
  return {(sp + sm) / 2.0, (sp - sm) / 2.0};
}

namespace {

double pair_rho(double h0, double h1, double v0, double v1, double mu0, double mu1) {
  if (h0 <= 0.0 || h1 <= 0.0) return 0.0;
  return clamp_rho(-std::sqrt(h0 * h1 / (v0 * v1)) * mu0 * mu1);
}

}  // namespace

double limit_rho1(const LimitParams& p) {
  return pair_rho(p.h1(0), p.h1(1), p.v1(0), p.v1(1), p.mu[0], p.mu[1]);
}

Stage2Params limit_params_stage2(const LimitParams& p, double a10, double a11) {
  const double s = selection_score(a10, a11, p.v1(0), p.v1(1), p.c, p.e0);
  Stage2Params out;
  for (int arm = 0; arm < 2; ++arm) {
    out.h2[arm] = p.rule.clipped(arm, s);
    out.v2[arm] = p.m2[arm] - out.h2[arm] * p.mu[arm] * p.mu[arm];
    if (out.v2[arm] <= 0.0)
      throw std::runtime_error("limiting stage-2 variance is not positive");
  }
  out.rho2 = pair_rho(out.h2[0], out.h2[1], out.v2[0], out.v2[1], p.mu[0], p.mu[1]);
  return out;
}

LimitWeights scheme_weights(Weighting weighting, bool normalized, double q1, double q2,
                            const double h1[2], const double h2[2],
                            const double v1[2], const double v2[2]) {
  LimitWeights lw{};
  const double q[2] = {q1, q2};
  for (int s = 0; s < 2; ++s) {
    const double h[2] = {h1[s], h2[s]};
    const double v[2] = {v1[s], v2[s]};
    switch (weighting) {
      case Weighting::Constant:
        for (int t = 0; t < 2; ++t) {
          if (h[t] <= 0.0)
            throw std::runtime_error(
                "zero limiting propensity under constant weighting (positivity violated)");
          lw.w[t][s] = std::sqrt(q[t] * v[t] / h[t]);
        }
        break;
      case Weighting::Adaptive: {
        const double denom = q[0] * std::sqrt(h[0]) + q[1] * std::sqrt(h[1]);
        for (int t = 0; t < 2; ++t) lw.w[t][s] = std::sqrt(q[t] * v[t]) / denom;
        break;
      }
      case Weighting::M1: {
        const double denom = q[0] * h[0] + q[1] * h[1];
        for (int t = 0; t < 2; ++t) lw.w[t][s] = std::sqrt(q[t] * h[t] * v[t]) / denom;
        break;
      }
    }
  }
  if (normalized) {
    double ss = 0.0;
    for (int t = 0; t < 2; ++t)
      for (int s = 0; s < 2; ++s) ss += lw.w[t][s] * lw.w[t][s];
    const double norm = std::sqrt(ss);
    for (int t = 0; t < 2; ++t)
      for (int s = 0; s < 2; ++s) lw.w[t][s] /= norm;
  }
  return lw;
}

LimitWeights limit_weights(const LimitParams& p, const double h2[2], const double v2[2]) {
  const double h1[2] = {p.h1(0), p.h1(1)};
  const double v1[2] = {p.v1(0), p.v1(1)};
  return scheme_weights(p.weighting, p.normalized, p.q1, p.q2, h1, h2, v1, v2);
}

LimitDraw sample_limit_one(const LimitParams& p, RngStream& rng) {
  LimitDraw d{};
  const MatSqrt2 m1 = mat_sqrt2(limit_rho1(p));
  const double z10 = rng.normal();
  const double z11 = rng.normal();
  d.a1[0] = m1.a * z10 + m1.b * z11;
  d.a1[1] = m1.b * z10 + m1.a * z11;
  const Stage2Params s2 = limit_params_stage2(p, d.a1[0], d.a1[1]);
  const MatSqrt2 m2 = mat_sqrt2(s2.rho2);
  const double z20 = rng.normal();
  const double z21 = rng.normal();
  d.a2[0] = m2.a * z20 + m2.b * z21;
  d.a2[1] = m2.b * z20 + m2.a * z21;
  const LimitWeights lw = limit_weights(p, s2.h2, s2.v2);
  d.w_value = lw.w[0][0] * d.a1[0] + lw.w[1][0] * d.a2[0] -
              lw.w[0][1] * d.a1[1] - lw.w[1][1] * d.a2[1];
  return d;
}

std::vector<double> sample_limit(const LimitParams& p, long n_draws, const RngStream& root) {
  p.validate();
  std::vector<double> out(n_draws);
  for (long i = 0; i < n_draws; ++i) {
    RngStream s = root.fork(static_cast<std::uint64_t>(i));
    out[i] = sample_limit_one(p, s).w_value;
  }
  return out;
}

std::vector<double> sample_limit_arm(const LimitParams& p, int s, long n_draws,
                                     const RngStream& root) {
  LimitParams q = p;
  q.normalized = false;
  q.validate();
  std::vector<double> out(n_draws);
  for (long i = 0; i < n_draws; ++i) {
    RngStream st = root.fork(static_cast<std::uint64_t>(i));
    const LimitDraw d = sample_limit_one(q, st);
    const Stage2Params s2 = limit_params_stage2(q, d.a1[0], d.a1[1]);
    const LimitWeights lw = limit_weights(q, s2.h2, s2.v2);
    out[i] = lw.w[0][s] * d.a1[s] + lw.w[1][s] * d.a2[s];
  }
  return out;
}

double wasserstein1(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("wasserstein1 requires equal-length samples");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += std::abs(xs[i] - ys[i]);
  return xs.empty() ? 0.0 : total / static_cast<double>(xs.size());
}

}  // namespace adaexp
