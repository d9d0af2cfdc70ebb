#include "adaexp/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adaexp/normal.hpp"

namespace adaexp {

namespace {

constexpr double kPropensityEps = 1e-12;

StageIpw ipw_stage_impl(const TrialData& data, int t, int s, bool squared) {
  StageIpw out;
  const StageData& st = data.stage[t];
  const long n = st.size();
  out.per_unit.assign(n, 0.0);
  if (n == 0) return out;
  const double e = data.propensity(t, s);
  double sum = 0.0;
  bool any = false;
  for (long u = 0; u < n; ++u) {
    if (st.arms[u] != s) continue;
    any = true;
    if (e < kPropensityEps) continue;
    double y = st.outcomes[u];
    if (squared) y *= y;
    out.per_unit[u] = y / e;
    sum += out.per_unit[u];
  }
  if (e < kPropensityEps) {
    out.inconsistent = any;  // assignments observed under zero propensity
    return out;
  }
  out.mean = sum / static_cast<double>(n);
  return out;
}

}  // namespace

StageIpw ipw_stage(const TrialData& data, int t, int s) {
  return ipw_stage_impl(data, t, s, false);
}
StageIpw ipw_stage_squared(const TrialData& data, int t, int s) {
  return ipw_stage_impl(data, t, s, true);
}

std::pair<double, double> stage_weights(const TrialData& data, Weighting w, int s) {
  const double m = weight_exponent(w);
  double raw[2];
  for (int t = 0; t < 2; ++t) {
    const double e = data.propensity(t, s);
    const double n_t = static_cast<double>(data.n(t));
    // the common 1/sqrt(N) factor in h cancels in the normalized weights
    raw[t] = (n_t > 0) ? n_t * std::pow(e, m) : 0.0;
    if (e < kPropensityEps && m == 0.0 && n_t > 0) raw[t] = n_t;  // e^0 = 1
    if (e < kPropensityEps && m > 0.0) raw[t] = 0.0;
  }
  const double total = raw[0] + raw[1];
  if (total <= 0.0)
    throw std::runtime_error("degenerate WIPW weights: no data for arm");
  return {raw[0] / total, raw[1] / total};
}

namespace {

double weighted_combine(const TrialData& data, Weighting w, int s, bool squared) {
  auto [w1, w2] = stage_weights(data, w, s);
  const StageIpw a = ipw_stage_impl(data, 0, s, squared);
  const StageIpw b = ipw_stage_impl(data, 1, s, squared);
  if (a.inconsistent || b.inconsistent)
    throw std::runtime_error("inconsistent stage: assignments with zero propensity");
  return w1 * a.mean + w2 * b.mean;
}

}  // namespace

double wipw(const TrialData& data, Weighting w, int s) {
  return weighted_combine(data, w, s, false);
}
double wipws(const TrialData& data, Weighting w, int s) {
  return weighted_combine(data, w, s, true);
}

double variance_hat(const TrialData& data, Weighting w, int s) {
  auto [w1, w2] = stage_weights(data, w, s);
  const double point = wipw(data, w, s);
  const double wt[2] = {w1, w2};
  double total = 0.0;
  for (int t = 0; t < 2; ++t) {
    const long n = data.n(t);
    if (n == 0 || wt[t] == 0.0) continue;
    const StageIpw ipw = ipw_stage(data, t, s);
    double ss = 0.0;
    for (long u = 0; u < n; ++u) {
      const double d = ipw.per_unit[u] - point;
      ss += d * d;
    }
    total += wt[t] * wt[t] * ss / (static_cast<double>(n) * static_cast<double>(n));
  }
  return total;
}

double waipw(const TrialData& data, Weighting w, int s, double mu_hat) {
  auto [w1, w2] = stage_weights(data, w, s);
  const double wt[2] = {w1, w2};
  double result = 0.0;
  for (int t = 0; t < 2; ++t) {
    const long n = data.n(t);
    if (n == 0 || wt[t] == 0.0) continue;
    const double e = data.propensity(t, s);
    double sum = 0.0;
    for (long u = 0; u < n; ++u)
      if (data.stage[t].arms[u] == s) sum += data.stage[t].outcomes[u] - mu_hat;
    result += wt[t] * (sum / (static_cast<double>(n) * e) + mu_hat);
  }
  return result;
}

double sample_mean(const TrialData& data, int s) {
  double sum = 0.0;
  long count = 0;
  for (int t = 0; t < 2; ++t) {
    for (long u = 0; u < data.n(t); ++u) {
      if (data.stage[t].arms[u] == s) {
        sum += data.stage[t].outcomes[u];
        ++count;
      }
    }
  }
  if (count == 0) return 1.0;  // 0/0 = 1 convention
  return sum / static_cast<double>(count);
}

EstimateReport compute_report(const TrialData& data, Weighting w) {
  EstimateReport r{};
  for (int s = 0; s < 2; ++s) {
    auto [w1, w2] = stage_weights(data, w, s);
    r.weights[0][s] = w1;
    r.weights[1][s] = w2;
    for (int t = 0; t < 2; ++t) r.lambda_hat[t][s] = ipw_stage(data, t, s).mean;
    r.wipw_val[s] = wipw(data, w, s);
    r.wipws_val[s] = wipws(data, w, s);
    r.v_hat[s] = variance_hat(data, w, s);
  }
  r.t_stat = r.wipw_val[0] - r.wipw_val[1];
  const double n = static_cast<double>(data.total());
  r.s_hat = std::sqrt(n * (r.v_hat[0] + r.v_hat[1]));
  if (r.s_hat > 0.0) {
    // normalized statistic sqrt(N) T_N / S_hat = T_N / sqrt(V_hat(0)+V_hat(1)):
    // the O(1) scaling whose weak limit uses the unit-normalized weights
    r.w_stat = std::sqrt(n) * r.t_stat / r.s_hat;
    r.w_stat_valid = true;
  } else {
    r.w_stat = std::numeric_limits<double>::quiet_NaN();
    r.w_stat_valid = false;
  }
  return r;
}

SplitTestResult sample_split_test(const TrialData& data, double alpha, Side side) {
  SplitTestResult res;
  const StageData& st = data.stage[1];
  const long n = st.size();
  const double p0 = st.p_arm0;
  if (n == 0 || p0 <= 0.0 || p0 >= 1.0) {
    res.abstain = true;
    return res;
  }
  // per-unit IPW difference; its empirical dispersion is the plug-in SE
  double mean = 0.0;
  std::vector<double> d(n);
  for (long u = 0; u < n; ++u) {
    d[u] = (st.arms[u] == 0) ? st.outcomes[u] / p0 : -st.outcomes[u] / (1.0 - p0);
    mean += d[u];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (long u = 0; u < n; ++u) ss += (d[u] - mean) * (d[u] - mean);
  const double se = std::sqrt(ss) / static_cast<double>(n);
  if (se <= 0.0) {
    res.abstain = true;
    return res;
  }
  res.z = mean / se;
  const double zq = normal_quantile(1.0 - alpha);
  if (side == Side::Right) {
    res.p_value = 1.0 - normal_cdf(res.z);
    res.reject = res.z > zq;
  } else {
    res.p_value = normal_cdf(res.z);
    res.reject = -res.z > zq;
  }
  return res;
}

}  // namespace adaexp
