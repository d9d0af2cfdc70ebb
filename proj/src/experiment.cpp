#include "adaexp/experiment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adaexp {

std::vector<std::string> DesignConfig::validate() const {
  std::vector<std::string> warnings;
  if (n1 < 1) throw std::invalid_argument("n1 must be at least 1");
  if (n2 < 0) throw std::invalid_argument("n2 must be nonnegative");
  if (e0 <= 0.0 || e0 >= 1.0)
    throw std::invalid_argument("pilot probability e0 must lie in (0,1)");
  rule.validate();
  switch (weighting) {
    case Weighting::Constant:
      if (rule.clip <= 0.0)
        throw std::invalid_argument(
            "m=0 requires clip > 0: constant weighting needs the positivity assumption");
      break;
    case Weighting::Adaptive:
      if (rule.clip <= 0.0)
        throw std::invalid_argument("m=1/2 requires clip in (0, 1/2)");
      if (static_cast<double>(total()) * rule.clip < 10.0)
        warnings.push_back("N*l_N < 10: adaptive-weighting asymptotics may be unreliable");
      break;
    case Weighting::M1:
      break;  // l_N = 0 permitted (early dropping)
  }
  if (e0 < 0.05 || e0 > 0.95)
    warnings.push_back("pilot probability is extreme; exploration of both arms may be poor");
  return warnings;
}

double interim_statistic(const std::vector<std::uint8_t>& arms,
                         const std::vector<double>& outcomes, int arm, double e_arm) {
  double sum = 0.0;
  for (std::size_t u = 0; u < arms.size(); ++u)
    if (arms[u] == arm) sum += outcomes[u];
  if (sum == 0.0) return 0.0;  // covers the zero-assignment convention
  return sum / (e_arm * std::sqrt(static_cast<double>(arms.size())));
}

double pilot_sigma_estimate(const StageData& pilot, double e0) {
  const double e[2] = {e0, 1.0 - e0};
  double var_sum = 0.0;
  const double n = static_cast<double>(pilot.size());
  for (int s = 0; s < 2; ++s) {
    double m1 = 0.0, m2 = 0.0;
    for (long u = 0; u < pilot.size(); ++u) {
      if (pilot.arms[u] == s) {
        m1 += pilot.outcomes[u] / e[s];
        m2 += pilot.outcomes[u] * pilot.outcomes[u] / e[s];
      }
    }
    m1 /= n;
    m2 /= n;
    var_sum += (m2 - e[s] * m1 * m1) / e[s];
  }
  return std::sqrt(std::max(var_sum, 1e-12));
}

namespace {

constexpr std::uint64_t kStagePilot = 1;
constexpr std::uint64_t kStageFollowup = 2;

StageData draw_stage(const OutcomeModel& model, long n, double p_arm0,
                     const RngStream& root, std::uint64_t stage_tag) {
  StageData out;
  out.p_arm0 = p_arm0;
  out.arms.resize(n);
  out.outcomes.resize(n);
  RngStream stage_root = root.fork(stage_tag);
  for (long u = 0; u < n; ++u) {
    RngStream unit = stage_root.fork(static_cast<std::uint64_t>(u));
    const int arm = unit.bernoulli(p_arm0) ? 0 : 1;
    out.arms[u] = static_cast<std::uint8_t>(arm);
    out.outcomes[u] = model.sample(arm, unit);
  }
  return out;
}

}  // namespace

StageData run_pilot(const DesignConfig& cfg, const OutcomeModel& model, const RngStream& root) {
  return draw_stage(model, cfg.n1, cfg.e0, root, kStagePilot);
}

StageData run_followup(const DesignConfig& cfg, const OutcomeModel& model, double p_arm0,
                       const RngStream& root) {
  return draw_stage(model, cfg.n2, p_arm0, root, kStageFollowup);
}

TrialData run_trial(const DesignConfig& cfg, const OutcomeModel& model, const RngStream& root) {
  TrialData trial;
  trial.e0 = cfg.e0;
  trial.stage[0] = run_pilot(cfg, model, root);
  trial.interim0 = interim_statistic(trial.stage[0].arms, trial.stage[0].outcomes, 0, cfg.e0);
  trial.interim1 =
      interim_statistic(trial.stage[0].arms, trial.stage[0].outcomes, 1, 1.0 - cfg.e0);

  SelectionRule rule = cfg.rule;
  if (rule.kind == SelectionKind::EnrichPValue && rule.sigma_from_pilot) {
    rule.sigma_hat = pilot_sigma_estimate(trial.stage[0], cfg.e0);
    rule.sigma_from_pilot = false;
  }
  trial.sigma_hat = rule.sigma_hat;

  const double p2 = rule.clipped(0, trial.interim0 - trial.interim1);
  trial.stage[1] = run_followup(cfg, model, p2, root);
  return trial;
}

}  // namespace adaexp
