#include "adaexp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "adaexp/estimators.hpp"
#include "adaexp/parallel.hpp"

namespace adaexp {

namespace {
constexpr std::uint64_t kBootTag = 0xb001;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ConstantU: return "constant_u";
    case Method::ConstantN: return "constant_n";
    case Method::AdaptiveU: return "adaptive_u";
    case Method::AdaptiveN: return "adaptive_n";
    case Method::M1U: return "m1_u";
    case Method::M1N: return "m1_n";
    case Method::SampleSplit: return "sample_split";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::ConstantU, Method::ConstantN, Method::AdaptiveU,
                   Method::AdaptiveN, Method::M1U, Method::M1N, Method::SampleSplit}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

bool method_is_bootstrap(Method m) { return m != Method::SampleSplit; }

Weighting method_weighting(Method m) {
  switch (m) {
    case Method::ConstantU:
    case Method::ConstantN:
      return Weighting::Constant;
    case Method::AdaptiveU:
    case Method::AdaptiveN:
      return Weighting::Adaptive;
    default:
      return Weighting::M1;
  }
}

bool method_normalized(Method m) {
  return m == Method::ConstantN || m == Method::AdaptiveN || m == Method::M1N;
}

std::string method_weighting_name(Method m) {
  if (!method_is_bootstrap(m)) return "-";
  switch (method_weighting(m)) {
    case Weighting::Constant: return "constant";
    case Weighting::Adaptive: return "adaptive";
    case Weighting::M1: return "m1";
  }
  return "?";
}

std::string method_scaling_name(Method m) {
  if (!method_is_bootstrap(m)) return "-";
  return method_normalized(m) ? "N" : "U";
}

std::string family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Bernoulli: return "bernoulli";
    case ModelFamily::Gaussian: return "gaussian";
    case ModelFamily::Poisson: return "poisson";
    case ModelFamily::Student: return "student";
  }
  return "?";
}

std::optional<ModelFamily> parse_family(const std::string& name) {
  for (ModelFamily f : {ModelFamily::Bernoulli, ModelFamily::Gaussian,
                        ModelFamily::Poisson, ModelFamily::Student}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

OutcomeModel model_from_theta(ModelFamily f, double theta) {
  switch (f) {
    case ModelFamily::Bernoulli: return OutcomeModel::bernoulli(0.5 + theta, 0.5);
    case ModelFamily::Gaussian: return OutcomeModel::gaussian(theta, 1.0, 0.0, 0.25);
    case ModelFamily::Poisson: return OutcomeModel::poisson(1.0 + theta, 1.0);
    case ModelFamily::Student: return OutcomeModel::student_shift(theta, 5.0, 10.0);
  }
  throw std::invalid_argument("unknown model family");
}

std::string side_name(Side s) { return s == Side::Right ? "right" : "left"; }

std::optional<Side> parse_side(const std::string& name) {
  if (name == "right") return Side::Right;
  if (name == "left") return Side::Left;
  return std::nullopt;
}

SelectionRule StudyConfig::make_rule(double epsilon) const {
  const double l = epsilon / 2.0;
  switch (selection) {
    case SelectionKind::Thompson: return SelectionRule::thompson(l);
    case SelectionKind::EpsGreedy: return SelectionRule::eps_greedy(l);
    case SelectionKind::EnrichEffect: return SelectionRule::enrich_effect(beta, l);
    case SelectionKind::EnrichPValue:
      return sigma_hat > 0.0 ? SelectionRule::enrich_pvalue(alpha_sel, sigma_hat, l)
                             : SelectionRule::enrich_pvalue_estimated(alpha_sel, l);
  }
  throw std::invalid_argument("unknown selection kind");
}

void StudyConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (thetas.empty() || epsilons.empty())
    throw std::invalid_argument("theta and epsilon grids must be nonempty");
  if (methods.empty()) throw std::invalid_argument("at least one method required");
  if (sides.empty()) throw std::invalid_argument("at least one side required");
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must lie in (0,1)");
  bool any_boot = false;
  for (Method m : methods) any_boot = any_boot || method_is_bootstrap(m);
  if (any_boot && b_draws < 100)
    throw std::invalid_argument("bootstrap size B must be at least 100");
  for (double th : thetas) model_from_theta(family, th).validate();
  for (double eps : epsilons) {
    for (Method m : methods) {
      if (!method_is_bootstrap(m)) continue;
      DesignConfig d;
      d.n1 = n1;
      d.n2 = n2;
      d.e0 = e0;
      d.rule = make_rule(eps);
      d.weighting = method_weighting(m);
      d.validate();
    }
  }
}

std::vector<TrialTestOutcome> test_trial_all(const TrialData& trial,
                                             const SelectionRule& resolved,
                                             const std::vector<Method>& methods,
                                             const std::vector<Side>& sides, double alpha,
                                             long b_draws, const RngStream& rep_root) {
  const long n_methods = static_cast<long>(methods.size());
  const long n_sides = static_cast<long>(sides.size());
  std::vector<TrialTestOutcome> out(n_methods * n_sides);
  for (auto& o : out) o.p = std::numeric_limits<double>::quiet_NaN();

  std::vector<Weighting> boot_weightings;
  for (Method m : methods) {
    if (!method_is_bootstrap(m)) continue;
    const Weighting w = method_weighting(m);
    bool seen = false;
    for (Weighting x : boot_weightings) seen = seen || x == w;
    if (!seen) boot_weightings.push_back(w);
  }

  for (Weighting w : boot_weightings) {
    const EstimateReport rep_report = compute_report(trial, w);
    const double stat_u = std::sqrt(static_cast<double>(trial.total())) * rep_report.t_stat;
    NuisanceEstimates nu = estimate_nuisance(trial, resolved, w);
    const RngStream boot_root = rep_root.fork(kBootTag).fork(static_cast<std::uint64_t>(w));
    std::vector<double> draws_u(b_draws), draws_n(b_draws);
    for (long b = 0; b < b_draws; ++b) {
      RngStream s = boot_root.fork(static_cast<std::uint64_t>(b));
      bootstrap_draw_pair(nu, s, &draws_u[b], &draws_n[b]);
    }
    for (long mi = 0; mi < n_methods; ++mi) {
      const Method m = methods[mi];
      if (!method_is_bootstrap(m) || method_weighting(m) != w) continue;
      const bool norm = method_normalized(m);
      for (long si = 0; si < n_sides; ++si) {
        TrialTestOutcome& o = out[mi * n_sides + si];
        if (norm && !rep_report.w_stat_valid) {
          o.status = 2;
          continue;
        }
        const BootstrapResult br = evaluate_with_draws(
            norm ? rep_report.w_stat : stat_u, norm ? draws_n : draws_u, alpha, sides[si]);
        o.status = br.reject ? 1 : 0;
        o.p = br.p_value;
      }
    }
  }

  for (long mi = 0; mi < n_methods; ++mi) {
    if (methods[mi] != Method::SampleSplit) continue;
    for (long si = 0; si < n_sides; ++si) {
      const SplitTestResult sr = sample_split_test(trial, alpha, sides[si]);
      TrialTestOutcome& o = out[mi * n_sides + si];
      if (sr.abstain) {
        o.status = 2;
      } else {
        o.status = sr.reject ? 1 : 0;
        o.p = sr.p_value;
      }
    }
  }
  return out;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyResult result;
  const long n_methods = static_cast<long>(cfg.methods.size());
  const long n_sides = static_cast<long>(cfg.sides.size());

  std::uint64_t cell_id = 0;
  for (double eps : cfg.epsilons) {
    for (double theta : cfg.thetas) {
      const OutcomeModel model = model_from_theta(cfg.family, theta);
      DesignConfig dcfg;
      dcfg.n1 = cfg.n1;
      dcfg.n2 = cfg.n2;
      dcfg.e0 = cfg.e0;
      dcfg.rule = cfg.make_rule(eps);

      std::vector<TrialTestOutcome> slots(cfg.reps * n_methods * n_sides);
      parallel_for(cfg.reps, cfg.threads, [&](long rep) {
        const RngStream rep_root =
            RngStream::keyed({cfg.master_seed, cell_id, static_cast<std::uint64_t>(rep)});
        const TrialData trial = run_trial(dcfg, model, rep_root);
        SelectionRule resolved = dcfg.rule;
        if (resolved.sigma_from_pilot) {
          resolved.sigma_hat = trial.sigma_hat;
          resolved.sigma_from_pilot = false;
        }
        const std::vector<TrialTestOutcome> outcomes = test_trial_all(
            trial, resolved, cfg.methods, cfg.sides, cfg.alpha, cfg.b_draws, rep_root);
        std::copy(outcomes.begin(), outcomes.end(),
                  slots.begin() + rep * n_methods * n_sides);
      });

      for (long mi = 0; mi < n_methods; ++mi) {
        const Method m = cfg.methods[mi];
        for (long si = 0; si < n_sides; ++si) {
          long rejections = 0, abstentions = 0;
          for (long rep = 0; rep < cfg.reps; ++rep) {
            const TrialTestOutcome& out = slots[(rep * n_methods + mi) * n_sides + si];
            if (out.status == 1) ++rejections;
            if (out.status == 2) ++abstentions;
            if (cfg.emit_pvalues)
              result.pvalues.push_back({method_name(m), side_name(cfg.sides[si]), eps,
                                        theta, rep, out.p});
          }
          const double rate = static_cast<double>(rejections) / static_cast<double>(cfg.reps);
          result.rows.push_back(
              {method_name(m), method_weighting_name(m), method_scaling_name(m), eps, theta,
               side_name(cfg.sides[si]), cfg.reps, rejections, abstentions, rate,
               std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.reps))});
        }
      }
      ++cell_id;
    }
  }
  return result;
}

std::vector<QqRow> qq_rows(const StudyResult& result) {
  std::vector<QqRow> out;
  std::vector<std::pair<std::string, std::string>> groups;
  for (const PValueRow& r : result.pvalues) {
    bool seen = false;
    for (const auto& g : groups) seen = seen || (g.first == r.method && g.second == r.side);
    if (!seen) groups.emplace_back(r.method, r.side);
  }
  for (const auto& g : groups) {
    std::vector<double> ps;
    for (const PValueRow& r : result.pvalues)
      if (r.method == g.first && r.side == g.second && std::isfinite(r.p)) ps.push_back(r.p);
    std::sort(ps.begin(), ps.end());
    const double denom = static_cast<double>(ps.size()) + 1.0;
    for (std::size_t k = 0; k < ps.size(); ++k)
      out.push_back({g.first, g.second, static_cast<long>(k + 1), ps[k],
                     static_cast<double>(k + 1) / denom});
  }
  return out;
}

std::vector<double> sampling_histogram(const DesignConfig& cfg, const OutcomeModel& model,
                                       long reps, int threads) {
  const double c_n = model.signal(cfg.total());
  std::vector<double> draws(reps);
  parallel_for(reps, threads, [&](long rep) {
    const RngStream root = RngStream::keyed({cfg.seed, static_cast<std::uint64_t>(rep)});
    const TrialData trial = run_trial(cfg, model, root);
    const EstimateReport r = compute_report(trial, cfg.weighting);
    draws[rep] = std::sqrt(static_cast<double>(trial.total())) * r.t_stat - c_n;
  });
  return draws;
}

}  // namespace adaexp
