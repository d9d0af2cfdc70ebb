#include "adaexp/semisynthetic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adaexp/parallel.hpp"

namespace adaexp {

long TrialCsv::group_count(int g) const {
  long n = 0;
  for (int x : group)
    if (x == g) ++n;
  return n;
}

long TrialCsv::control_zero_count() const {
  long n = 0;
  for (long i = 0; i < size(); ++i)
    if (group[i] == 0 && outcome[i] == 0.0) ++n;
  return n;
}

void TrialCsv::validate() const {
  if (group.size() != unit_id.size() || outcome.size() != unit_id.size())
    throw std::invalid_argument("trial CSV columns have mismatched lengths");
  for (long i = 0; i < size(); ++i) {
    if (group[i] != 0 && group[i] != 1)
      throw std::invalid_argument("group must be 0 (control) or 1 (treatment)");
    if (outcome[i] != 0.0 && outcome[i] != 1.0)
      throw std::invalid_argument("outcomes must be binary");
  }
  if (group_count(0) == 0 || group_count(1) == 0)
    throw std::invalid_argument("both groups must be nonempty");
}

TrialCsv parse_trial_csv(std::istream& in) {
  TrialCsv data;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("unit_id", 0) == 0) continue;  // header row
    }
    std::istringstream row(line);
    std::string cell;
    long id;
    int g;
    double y;
    try {
      std::getline(row, cell, ',');
      id = std::stol(cell);
      std::getline(row, cell, ',');
      g = std::stoi(cell);
      std::getline(row, cell, ',');
      y = std::stod(cell);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed trial CSV row: " + line);
    }
    data.unit_id.push_back(id);
    data.group.push_back(g);
    data.outcome.push_back(y);
  }
  data.validate();
  return data;
}

TrialCsv load_trial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trial CSV: " + path);
  return parse_trial_csv(in);
}

void write_trial_csv(std::ostream& out, const TrialCsv& data) {
  out << "unit_id,group,outcome\n";
  for (long i = 0; i < data.size(); ++i)
    out << data.unit_id[i] << ',' << data.group[i] << ',' << data.outcome[i] << '\n';
}

namespace {

long bounded_index(RngStream& rng, long n) {
  long i = static_cast<long>(rng.uniform() * static_cast<double>(n));
  return i >= n ? n - 1 : i;
}

}  // namespace

TrialCsv permute_outcomes(const TrialCsv& data, RngStream& rng) {
  TrialCsv out = data;
  const long n = out.size();
  for (long i = n - 1; i > 0; --i) {
    const long j = bounded_index(rng, i + 1);
    std::swap(out.outcome[i], out.outcome[j]);
  }
  return out;
}

TrialCsv inject_signal(const TrialCsv& data, double eta, RngStream& rng) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  TrialCsv out = data;
  for (long i = 0; i < out.size(); ++i) {
    if (out.group[i] == 0 && out.outcome[i] == 0.0 && rng.bernoulli(eta))
      out.outcome[i] = 1.0;
  }
  return out;
}

TrialData adaptive_resample(const TrialCsv& data, double epsilon, long n1, long n2,
                            const RngStream& root, bool with_replacement) {
  data.validate();
  std::vector<double> pool[2];
  for (long i = 0; i < data.size(); ++i) pool[data.group[i]].push_back(data.outcome[i]);

  auto draw_outcome = [&](int arm, RngStream& rng) {
    std::vector<double>& p = pool[arm];
    if (p.empty()) throw std::runtime_error("outcome pool exhausted for one arm");
    const long idx = bounded_index(rng, static_cast<long>(p.size()));
    const double y = p[idx];
    if (!with_replacement) {
      p[idx] = p.back();
      p.pop_back();
    }
    return y;
  };

  auto draw_stage = [&](long n, double p_arm0, std::uint64_t tag) {
    StageData st;
    st.p_arm0 = p_arm0;
    st.arms.resize(n);
    st.outcomes.resize(n);
    RngStream stage_root = root.fork(tag);
    for (long u = 0; u < n; ++u) {
      RngStream unit = stage_root.fork(static_cast<std::uint64_t>(u));
      const int arm = unit.bernoulli(p_arm0) ? 0 : 1;
      st.arms[u] = static_cast<std::uint8_t>(arm);
      st.outcomes[u] = draw_outcome(arm, unit);
    }
    return st;
  };

  TrialData trial;
  trial.e0 = 0.5;
  trial.stage[0] = draw_stage(n1, 0.5, 1);
  trial.interim0 = interim_statistic(trial.stage[0].arms, trial.stage[0].outcomes, 0, 0.5);
  trial.interim1 = interim_statistic(trial.stage[0].arms, trial.stage[0].outcomes, 1, 0.5);
  const SelectionRule rule = SelectionRule::eps_greedy(epsilon / 2.0);
  const double p2 = rule.clipped(0, trial.interim0 - trial.interim1);
  trial.stage[1] = draw_stage(n2, p2, 2);
  return trial;
}

void SemiConfig::validate() const {
  if (permutations < 1) throw std::invalid_argument("permutations must be at least 1");
  if (etas.empty() || epsilons.empty())
    throw std::invalid_argument("eta and epsilon grids must be nonempty");
  if (methods.empty()) throw std::invalid_argument("at least one method required");
  if (sides.empty()) throw std::invalid_argument("at least one side required");
  if (n1 < 1 || n2 < 0) throw std::invalid_argument("invalid stage sizes");
  for (double eta : etas)
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  for (double eps : epsilons)
    if (eps <= 0.0 || eps >= 1.0)
      throw std::invalid_argument("epsilon must lie in (0, 1)");
  bool any_boot = false;
  for (Method m : methods) any_boot = any_boot || method_is_bootstrap(m);
  if (any_boot && b_draws < 100)
    throw std::invalid_argument("bootstrap size B must be at least 100");
}

StudyResult run_semisynthetic(const SemiConfig& cfg, const TrialCsv& data) {
  cfg.validate();
  data.validate();
  StudyResult result;
  const long n_methods = static_cast<long>(cfg.methods.size());
  const long n_sides = static_cast<long>(cfg.sides.size());

  std::uint64_t cell_id = 0;
  for (double eps : cfg.epsilons) {
    for (double eta : cfg.etas) {
      const SelectionRule rule = SelectionRule::eps_greedy(eps / 2.0);
      std::vector<TrialTestOutcome> slots(cfg.permutations * n_methods * n_sides);
      parallel_for(cfg.permutations, cfg.threads, [&](long perm) {
        const RngStream perm_root =
            RngStream::keyed({cfg.master_seed, cell_id, static_cast<std::uint64_t>(perm)});
        RngStream perm_stream = perm_root.fork(10);
        RngStream inject_stream = perm_root.fork(11);
        const TrialCsv permuted = permute_outcomes(data, perm_stream);
        const TrialCsv injected = inject_signal(permuted, eta, inject_stream);
        const TrialData trial = adaptive_resample(injected, eps, cfg.n1, cfg.n2,
                                                  perm_root.fork(12), cfg.with_replacement);
        const std::vector<TrialTestOutcome> outcomes = test_trial_all(
            trial, rule, cfg.methods, cfg.sides, cfg.alpha, cfg.b_draws, perm_root);
        std::copy(outcomes.begin(), outcomes.end(),
                  slots.begin() + perm * n_methods * n_sides);
      });

      for (long mi = 0; mi < n_methods; ++mi) {
        const Method m = cfg.methods[mi];
        for (long si = 0; si < n_sides; ++si) {
          long rejections = 0, abstentions = 0;
          for (long perm = 0; perm < cfg.permutations; ++perm) {
            const TrialTestOutcome& out = slots[(perm * n_methods + mi) * n_sides + si];
            if (out.status == 1) ++rejections;
            if (out.status == 2) ++abstentions;
            if (cfg.emit_pvalues)
              result.pvalues.push_back({method_name(m), side_name(cfg.sides[si]), eps, eta,
                                        perm, out.p});
          }
          const double rate =
              static_cast<double>(rejections) / static_cast<double>(cfg.permutations);
          result.rows.push_back(
              {method_name(m), method_weighting_name(m), method_scaling_name(m), eps, eta,
               side_name(cfg.sides[si]), cfg.permutations, rejections, abstentions, rate,
               std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.permutations))});
        }
      }
      ++cell_id;
    }
  }
  return result;
}

TrialCsv generate_semisynthetic_data(long n_units, double event_rate, double treat_fraction,
                                     const RngStream& root) {
  if (n_units < 2) throw std::invalid_argument("need at least 2 units");
  if (event_rate <= 0.0 || event_rate >= 1.0)
    throw std::invalid_argument("event rate must lie in (0, 1)");
  if (treat_fraction <= 0.0 || treat_fraction >= 1.0)
    throw std::invalid_argument("treatment fraction must lie in (0, 1)");
  TrialCsv data;
  for (long u = 0; u < n_units; ++u) {
    RngStream unit = root.fork(static_cast<std::uint64_t>(u));
    data.unit_id.push_back(u + 1);
    data.group.push_back(unit.bernoulli(treat_fraction) ? 1 : 0);
    data.outcome.push_back(unit.bernoulli(event_rate) ? 1.0 : 0.0);
  }
  data.validate();
  return data;
}

}  // namespace adaexp
