#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adaexp/bootstrap.hpp"
#include "adaexp/config.hpp"
#include "adaexp/estimators.hpp"
#include "adaexp/limitdist.hpp"
#include "adaexp/montecarlo.hpp"
#include "adaexp/semisynthetic.hpp"

namespace {

using adaexp::ConfigError;
using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out.precision(12);
  return out;
}

std::ostream& resolve_out(std::ofstream& file, const std::string& path) {
  if (path.empty()) {
    std::cout.precision(12);
    return std::cout;
  }
  file = open_out(path);
  return file;
}

adaexp::RunConfig load_cfg(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required for this subcommand");
  return adaexp::load_run_config(path);
}

void write_study_csv(std::ostream& out, const adaexp::StudyResult& res) {
  out << "method,weighting,scaling,epsilon,theta,side,reps,rejections,abstentions,"
         "rejection_rate,mc_standard_error\n";
  for (const auto& r : res.rows)
    out << r.method << ',' << r.weighting << ',' << r.scaling << ',' << r.epsilon << ','
        << r.theta << ',' << r.side << ',' << r.reps << ',' << r.rejections << ','
        << r.abstentions << ',' << r.rejection_rate << ',' << r.mc_standard_error << '\n';
}

void write_pvalues_csv(const std::string& path, const adaexp::StudyResult& res) {
  std::ofstream out = open_out(path);
  out << "method,side,epsilon,theta,rep,p_value\n";
  for (const auto& r : res.pvalues)
    out << r.method << ',' << r.side << ',' << r.epsilon << ',' << r.theta << ',' << r.rep
        << ',' << r.p << '\n';
}

double parse_c_value(const std::string& text) {
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage adaptive experiment simulation and inference engine"};
  app.require_subcommand(1);

  std::string config_path, out_path, pvalues_path, data_path, trial_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->envname("ADAEXP_CONFIG");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--threads", threads, "Worker threads (overrides the config)");
  app.add_option("--out", out_path, "Output file (default stdout)");

  auto apply_overrides = [&](adaexp::RunConfig& rc) {
    seed_set = seed_opt->count() > 0;
    if (seed_set) {
      rc.seed = seed;
      if (rc.design) rc.design->seed = seed;
      if (rc.study) rc.study->master_seed = seed;
      if (rc.semi) rc.semi->master_seed = seed;
    }
    if (threads > 0) {
      rc.threads = threads;
      if (rc.study) rc.study->threads = threads;
      if (rc.semi) rc.semi->threads = threads;
    }
  };

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Generate one two-stage trial as CSV");
  simulate->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.outcome || !rc.design)
      throw ConfigError("simulate requires outcome, design, and selection sections");
    const adaexp::RngStream root = adaexp::RngStream::keyed({rc.seed, 0});
    const adaexp::TrialData trial = adaexp::run_trial(*rc.design, *rc.outcome, root);
    std::ofstream file;
    adaexp::write_trial_data(resolve_out(file, out_path), trial);
    const adaexp::EstimateReport rep = adaexp::compute_report(trial, rc.design->weighting);
    json summary = {{"e0", trial.e0},
                    {"p2_arm0", trial.p2_arm0()},
                    {"interim0", trial.interim0},
                    {"interim1", trial.interim1},
                    {"t_stat", rep.t_stat},
                    {"w_stat", rep.w_stat_valid ? json(rep.w_stat) : json()},
                    {"wipw0", rep.wipw_val[0]},
                    {"wipw1", rep.wipw_val[1]}};
    if (!out_path.empty()) std::cout << summary.dump(2) << "\n";
  });

  // ---- test ----
  auto* test = app.add_subcommand("test", "Bootstrap test of a trial CSV");
  std::string scaling = "N", side_text = "right";
  double alpha = 0.05;
  long b_draws = 5000;
  test->add_option("--trial", trial_path, "Trial CSV produced by simulate")->required();
  test->add_option("--scaling", scaling, "U (unnormalized) or N (normalized)");
  test->add_option("--side", side_text, "left or right");
  test->add_option("--alpha", alpha, "Test level");
  test->add_option("--b", b_draws, "Bootstrap draws");
  test->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.design) throw ConfigError("test requires design and selection sections");
    if (scaling != "U" && scaling != "N") throw ConfigError("--scaling must be U or N");
    const auto side = adaexp::parse_side(side_text);
    if (!side) throw ConfigError("--side must be left or right");
    const adaexp::TrialData trial = adaexp::load_trial_data(trial_path);
    adaexp::SelectionRule rule = rc.design->rule;
    if (rule.sigma_from_pilot) {
      rule.sigma_hat = trial.sigma_hat;
      rule.sigma_from_pilot = false;
    }
    const adaexp::RngStream root = adaexp::RngStream::keyed({rc.seed, 0xb001});
    const adaexp::BootstrapResult res =
        adaexp::run_test(trial, rule, rc.design->weighting, scaling == "N", alpha, *side,
                         b_draws, root);
    const adaexp::EstimateReport rep = adaexp::compute_report(trial, rc.design->weighting);
    json out = {{"t_stat", rep.t_stat},
                {"w_stat", rep.w_stat_valid ? json(rep.w_stat) : json()},
                {"quantile", res.abstain ? json() : json(res.quantile_used)},
                {"p_value", res.abstain ? json() : json(res.p_value)},
                {"decision", res.abstain ? json("abstain")
                                         : json(res.reject ? "reject" : "accept")},
                {"floor_count", res.floor_count},
                {"clamp_count", res.clamp_count}};
    std::ofstream file;
    resolve_out(file, out_path) << out.dump(2) << "\n";
  });

  // ---- study ----
  auto* study = app.add_subcommand("study", "Monte Carlo rejection-rate study");
  study->add_option("--pvalues-out", pvalues_path, "Per-replication p-value CSV");
  study->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.study) throw ConfigError("study requires a study section");
    if (!pvalues_path.empty()) rc.study->emit_pvalues = true;
    const adaexp::StudyResult res = adaexp::run_study(*rc.study);
    std::ofstream file;
    write_study_csv(resolve_out(file, out_path), res);
    if (!pvalues_path.empty()) write_pvalues_csv(pvalues_path, res);
  });

  // ---- qq ----
  auto* qq = app.add_subcommand("qq", "Sorted null p-values against the uniform grid");
  qq->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.study) throw ConfigError("qq requires a study section");
    rc.study->emit_pvalues = true;
    const adaexp::StudyResult res = adaexp::run_study(*rc.study);
    std::ofstream file;
    std::ostream& out = resolve_out(file, out_path);
    out << "method,side,k,p_sorted,uniform_quantile\n";
    for (const auto& r : adaexp::qq_rows(res))
      out << r.method << ',' << r.side << ',' << r.k << ',' << r.p_sorted << ','
          << r.uniform_quantile << '\n';
  });

  // ---- limit-sample ----
  auto* ls = app.add_subcommand("limit-sample", "Draws from the closed-form limit");
  std::string c_text = "0";
  long draws = 1000;
  double mu0 = 0.0, mu1 = 0.0, m20 = 1.0, m21 = 9.0, e0 = 0.5, l_bar = 0.0, q1 = 0.5;
  std::string rule_name = "eps_greedy", weighting_name_opt = "adaptive";
  bool normalized = false;
  ls->add_option("--c", c_text, "Limiting signal (number or -inf)");
  ls->add_option("--draws", draws, "Number of draws");
  ls->add_option("--mu0", mu0, "Limit of E[Y(0)]");
  ls->add_option("--mu1", mu1, "Limit of E[Y(1)]");
  ls->add_option("--m20", m20, "Limit of E[Y^2(0)]");
  ls->add_option("--m21", m21, "Limit of E[Y^2(1)]");
  ls->add_option("--e0", e0, "Pilot probability of arm 0");
  ls->add_option("--l", l_bar, "Limiting clip l_bar");
  ls->add_option("--q1", q1, "Stage-1 fraction");
  ls->add_option("--rule", rule_name, "thompson|eps_greedy|enrich_effect|enrich_pvalue");
  ls->add_option("--weighting", weighting_name_opt, "constant|adaptive|m1");
  ls->add_flag("--normalized", normalized, "Normalized scaling");
  ls->callback([&] {
    adaexp::LimitParams p;
    p.c = parse_c_value(c_text);
    p.mu[0] = mu0;
    p.mu[1] = mu1;
    p.m2[0] = m20;
    p.m2[1] = m21;
    p.e0 = e0;
    p.q1 = q1;
    p.q2 = 1.0 - q1;
    if (rule_name == "thompson")
      p.rule = adaexp::SelectionRule::thompson(l_bar);
    else if (rule_name == "eps_greedy")
      p.rule = adaexp::SelectionRule::eps_greedy(l_bar);
    else if (rule_name == "enrich_effect")
      p.rule = adaexp::SelectionRule::enrich_effect(0.0, l_bar);
    else if (rule_name == "enrich_pvalue")
      p.rule = adaexp::SelectionRule::enrich_pvalue(0.05, 1.0, l_bar);
    else
      throw ConfigError("unknown --rule: " + rule_name);
    const auto w = adaexp::parse_weighting(weighting_name_opt);
    if (!w) throw ConfigError("--weighting must be constant|adaptive|m1");
    p.weighting = *w;
    p.normalized = normalized;
    const adaexp::RngStream root = adaexp::RngStream::keyed({seed_opt->count() > 0 ? seed : 1, 0x11});
    const std::vector<double> sample = adaexp::sample_limit(p, draws, root);
    std::ofstream file;
    std::ostream& out = resolve_out(file, out_path);
    out << "w\n";
    for (double x : sample) out << x << '\n';
  });

  // ---- histogram ----
  auto* hist = app.add_subcommand("histogram", "Centered statistic draws over a c_N grid");
  std::vector<std::string> c_list{"0", "-5", "-10", "-15"};
  long hist_reps = 5000;
  hist->add_option("--c", c_list, "c_N grid values");
  hist->add_option("--reps", hist_reps, "Replications per c value");
  hist->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.outcome || !rc.design)
      throw ConfigError("histogram requires outcome, design, and selection sections");
    std::ofstream file;
    std::ostream& out = resolve_out(file, out_path);
    out << "c,draw\n";
    for (const std::string& ct : c_list) {
      const double c = parse_c_value(ct);
      const adaexp::OutcomeModel model =
          adaexp::model_with_signal(*rc.outcome, c, rc.design->total());
      adaexp::DesignConfig dcfg = *rc.design;
      dcfg.seed = adaexp::RngStream::keyed({rc.seed, std::hash<std::string>{}(ct)}).key();
      const std::vector<double> d =
          adaexp::sampling_histogram(dcfg, model, hist_reps, rc.threads);
      for (double x : d) out << ct << ',' << x << '\n';
    }
  });

  // ---- semisynthetic ----
  auto* semi = app.add_subcommand("semisynthetic", "Permutation pipeline on a trial dataset");
  semi->add_option("--data", data_path, "Input CSV (unit_id,group,outcome)")->required();
  semi->add_option("--pvalues-out", pvalues_path, "Per-permutation p-value CSV");
  semi->callback([&] {
    adaexp::RunConfig rc = load_cfg(config_path);
    apply_overrides(rc);
    if (!rc.semi) throw ConfigError("semisynthetic requires a semisynthetic section");
    if (!pvalues_path.empty()) rc.semi->emit_pvalues = true;
    const adaexp::TrialCsv data = adaexp::load_trial_csv(data_path);
    const adaexp::StudyResult res = adaexp::run_semisynthetic(*rc.semi, data);
    std::ofstream file;
    write_study_csv(resolve_out(file, out_path), res);
    if (!pvalues_path.empty()) write_pvalues_csv(pvalues_path, res);
  });

  // ---- gen-semisynthetic-data ----
  auto* gen = app.add_subcommand("gen-semisynthetic-data", "Synthetic stand-in dataset");
  long units = 9000;
  double event_rate = 0.06, treat_fraction = 0.5;
  gen->add_option("--units", units, "Number of units");
  gen->add_option("--event-rate", event_rate, "Binary event rate (< 0.1 in the target regime)");
  gen->add_option("--treat-fraction", treat_fraction, "Share of treatment labels");
  gen->callback([&] {
    const adaexp::RngStream root = adaexp::RngStream::keyed({seed_opt->count() > 0 ? seed : 1, 0x5e});
    const adaexp::TrialCsv data =
        adaexp::generate_semisynthetic_data(units, event_rate, treat_fraction, root);
    std::ofstream file;
    adaexp::write_trial_csv(resolve_out(file, out_path), data);
  });

  // ---- validate-config ----
  auto* validate = app.add_subcommand("validate-config", "Schema and assumption checks");
  validate->callback([&] {
    const adaexp::RunConfig rc = load_cfg(config_path);
    if (rc.study) rc.study->validate();
    if (rc.semi) rc.semi->validate();
    std::cout << "config ok\n";
    for (const std::string& w : rc.warnings) std::cout << "warning: " << w << "\n";
  });

  // let the shared options (--config/--seed/--threads/--out) appear after the
  // subcommand name as well as before it
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
