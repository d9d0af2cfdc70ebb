#include "adaexp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace adaexp {

using nlohmann::json;

std::string weighting_name(Weighting w) {
  switch (w) {
    case Weighting::Constant: return "constant";
    case Weighting::Adaptive: return "adaptive";
    case Weighting::M1: return "m1";
  }
  return "?";
}

std::optional<Weighting> parse_weighting(const std::string& name) {
  if (name == "constant") return Weighting::Constant;
  if (name == "adaptive") return Weighting::Adaptive;
  if (name == "m1") return Weighting::M1;
  return std::nullopt;
}

namespace {

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + context);
  }
}

double require_number(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError(context + " requires numeric \"" + std::string(key) + "\"");
  return obj[key].get<double>();
}

long require_integer(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer())
    throw ConfigError(context + " requires integer \"" + std::string(key) + "\"");
  return obj[key].get<long>();
}

std::string require_string(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ConfigError(context + " requires string \"" + std::string(key) + "\"");
  return obj[key].get<std::string>();
}

std::vector<double> number_list(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key) || !obj[key].is_array())
    throw ConfigError(context + " requires array \"" + std::string(key) + "\"");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError(context + "." + key + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

OutcomeModel parse_outcome(const json& j) {
  const std::string fam = require_string(j, "outcome", "family");
  if (fam == "bernoulli") {
    check_keys(j, "outcome", {"family", "p0", "p1"});
    return OutcomeModel::bernoulli(require_number(j, "outcome", "p0"),
                                   require_number(j, "outcome", "p1"));
  }
  if (fam == "gaussian") {
    check_keys(j, "outcome", {"family", "mu0", "var0", "mu1", "var1"});
    return OutcomeModel::gaussian(
        require_number(j, "outcome", "mu0"), require_number(j, "outcome", "var0"),
        require_number(j, "outcome", "mu1"), require_number(j, "outcome", "var1"));
  }
  if (fam == "poisson") {
    check_keys(j, "outcome", {"family", "lambda0", "lambda1"});
    return OutcomeModel::poisson(require_number(j, "outcome", "lambda0"),
                                 require_number(j, "outcome", "lambda1"));
  }
  if (fam == "student") {
    check_keys(j, "outcome", {"family", "theta", "df0", "df1"});
    return OutcomeModel::student_shift(require_number(j, "outcome", "theta"),
                                       require_number(j, "outcome", "df0"),
                                       require_number(j, "outcome", "df1"));
  }
  throw ConfigError("unknown outcome family \"" + fam +
                    "\" (expected bernoulli|gaussian|poisson|student)");
}

SelectionRule parse_selection(const json& j) {
  check_keys(j, "selection", {"kind", "l_n", "beta", "alpha_sel", "sigma_hat"});
  const std::string kind = require_string(j, "selection", "kind");
  const double l = j.contains("l_n") ? require_number(j, "selection", "l_n") : 0.0;
  if (kind == "thompson") return SelectionRule::thompson(l);
  if (kind == "eps_greedy") return SelectionRule::eps_greedy(l);
  if (kind == "enrich_effect")
    return SelectionRule::enrich_effect(require_number(j, "selection", "beta"), l);
  if (kind == "enrich_pvalue") {
    const double alpha_sel = require_number(j, "selection", "alpha_sel");
    if (!j.contains("sigma_hat") || (j["sigma_hat"].is_string() &&
                                     j["sigma_hat"].get<std::string>() == "estimate"))
      return SelectionRule::enrich_pvalue_estimated(alpha_sel, l);
    if (j["sigma_hat"].is_number())
      return SelectionRule::enrich_pvalue(alpha_sel, j["sigma_hat"].get<double>(), l);
    throw ConfigError("selection.sigma_hat must be a number or \"estimate\"");
  }
  throw ConfigError("unknown selection kind \"" + kind +
                    "\" (expected thompson|eps_greedy|enrich_effect|enrich_pvalue)");
}

SelectionKind selection_kind_of(const SelectionRule& r) { return r.kind; }

DesignConfig parse_design(const json& j, const SelectionRule& rule) {
  check_keys(j, "design", {"n1", "n2", "e0", "weighting"});
  DesignConfig d;
  d.n1 = require_integer(j, "design", "n1");
  d.n2 = require_integer(j, "design", "n2");
  d.e0 = j.contains("e0") ? require_number(j, "design", "e0") : 0.5;
  if (j.contains("weighting")) {
    const auto w = parse_weighting(require_string(j, "design", "weighting"));
    if (!w) throw ConfigError("design.weighting must be constant|adaptive|m1");
    d.weighting = *w;
  }
  d.rule = rule;
  return d;
}

std::vector<Method> parse_methods(const json& j, const std::string& context) {
  if (!j.contains("methods") || !j["methods"].is_array())
    throw ConfigError(context + " requires array \"methods\"");
  std::vector<Method> out;
  for (const auto& v : j["methods"]) {
    if (!v.is_string()) throw ConfigError(context + ".methods entries must be strings");
    const auto m = parse_method(v.get<std::string>());
    if (!m)
      throw ConfigError("unknown method \"" + v.get<std::string>() +
                        "\" (expected constant_u|constant_n|adaptive_u|adaptive_n|"
                        "m1_u|m1_n|sample_split)");
    out.push_back(*m);
  }
  return out;
}

std::vector<Side> parse_sides(const json& j, const std::string& context) {
  std::vector<Side> out;
  if (!j.contains("sides")) return {Side::Right};
  if (!j["sides"].is_array()) throw ConfigError(context + ".sides must be an array");
  for (const auto& v : j["sides"]) {
    const auto s = v.is_string() ? parse_side(v.get<std::string>()) : std::nullopt;
    if (!s) throw ConfigError(context + ".sides entries must be \"left\" or \"right\"");
    out.push_back(*s);
  }
  return out;
}

StudyConfig parse_study(const json& j, const RunConfig& rc) {
  check_keys(j, "study", {"family", "thetas", "epsilons", "methods", "sides", "reps",
                          "bootstrap_draws", "alpha", "emit_pvalues"});
  StudyConfig s;
  const auto fam = parse_family(require_string(j, "study", "family"));
  if (!fam)
    throw ConfigError("study.family must be bernoulli|gaussian|poisson|student");
  s.family = *fam;
  s.thetas = number_list(j, "study", "thetas");
  s.epsilons = number_list(j, "study", "epsilons");
  s.methods = parse_methods(j, "study");
  s.sides = parse_sides(j, "study");
  s.reps = require_integer(j, "study", "reps");
  s.b_draws = require_integer(j, "study", "bootstrap_draws");
  if (j.contains("alpha")) s.alpha = require_number(j, "study", "alpha");
  if (j.contains("emit_pvalues")) {
    if (!j["emit_pvalues"].is_boolean())
      throw ConfigError("study.emit_pvalues must be boolean");
    s.emit_pvalues = j["emit_pvalues"].get<bool>();
  }
  if (rc.design) {
    s.n1 = rc.design->n1;
    s.n2 = rc.design->n2;
    s.e0 = rc.design->e0;
    s.selection = selection_kind_of(rc.design->rule);
    s.beta = rc.design->rule.beta;
    s.alpha_sel = rc.design->rule.alpha_sel;
    s.sigma_hat = rc.design->rule.sigma_from_pilot ? 0.0 : rc.design->rule.sigma_hat;
  }
  return s;
}

SemiConfig parse_semi(const json& j) {
  check_keys(j, "semisynthetic",
             {"permutations", "etas", "epsilons", "n1", "n2", "methods", "sides", "alpha",
              "bootstrap_draws", "with_replacement", "emit_pvalues"});
  SemiConfig s;
  s.permutations = require_integer(j, "semisynthetic", "permutations");
  s.etas = number_list(j, "semisynthetic", "etas");
  s.epsilons = number_list(j, "semisynthetic", "epsilons");
  s.n1 = require_integer(j, "semisynthetic", "n1");
  s.n2 = require_integer(j, "semisynthetic", "n2");
  s.methods = parse_methods(j, "semisynthetic");
  s.sides = parse_sides(j, "semisynthetic");
  if (j.contains("alpha")) s.alpha = require_number(j, "semisynthetic", "alpha");
  s.b_draws = require_integer(j, "semisynthetic", "bootstrap_draws");
  if (j.contains("with_replacement")) {
    if (!j["with_replacement"].is_boolean())
      throw ConfigError("semisynthetic.with_replacement must be boolean");
    s.with_replacement = j["with_replacement"].get<bool>();
  }
  if (j.contains("emit_pvalues")) {
    if (!j["emit_pvalues"].is_boolean())
      throw ConfigError("semisynthetic.emit_pvalues must be boolean");
    s.emit_pvalues = j["emit_pvalues"].get<bool>();
  }
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config root",
             {"outcome", "design", "selection", "study", "semisynthetic", "seed", "threads"});
  RunConfig rc;
  if (j.contains("seed")) rc.seed = static_cast<std::uint64_t>(require_integer(j, "config", "seed"));
  if (j.contains("threads")) rc.threads = static_cast<int>(require_integer(j, "config", "threads"));

  if (j.contains("outcome")) {
    rc.outcome = parse_outcome(j["outcome"]);
    rc.outcome->validate();
  }
  SelectionRule rule;  // defaults to unclipped Thompson when absent
  if (j.contains("selection")) {
    rule = parse_selection(j["selection"]);
    rule.validate();
  }
  if (j.contains("design")) {
    rc.design = parse_design(j["design"], rule);
    rc.design->seed = rc.seed;
    // hard assumption violations throw here with their own messages
    rc.warnings = rc.design->validate();
  }
  if (j.contains("study")) rc.study = parse_study(j["study"], rc);
  if (j.contains("semisynthetic")) rc.semi = parse_semi(j["semisynthetic"]);
  if (rc.study) {
    rc.study->master_seed = rc.seed;
    rc.study->threads = rc.threads;
  }
  if (rc.semi) {
    rc.semi->master_seed = rc.seed;
    rc.semi->threads = rc.threads;
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void write_trial_data(std::ostream& out, const TrialData& trial) {
  out.precision(17);
  out << "# e0=" << trial.e0 << ",p2_arm0=" << trial.p2_arm0()
      << ",interim0=" << trial.interim0 << ",interim1=" << trial.interim1
      << ",sigma_hat=" << trial.sigma_hat << "\n";
  out << "stage,arm,outcome\n";
  for (int t = 0; t < 2; ++t)
    for (long u = 0; u < trial.n(t); ++u)
      out << (t + 1) << ',' << static_cast<int>(trial.stage[t].arms[u]) << ','
          << trial.stage[t].outcomes[u] << '\n';
}

TrialData read_trial_data(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw ConfigError("trial CSV must start with a # metadata line");
  TrialData trial;
  double p2 = 0.5;
  {
    std::istringstream meta(line.substr(1));
    std::string kv;
    while (std::getline(meta, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("malformed trial metadata: " + kv);
      std::string key = kv.substr(0, eq);
      key.erase(0, key.find_first_not_of(' '));
      const double val = std::stod(kv.substr(eq + 1));
      if (key == "e0")
        trial.e0 = val;
      else if (key == "p2_arm0")
        p2 = val;
      else if (key == "interim0")
        trial.interim0 = val;
      else if (key == "interim1")
        trial.interim1 = val;
      else if (key == "sigma_hat")
        trial.sigma_hat = val;
      else
        throw ConfigError("unknown trial metadata key: " + key);
    }
  }
  if (!std::getline(in, line) || line != "stage,arm,outcome")
    throw ConfigError("trial CSV requires the header line stage,arm,outcome");
  trial.stage[0].p_arm0 = trial.e0;
  trial.stage[1].p_arm0 = p2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int stage, arm;
    double y;
    try {
      std::getline(row, cell, ',');
      stage = std::stoi(cell);
      std::getline(row, cell, ',');
      arm = std::stoi(cell);
      std::getline(row, cell, ',');
      y = std::stod(cell);
    } catch (const std::exception&) {
      throw ConfigError("malformed trial CSV row: " + line);
    }
    if (stage != 1 && stage != 2) throw ConfigError("stage must be 1 or 2");
    if (arm != 0 && arm != 1) throw ConfigError("arm must be 0 or 1");
    trial.stage[stage - 1].arms.push_back(static_cast<std::uint8_t>(arm));
    trial.stage[stage - 1].outcomes.push_back(y);
  }
  if (trial.n(0) == 0) throw ConfigError("trial CSV has no pilot-stage rows");
  return trial;
}

TrialData load_trial_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trial CSV: " + path);
  return read_trial_data(in);
}

OutcomeModel model_with_signal(const OutcomeModel& base, double c, long n) {
  if (base.family() != OutcomeFamily::Gaussian)
    throw ConfigError("signal shifting is only supported for gaussian outcome models");
  const double mu0 = base.mean(0);
  return OutcomeModel::gaussian(mu0, base.variance(0),
                                mu0 - c / std::sqrt(static_cast<double>(n)),
                                base.variance(1));
}

}  // namespace adaexp
