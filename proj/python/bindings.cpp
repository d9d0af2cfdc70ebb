#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adaexp/bootstrap.hpp"
#include "adaexp/config.hpp"
#include "adaexp/estimators.hpp"
#include "adaexp/experiment.hpp"
#include "adaexp/limitdist.hpp"
#include "adaexp/montecarlo.hpp"
#include "adaexp/outcomes.hpp"
#include "adaexp/semisynthetic.hpp"

namespace py = pybind11;
using namespace adaexp;

namespace {

SelectionRule make_rule(const std::string& kind, double l_n, double beta, double alpha_sel,
                        double sigma_hat) {
  if (kind == "thompson") return SelectionRule::thompson(l_n);
  if (kind == "eps_greedy") return SelectionRule::eps_greedy(l_n);
  if (kind == "enrich_effect") return SelectionRule::enrich_effect(beta, l_n);
  if (kind == "enrich_pvalue") {
    if (sigma_hat > 0.0) return SelectionRule::enrich_pvalue(alpha_sel, sigma_hat, l_n);
    return SelectionRule::enrich_pvalue_estimated(alpha_sel, l_n);
  }
  throw std::invalid_argument("unknown selection kind: " + kind);
}

Weighting weighting_from(const std::string& name) {
  const auto w = parse_weighting(name);
  if (!w) throw std::invalid_argument("weighting must be constant|adaptive|m1");
  return *w;
}

Side side_from(const std::string& name) {
  const auto s = parse_side(name);
  if (!s) throw std::invalid_argument("side must be left or right");
  return *s;
}

}  // namespace

PYBIND11_MODULE(_adaexp, m) {
  m.doc() = "Two-stage adaptive experiment simulation and inference engine";

  py::class_<OutcomeModel>(m, "OutcomeModel")
      .def_static("bernoulli", &OutcomeModel::bernoulli)
      .def_static("gaussian", &OutcomeModel::gaussian)
      .def_static("poisson", &OutcomeModel::poisson)
      .def_static("student_shift", &OutcomeModel::student_shift)
      .def("mean", &OutcomeModel::mean)
      .def("second_moment", &OutcomeModel::second_moment)
      .def("fourth_moment", &OutcomeModel::fourth_moment)
      .def("variance", &OutcomeModel::variance)
      .def("signal", &OutcomeModel::signal)
      .def("describe", &OutcomeModel::describe);

  py::class_<TrialData>(m, "TrialData")
      .def_property_readonly("e0", [](const TrialData& t) { return t.e0; })
      .def_property_readonly("p2_arm0", &TrialData::p2_arm0)
      .def_property_readonly("interim0", [](const TrialData& t) { return t.interim0; })
      .def_property_readonly("interim1", [](const TrialData& t) { return t.interim1; })
      .def("n", &TrialData::n)
      .def("arms", [](const TrialData& t, int stage) {
        std::vector<int> out(t.stage[stage].arms.begin(), t.stage[stage].arms.end());
        return out;
      })
      .def("outcomes",
           [](const TrialData& t, int stage) { return t.stage[stage].outcomes; });

  m.def(
      "run_trial",
      [](const OutcomeModel& model, long n1, long n2, double e0, const std::string& selection,
         double l_n, double beta, double alpha_sel, double sigma_hat, std::uint64_t seed) {
        DesignConfig cfg;
        cfg.n1 = n1;
        cfg.n2 = n2;
        cfg.e0 = e0;
        cfg.rule = make_rule(selection, l_n, beta, alpha_sel, sigma_hat);
        return run_trial(cfg, model, RngStream::keyed({seed, 0}));
      },
      py::arg("model"), py::arg("n1"), py::arg("n2"), py::arg("e0") = 0.5,
      py::arg("selection") = "thompson", py::arg("l_n") = 0.1, py::arg("beta") = 0.0,
      py::arg("alpha_sel") = 0.05, py::arg("sigma_hat") = 1.0, py::arg("seed") = 1);

  m.def(
      "estimate",
      [](const TrialData& trial, const std::string& weighting) {
        const EstimateReport r = compute_report(trial, weighting_from(weighting));
        py::dict d;
        d["wipw"] = std::vector<double>{r.wipw_val[0], r.wipw_val[1]};
        d["wipws"] = std::vector<double>{r.wipws_val[0], r.wipws_val[1]};
        d["v_hat"] = std::vector<double>{r.v_hat[0], r.v_hat[1]};
        d["t_stat"] = r.t_stat;
        d["s_hat"] = r.s_hat;
        d["w_stat"] = r.w_stat_valid ? py::object(py::float_(r.w_stat)) : py::none();
        return d;
      },
      py::arg("trial"), py::arg("weighting") = "adaptive");

  m.def(
      "bootstrap_test",
      [](const TrialData& trial, const std::string& selection, double l_n,
         const std::string& weighting, const std::string& scaling, double alpha,
         const std::string& side, long b, std::uint64_t seed, double beta, double alpha_sel,
         double sigma_hat) {
        if (scaling != "U" && scaling != "N")
          throw std::invalid_argument("scaling must be U or N");
        SelectionRule rule = make_rule(selection, l_n, beta, alpha_sel, sigma_hat);
        if (rule.sigma_from_pilot) {
          rule.sigma_hat = trial.sigma_hat;
          rule.sigma_from_pilot = false;
        }
        const BootstrapResult r =
            run_test(trial, rule, weighting_from(weighting), scaling == "N", alpha,
                     side_from(side), b, RngStream::keyed({seed, 0xb001}));
        py::dict d;
        d["abstain"] = r.abstain;
        d["stat"] = r.stat;
        d["quantile"] = r.quantile_used;
        d["p_value"] = r.p_value;
        d["reject"] = r.reject;
        return d;
      },
      py::arg("trial"), py::arg("selection"), py::arg("l_n"), py::arg("weighting"),
      py::arg("scaling") = "N", py::arg("alpha") = 0.05, py::arg("side") = "right",
      py::arg("b") = 5000, py::arg("seed") = 1, py::arg("beta") = 0.0,
      py::arg("alpha_sel") = 0.05, py::arg("sigma_hat") = 1.0);

  m.def(
      "sample_limit",
      [](double c, std::vector<double> mu, std::vector<double> m2, double e0,
         const std::string& selection, double l_bar, const std::string& weighting,
         bool normalized, double q1, long draws, std::uint64_t seed) {
        LimitParams p;
        p.c = c;
        p.mu[0] = mu.at(0);
        p.mu[1] = mu.at(1);
        p.m2[0] = m2.at(0);
        p.m2[1] = m2.at(1);
        p.e0 = e0;
        p.rule = make_rule(selection, l_bar, 0.0, 0.05, 1.0);
        p.weighting = weighting_from(weighting);
        p.normalized = normalized;
        p.q1 = q1;
        p.q2 = 1.0 - q1;
        return sample_limit(p, draws, RngStream::keyed({seed, 0x11}));
      },
      py::arg("c"), py::arg("mu"), py::arg("m2"), py::arg("e0") = 0.5,
      py::arg("selection") = "eps_greedy", py::arg("l_bar") = 0.0,
      py::arg("weighting") = "adaptive", py::arg("normalized") = false, py::arg("q1") = 0.5,
      py::arg("draws") = 10000, py::arg("seed") = 1);

  m.def("wasserstein1", &wasserstein1, py::arg("xs"), py::arg("ys"));

  m.def(
      "sample_split_test",
      [](const TrialData& trial, double alpha, const std::string& side) {
        const SplitTestResult r = sample_split_test(trial, alpha, side_from(side));
        py::dict d;
        d["z"] = r.z;
        d["p_value"] = r.p_value;
        d["reject"] = r.reject;
        d["abstain"] = r.abstain;
        return d;
      },
      py::arg("trial"), py::arg("alpha") = 0.05, py::arg("side") = "right");
}
