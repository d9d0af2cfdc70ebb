import math

import _adaexp as adaexp


def test_model_moments():
    m = adaexp.OutcomeModel.bernoulli(0.7, 0.5)
    assert m.mean(0) == 0.7
    assert m.second_moment(0) == 0.7
    assert abs(m.variance(0) - 0.21) < 1e-12


def test_trial_and_estimates():
    model = adaexp.OutcomeModel.gaussian(0.0, 1.0, 0.0, 0.25)
    trial = adaexp.run_trial(model, 200, 200, selection="thompson", l_n=0.1, seed=7)
    assert trial.n(0) == 200 and trial.n(1) == 200
    assert 0.1 <= trial.p2_arm0 <= 0.9
    rep = adaexp.estimate(trial, "adaptive")
    assert math.isfinite(rep["t_stat"])
    assert rep["w_stat"] is not None


def test_trial_determinism():
    model = adaexp.OutcomeModel.bernoulli(0.5, 0.5)
    a = adaexp.run_trial(model, 50, 50, selection="eps_greedy", l_n=0.05, seed=3)
    b = adaexp.run_trial(model, 50, 50, selection="eps_greedy", l_n=0.05, seed=3)
    assert a.outcomes(0) == b.outcomes(0)
    assert a.arms(1) == b.arms(1)
    assert a.p2_arm0 == b.p2_arm0


def test_bootstrap_test_runs():
    model = adaexp.OutcomeModel.gaussian(0.0, 1.0, 0.0, 0.25)
    trial = adaexp.run_trial(model, 300, 300, selection="thompson", l_n=0.1, seed=11)
    res = adaexp.bootstrap_test(trial, "thompson", 0.1, "adaptive", scaling="N",
                                side="right", b=500, seed=5)
    assert not res["abstain"]
    assert 0.0 < res["p_value"] <= 1.0


def test_sample_limit_and_wasserstein():
    xs = adaexp.sample_limit(0.0, [0.0, 0.0], [1.0, 9.0], draws=2000, seed=2)
    ys = adaexp.sample_limit(-15.0, [0.0, 0.0], [1.0, 9.0], draws=2000, seed=2)
    assert len(xs) == 2000
    assert adaexp.wasserstein1(xs, xs) == 0.0
    assert adaexp.wasserstein1(xs, ys) > 0.0


def test_sample_split():
    model = adaexp.OutcomeModel.bernoulli(0.5, 0.5)
    trial = adaexp.run_trial(model, 400, 400, selection="eps_greedy", l_n=0.2, seed=9)
    res = adaexp.sample_split_test(trial, alpha=0.05, side="right")
    assert not res["abstain"]
    assert 0.0 <= res["p_value"] <= 1.0
