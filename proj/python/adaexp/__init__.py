"""Python interface to the adaptive-experiment simulation and inference engine."""

try:
    from ._adaexp import (
        OutcomeModel,
        TrialData,
        bootstrap_test,
        estimate,
        run_trial,
        sample_limit,
        sample_split_test,
        wasserstein1,
    )
except ImportError:  # build-tree layout: extension module on sys.path directly
    from _adaexp import (
        OutcomeModel,
        TrialData,
        bootstrap_test,
        estimate,
        run_trial,
        sample_limit,
        sample_split_test,
        wasserstein1,
    )

__all__ = [
    "OutcomeModel",
    "TrialData",
    "bootstrap_test",
    "estimate",
    "run_trial",
    "sample_limit",
    "sample_split_test",
    "wasserstein1",
]
