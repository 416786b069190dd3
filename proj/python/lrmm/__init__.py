"""Low-rank Gaussian mixture estimation (C++ core)."""

from ._lrmm import (
    EstimateReport,
    LrmmError,
    SampleSet,
    SignalMatrix,
    classify,
    em_mle,
    estimate,
    log_density,
    loss,
    lowdeg_norm,
    make_signal,
    minimax_rate,
    neg_log_lik,
    rademacher_moment,
    sample_lrmm,
)

__all__ = [
    "EstimateReport",
    "LrmmError",
    "SampleSet",
    "SignalMatrix",
    "classify",
    "em_mle",
    "estimate",
    "log_density",
    "loss",
    "lowdeg_norm",
    "make_signal",
    "minimax_rate",
    "neg_log_lik",
    "rademacher_moment",
    "sample_lrmm",
]
