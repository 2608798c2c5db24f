"""Numerical kernel and verification harness for unilateral and bilateral
(basic) hypergeometric series."""

from ._qseries import (
    DivergentSeries,
    DivisionByVanishingFactor,
    EvalResult,
    PochResult,
    PoleError,
    ProofReport,
    QSeriesDomainError,
    QSeriesOverflowError,
    ResidualReport,
    SamplingExhausted,
    StepResidual,
    __version__,
    domain_check,
    eval_series,
    gamma,
    identities,
    param_names,
    pipelines,
    poch,
    qpoch,
    qpoch_inf,
    qpoch_multi,
    residual,
    rhs_closed_form,
    run_replay,
    run_verification,
    sample_params,
    term_ratio,
    verify_interchange,
    verify_key0,
    verify_key1,
    verify_key_2f1,
)

__all__ = [
    "DivergentSeries",
    "DivisionByVanishingFactor",
    "EvalResult",
    "PochResult",
    "PoleError",
    "ProofReport",
    "QSeriesDomainError",
    "QSeriesOverflowError",
    "ResidualReport",
    "SamplingExhausted",
    "StepResidual",
    "__version__",
    "domain_check",
    "eval_series",
    "gamma",
    "identities",
    "param_names",
    "pipelines",
    "poch",
    "qpoch",
    "qpoch_inf",
    "qpoch_multi",
    "residual",
    "rhs_closed_form",
    "run_replay",
    "run_verification",
    "sample_params",
    "term_ratio",
    "verify_interchange",
    "verify_key0",
    "verify_key1",
    "verify_key_2f1",
]
