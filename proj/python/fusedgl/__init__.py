"""Fused graphical lasso estimation and de-biased inference for several groups."""

from ._core import (
    FglError,
    InvalidInput,
    InsufficientData,
    NotPositiveDefinite,
    NotPositiveSemiDefinite,
    DegenerateVariance,
    UnsupportedDesign,
    __version__,
    debias,
    fit,
    fit_weighted,
    generate_precision,
    kkt_check,
    normal_critical_value,
    prox_fused_lasso,
    sample_covariance,
    sample_gaussian,
    select_tuning,
    test_linear,
)

__all__ = [name for name in dir() if not name.startswith("_")]
