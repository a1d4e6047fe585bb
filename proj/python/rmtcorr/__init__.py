"""Random-matrix analysis of intraday return cross-correlations."""

from ._core import (
    Error,
    correlation,
    deviation_report,
    eigendecompose,
    eigenportfolio_returns,
    generate_factor_market,
    market_regression,
    mp_bounds,
    mp_density,
    partial_correlation,
    partial_correlation_closed_form,
    run_cli,
    separation_score,
    sha256_hex,
    sign_separation,
    verify_manifest,
)

__all__ = [
    "Error",
    "correlation",
    "deviation_report",
    "eigendecompose",
    "eigenportfolio_returns",
    "generate_factor_market",
    "market_regression",
    "mp_bounds",
    "mp_density",
    "partial_correlation",
    "partial_correlation_closed_form",
    "run_cli",
    "separation_score",
    "sha256_hex",
    "sign_separation",
    "verify_manifest",
]
