"""Affine covariant integral quantization on the half-plane."""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    SyntaxError,
    UnsupportedError,
    check_count,
    cli,
    evaluate,
    halfosc_fd,
    halfosc_laguerre,
    lower_symbol,
    matrix_u,
    quantize,
    run_check,
    trace_u,
    trace_u_closed_form,
    wigner_halfosc,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "SyntaxError",
    "UnsupportedError",
    "check_count",
    "cli",
    "evaluate",
    "halfosc_fd",
    "halfosc_laguerre",
    "lower_symbol",
    "matrix_u",
    "quantize",
    "run_check",
    "trace_u",
    "trace_u_closed_form",
    "wigner_halfosc",
]
