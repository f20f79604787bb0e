"""Weighted prime-counting bias experiments over number fields and F_q[T]."""

__version__ = "0.1.0"

from .primes import (
    CheckpointGrid,
    SieveConfig,
    iter_prime_blocks,
    iter_primes,
    make_grid,
    prime_count,
    sieve_segment,
    simple_sieve,
    stream_primes,
)
from .series import (
    CheckpointSeries,
    PrimeClassifier,
    WeightedSum,
    accumulate_series,
    density_report,
    fit_loglog_slope,
    mertens_residual,
    residual_series,
    residue_table_classifier,
)

__all__ = [
    "CheckpointGrid",
    "CheckpointSeries",
    "PrimeClassifier",
    "SieveConfig",
    "WeightedSum",
    "accumulate_series",
    "density_report",
    "fit_loglog_slope",
    "iter_prime_blocks",
    "iter_primes",
    "make_grid",
    "mertens_residual",
    "prime_count",
    "residual_series",
    "residue_table_classifier",
    "sieve_segment",
    "simple_sieve",
    "stream_primes",
]
