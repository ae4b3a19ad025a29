"""Realisable PAC-Bayes certificates and the symmetry-counting information bound."""

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .errors import InvalidArgument

DEFAULT_DELTA = 0.01
VACUOUS_THRESHOLD = 0.5


@dataclass(frozen=True)
class GeneralisationBound:
    n: int
    delta: float
    info_nats: float
    raw_bound: float
    error_bound: float
    vacuous: bool


def realisable_bound(info_nats, n, delta=DEFAULT_DELTA):
    """Bound the version-space average test error.

    ``raw_bound = (I + ln(2n/delta)) / (n - 1)`` bounds ``ln(1/(1 - eps))``,
    hence ``eps <= 1 - exp(-raw_bound)``; that tighter value is
    ``error_bound``. It is vacuous at or above chance (0.5).
    """
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if not 0.0 < delta < 1.0:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    if not info_nats >= 0:
        raise InvalidArgument(f"information must be >= 0 nats, got {info_nats}")
    raw = (info_nats + math.log(2.0 * n / delta)) / (n - 1)
    err = min(1.0, -math.expm1(-raw))
    return GeneralisationBound(
        n=int(n),
        delta=float(delta),
        info_nats=float(info_nats),
        raw_bound=raw,
        error_bound=err,
        vacuous=err >= VACUOUS_THRESHOLD,
    )


def symmetry_info_bound(arch):
    """Information bound from hidden-unit permutation symmetries, in nats.

    ``ln 2 * w * sum_l d_l d_{l-1} - sum_{hidden l} ln(d_l!)`` with exact
    log-factorials.
    """
    dims = arch.dims
    weights = sum(dims[l] * dims[l - 1] for l in range(1, len(dims)))
    log_symmetries = sum(float(gammaln(d + 1)) for d in dims[1:-1])
    return math.log(2.0) * arch.weight_bits * weights - log_symmetries


def symmetry_info_bound_stirling(arch):
    """Same bound with ``ln(d!) ~ d ln d - d``."""
    dims = arch.dims
    total = math.log(2.0) * arch.weight_bits * sum(dims[l] * dims[l - 1] for l in range(1, len(dims)))
    return total - sum(d * math.log(d) - d for d in dims[1:-1])
