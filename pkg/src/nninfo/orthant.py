"""Gaussian orthant probabilities and the kernel complexity measures C0, C1.

For ``z ~ N(0, sigma)`` and labels ``c`` in {-1, +1}^n the orthant probability
``p = P[sign(z) = c]`` can be rewritten as an expectation over an isotropic
Gaussian ``u``::

    p = 2^-n E[exp(-1/2 (c*|u|)^T A (c*|u|))],   A = det(sigma)^(1/n) sigma^-1 - I

``C0 = -log p`` is estimated by Monte Carlo with a log-sum-exp reduction.
Jensen's inequality on the same expectation gives the closed form bound
``C0 <= n (ln 2 - 1/2) + C1``.

All quantities are in nats.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import InvalidArgument, ResidualTooLarge
from .linalg import DEFAULT_RESIDUAL_TOL, cholesky, inverse_from_cholesky, normalized_det_root

DEFAULT_SAMPLES = 10_000
ORACLE_MAX_N = 12
ORACLE_MIN_TRIALS = 10_000
LN2 = math.log(2.0)


@dataclass(frozen=True)
class InfoEstimate:
    n: int
    c0_nats: float
    c0_std_error: float
    c1_nats: float
    info_upper_nats: float
    samples: int
    seed: int
    inverse_residual: float

    @property
    def info_upper_display(self):
        """The looser rounded form ``n/5 + C1``."""
        return info_upper_display(self.n, self.c1_nats)

    @property
    def c0_per_sample(self):
        return self.c0_nats / self.n

    @property
    def orthant_probability(self):
        return math.exp(-self.c0_nats)


def as_labels(c, n=None):
    c = np.asarray(c)
    if c.ndim != 1 or c.size == 0:
        raise InvalidArgument("labels must be a non-empty 1-d vector")
    if not np.all((c == 1) | (c == -1)):
        raise InvalidArgument("labels must be exactly +1 or -1")
    if n is not None and c.size != n:
        raise InvalidArgument(f"expected {n} labels, got {c.size}")
    return c.astype(np.float64)


def sign_flip_canonicalize(sigma, c):
    """Map ``(sigma, c)`` to ``(D sigma D, 1)`` with ``D = diag(c)``.

    Sign flips are exact in floating point, so the orthant probability (and
    everything computed from it here) is unchanged bit for bit.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    c = as_labels(c, sigma.shape[0])
    return sigma * np.outer(c, c), np.ones_like(c)


def _prepare(sigma, c, tol):
    sigma, _ = sign_flip_canonicalize(sigma, c)
    f = cholesky(sigma)
    inv = inverse_from_cholesky(f)
    if not f.inverse_residual < tol:
        raise ResidualTooLarge(
            f"||sigma sigma^-1 - I|| = {f.inverse_residual:.3g} is not below {tol:g}; kernel is ill-conditioned"
        )
    return f, inv, normalized_det_root(f)


def _c1(inv, root):
    # labels are all +1 after canonicalisation, so c^T inv c = sum(inv)
    return root * ((0.5 - 1.0 / math.pi) * float(np.trace(inv)) + float(np.sum(inv)) / math.pi)


def log_weights(sigma, c, samples=DEFAULT_SAMPLES, seed=0, tol=DEFAULT_RESIDUAL_TOL):
    """Per-sample exponents ``a_i = -1/2 (c*|u_i|)^T A (c*|u_i|)``."""
    a, _, _, _ = _log_weights(sigma, c, samples, seed, tol)
    return a


def _log_weights(sigma, c, samples, seed, tol):
    if samples < 2:
        raise InvalidArgument(f"need at least 2 Monte-Carlo samples, got {samples}")
    f, inv, root = _prepare(sigma, c, tol)
    n = f.n
    A = root * inv - np.eye(n)
    a = np.empty(samples)
    for start, u in rng.normal_blocks(seed, rng.STREAM_ESTIMATOR, samples, n):
        v = np.abs(u)
        a[start:start + len(v)] = -0.5 * np.einsum("ij,ij->i", v @ A, v)
    return a, f, inv, root


def estimate_c0(sigma, c, samples=DEFAULT_SAMPLES, seed=0, tol=DEFAULT_RESIDUAL_TOL):
    """Monte-Carlo estimate of ``C0 = -log p`` with its standard error.

    The standard error is the delta-method error of ``log(mean(exp(a_i)))``,
    i.e. ``std(w) / (sqrt(M) mean(w))`` with ``w = exp(a - max(a))``. C1 and
    the Jensen upper bound come for free from the same factorisation.
    """
    a, f, inv, root = _log_weights(sigma, c, samples, seed, tol)
    n = f.n
    a_max = float(np.max(a))
    w = np.exp(a - a_max)
    total = float(np.sum(w))
    log_mean = a_max + math.log(total) - math.log(samples)
    mean_w = total / samples
    std_error = float(np.std(w, ddof=1)) / (math.sqrt(samples) * mean_w)
    c1 = _c1(inv, root)
    return InfoEstimate(
        n=n,
        c0_nats=n * LN2 - log_mean,
        c0_std_error=std_error,
        c1_nats=c1,
        info_upper_nats=info_upper_bound(n, c1),
        samples=int(samples),
        seed=int(seed),
        inverse_residual=f.inverse_residual,
    )


def c1_bound(sigma, c, tol=DEFAULT_RESIDUAL_TOL):
    """``C1 = det(sigma)^(1/n) [(1/2 - 1/pi) tr(sigma^-1) + (1/pi) c^T sigma^-1 c]``."""
    _, inv, root = _prepare(sigma, c, tol)
    return _c1(inv, root)


def info_upper_bound(n, c1):
    """Exact Jensen bound on C0: ``n (ln 2 - 1/2) + C1``."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if c1 < 0:
        raise InvalidArgument(f"C1 must be >= 0, got {c1}")
    return n * (LN2 - 0.5) + c1


def info_upper_display(n, c1):
    """Rounded form ``n/5 + C1``; dominates :func:`info_upper_bound`."""
    return n / 5.0 + c1


def orthant_oracle(sigma, c, trials=1_000_000, seed=0):
    """Rejection estimate of ``P[sign(z) = c]`` for ``z ~ N(0, sigma)``.

    Brute force and exponentially slow in n; a test oracle only. Returns
    ``(p_hat, binomial standard error)``.
    """
    f = cholesky(sigma)
    n = f.n
    if n > ORACLE_MAX_N:
        raise InvalidArgument(f"oracle supports n <= {ORACLE_MAX_N}, got {n}")
    if trials < ORACLE_MIN_TRIALS:
        raise InvalidArgument(f"oracle needs at least {ORACLE_MIN_TRIALS} trials, got {trials}")
    positive = as_labels(c, n) > 0
    hits = 0
    for _, g in rng.normal_blocks(seed, rng.STREAM_ORACLE, trials, n):
        z = g @ f.L.T
        hits += int(np.count_nonzero(np.all((z > 0) == positive, axis=1)))
    p = hits / trials
    return p, math.sqrt(p * (1.0 - p) / trials)
