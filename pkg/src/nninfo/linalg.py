"""Dense SPD linear algebra in log-domain form.

Determinants are never formed directly: for kernel matrices with a few hundred
rows ``det(sigma)`` underflows, so everything goes through ``sum(log(L_ii))``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidArgument, NotPositiveDefinite

DEFAULT_RESIDUAL_TOL = 1e-3


@dataclass
class CholeskyFactor:
    """Lower Cholesky factor of ``sigma`` plus diagnostics.

    ``inverse_residual`` stays ``nan`` until :func:`inverse_from_cholesky`
    has been called on this factor.
    """

    sigma: np.ndarray
    L: np.ndarray
    log_diag: np.ndarray
    inverse_residual: float = field(default=float("nan"))

    @property
    def n(self):
        return self.L.shape[0]


def as_covariance(sigma):
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] < 1:
        raise InvalidArgument(f"covariance must be a non-empty square matrix, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise InvalidArgument("covariance contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(np.abs(sigma - sigma.T)) > 1e-12 * scale:
        raise InvalidArgument("covariance is not symmetric")
    return sigma


def cholesky(sigma):
    """Factor ``sigma = L @ L.T``.

    Raises :class:`NotPositiveDefinite` when a pivot is not strictly positive,
    which is what duplicate training inputs produce. No jitter is added here.
    """
    sigma = as_covariance(sigma)
    try:
        L = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"covariance of order {sigma.shape[0]} is not positive definite") from exc
    d = np.diag(L)
    if not np.all(d > 0) or not np.all(np.isfinite(L)):
        raise NotPositiveDefinite("non-positive pivot in Cholesky factor")
    return CholeskyFactor(sigma=sigma, L=L, log_diag=np.log(d))


def inverse_from_cholesky(f):
    """Return ``sigma^{-1} = L^{-T} L^{-1}`` and record ``f.inverse_residual``."""
    n = f.n
    L_inv = solve_triangular(f.L, np.eye(n), lower=True)
    inv = L_inv.T @ L_inv
    # mirror the upper triangle so the result is exactly symmetric
    inv = np.triu(inv) + np.triu(inv, 1).T
    f.inverse_residual = inverse_residual(f.sigma, inv)
    return inv


def log_det(f):
    return 2.0 * float(np.sum(f.log_diag))


def normalized_det_root(f):
    """``det(sigma) ** (1/n)`` evaluated as ``exp((2/n) * sum(log L_ii))``."""
    return float(np.exp(2.0 * np.sum(f.log_diag) / f.n))


def inverse_residual(sigma, sigma_inv):
    """Largest absolute entry of ``sigma @ sigma_inv - I``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    sigma_inv = np.asarray(sigma_inv, dtype=np.float64)
    if sigma.shape != sigma_inv.shape:
        raise InvalidArgument(f"shape mismatch {sigma.shape} vs {sigma_inv.shape}")
    return float(np.max(np.abs(sigma @ sigma_inv - np.eye(sigma.shape[0]))))


def residual_check(sigma, sigma_inv, tol=DEFAULT_RESIDUAL_TOL):
    return inverse_residual(sigma, sigma_inv) < tol


def add_jitter(sigma, epsilon):
    """Return ``sigma + epsilon * I``. Only used when explicitly requested."""
    if epsilon < 0:
        raise InvalidArgument("jitter must be non-negative")
    sigma = np.asarray(sigma, dtype=np.float64)
    if epsilon == 0:
        return sigma
    return sigma + epsilon * np.eye(sigma.shape[0])
