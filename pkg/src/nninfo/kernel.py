"""Infinite-width NNGP kernel of a depth-L relu MLP (compositional arccosine kernel)."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgument, ZeroInputRow

CLAMP_BAND = 1e-9
ZERO_ROW_NORM = 1e-12
NORM_RTOL = 1e-6


@dataclass(frozen=True)
class ArchSpec:
    """MLP shape with input dimension ``input_dim`` and a single output.

    Only ``depth`` matters to the kernel. ``widths`` (hidden sizes
    d_1..d_{L-1}) and ``weight_bits`` are used by the symmetry-counting bound
    alone and may be left empty for kernel work.
    """

    depth: int
    input_dim: int
    widths: tuple = ()
    weight_bits: int = 32

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.depth < 2:
            raise InvalidArgument(f"depth must be >= 2, got {self.depth}")
        if self.input_dim < 1:
            raise InvalidArgument(f"input_dim must be >= 1, got {self.input_dim}")
        if any(w < 1 for w in self.widths):
            raise InvalidArgument(f"hidden widths must be >= 1, got {self.widths}")
        if self.widths and len(self.widths) != self.depth - 1:
            raise InvalidArgument(
                f"expected {self.depth - 1} hidden widths for depth {self.depth}, got {len(self.widths)}"
            )
        if self.weight_bits < 1:
            raise InvalidArgument(f"weight_bits must be >= 1, got {self.weight_bits}")

    @property
    def dims(self):
        """Layer sizes (d_0, d_1, ..., d_L) with d_L = 1."""
        if not self.widths:
            raise InvalidArgument("hidden widths are not specified")
        return (self.input_dim, *self.widths, 1)


def arccos_step(t):
    """One layer of the relu arccosine map.

    h(t) = (sqrt(1 - t^2) + t * (pi - arccos t)) / pi

    Inputs within ``CLAMP_BAND`` of [-1, 1] are clamped; anything further out
    means the upstream inputs were not normalised and raises DomainError.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(~np.isfinite(t)) or np.any(np.abs(t) > 1.0 + CLAMP_BAND):
        raise DomainError("cosine similarity outside [-1, 1]; inputs are not normalised")
    t = np.clip(t, -1.0, 1.0)
    out = (np.sqrt(1.0 - t * t) + t * (np.pi - np.arccos(t))) / np.pi
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def normalize_inputs(raw):
    """Rescale each row of ``raw`` to Euclidean norm ``sqrt(d0)``."""
    X = np.asarray(raw, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise InvalidArgument(f"inputs must be a 2-d array, got shape {X.shape}")
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(norms < ZERO_ROW_NORM)
    if bad.size:
        raise ZeroInputRow(f"row {int(bad[0])} has zero norm and cannot be normalised")
    return X * (np.sqrt(X.shape[1]) / norms)[:, None]


def check_normalized(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgument(f"inputs must be a 2-d array, got shape {X.shape}")
    norms = np.linalg.norm(X, axis=1)
    target = np.sqrt(X.shape[1])
    if not np.allclose(norms, target, rtol=NORM_RTOL, atol=0.0):
        raise InvalidArgument(f"input rows must have norm sqrt(d0) = {target:.6g}")
    return X


def kernel_matrix(X, depth, kernel_map=arccos_step):
    """NNGP covariance for normalised inputs ``X`` (n x d0).

    Entry (i, j) is ``kernel_map`` applied ``depth - 1`` times to the cosine
    ``x_i . x_j / d0``. The diagonal is set to 1 directly since h(1) = 1, and
    only the upper triangle is computed before mirroring.
    """
    if isinstance(depth, ArchSpec):
        depth = depth.depth
    if depth < 2:
        raise InvalidArgument(f"depth must be >= 2, got {depth}")
    X = check_normalized(X)
    n, d0 = X.shape
    iu = np.triu_indices(n, 1)
    cos = (X @ X.T)[iu] / d0
    for _ in range(depth - 1):
        cos = kernel_map(cos)
    sigma = np.eye(n)
    sigma[iu] = cos
    sigma[(iu[1], iu[0])] = cos
    return sigma
