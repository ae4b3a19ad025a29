"""Shared fixtures-by-function and independent oracles for the test suite."""

import math
import os
from pathlib import Path

import numpy as np
from scipy import integrate

DATA = Path(__file__).parent / "data"


def mnist_paths():
    images = os.environ.get("NNINFO_MNIST_IMAGES", DATA / "mnist5k-images-idx3-ubyte.gz")
    labels = os.environ.get("NNINFO_MNIST_LABELS", DATA / "mnist5k-labels-idx1-ubyte.gz")
    return Path(images), Path(labels)


def random_correlation(n, g, extra=3):
    """Unit-diagonal SPD matrix from a normalised Wishart draw."""
    G = g.standard_normal((n, n + extra))
    W = G @ G.T
    d = 1.0 / np.sqrt(np.diag(W))
    S = W * np.outer(d, d)
    S = 0.5 * (S + S.T)
    np.fill_diagonal(S, 1.0)
    return S


def bivariate_quadrant_quadrature(rho, signs=(1, 1)):
    """P[sign(z) = signs] for a standard bivariate normal, by 2-d quadrature."""
    det = 1.0 - rho * rho

    def density(y, x):
        return math.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * det)) / (2 * math.pi * math.sqrt(det))

    sx, sy = signs
    xlo, xhi = (0.0, np.inf) if sx > 0 else (-np.inf, 0.0)
    ylo, yhi = (0.0, np.inf) if sy > 0 else (-np.inf, 0.0)
    val, _ = integrate.dblquad(density, xlo, xhi, ylo, yhi, epsabs=1e-12, epsrel=1e-10)
    return val


def relu_moment_quadrature(t):
    """E[phi(u) phi(v)] with phi(z) = sqrt(2) max(0, z) and corr(u, v) = t, |t| < 1."""
    det = 1.0 - t * t

    def f(v, u):
        return 2.0 * u * v * math.exp(-(u * u - 2 * t * u * v + v * v) / (2 * det)) / (2 * math.pi * math.sqrt(det))

    val, _ = integrate.dblquad(f, 0.0, np.inf, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11)
    return val


def h_scalar(t):
    """Scalar arccosine map written out with the math module only."""
    return (math.sqrt(1.0 - t * t) + t * (math.pi - math.acos(t))) / math.pi
