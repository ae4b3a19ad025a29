"""Dataset -> kernel -> information estimate -> certificate, one cell at a time."""

import math
import time
from dataclasses import dataclass

import numpy as np

from .data import MNIST_VARIANTS, Variant, build_dataset, synthetic_dataset
from .errors import InvalidArgument
from .kernel import kernel_matrix
from .linalg import DEFAULT_RESIDUAL_TOL, add_jitter
from .orthant import DEFAULT_SAMPLES, estimate_c0
from .pac_bayes import DEFAULT_DELTA, realisable_bound

DEFAULT_DEPTH = 7
DEFAULT_SEEDS = (0, 1, 2)

SWEEP_FIELDS = (
    "variant", "n", "seed", "depth", "samples",
    "c0_nats", "c0_stderr", "c1_nats", "info_upper_nats",
    "raw_bound_c0", "error_bound_c0", "raw_bound_c1", "error_bound_c1",
    "vacuous", "wall_ms",
)
NATS_FIELDS = ("c0_nats", "c0_stderr", "c1_nats", "info_upper_nats")

AGGREGATE_FIELDS = (
    "variant", "n", "seeds",
    "c0_mean", "c0_min", "c0_max", "c0_per_sample_mean",
    "c1_mean", "c1_min", "c1_max",
    "error_bound_c0_mean", "error_bound_c0_min", "error_bound_c0_max",
    "error_bound_c1_mean", "error_bound_c1_min", "error_bound_c1_max",
    "vacuous_any", "wall_ms",
)


@dataclass(frozen=True)
class SyntheticSpec:
    input_dim: int = 784
    intra_class_cos: float = 0.5


def make_dataset(variant, n, seed, raw=None, synthetic=SyntheticSpec()):
    variant = Variant(variant)
    if variant is Variant.SYNTHETIC:
        return synthetic_dataset(n, synthetic.input_dim, synthetic.intra_class_cos, seed)
    if raw is None:
        raise InvalidArgument(f"variant {variant.value} needs MNIST images and labels")
    return build_dataset(raw, variant, n, seed)


def dataset_kernel(dataset, depth=DEFAULT_DEPTH, jitter=0.0):
    return add_jitter(kernel_matrix(dataset.inputs, depth), jitter)


def info_row(variant, n, seed, raw=None, depth=DEFAULT_DEPTH, samples=DEFAULT_SAMPLES,
             delta=DEFAULT_DELTA, jitter=0.0, tol=DEFAULT_RESIDUAL_TOL, synthetic=SyntheticSpec()):
    """Run one (variant, n, seed) cell and return ``(row, estimate)``.

    The seed drives both the training-set draw and the Monte-Carlo stream.
    """
    t0 = time.perf_counter()
    ds = make_dataset(variant, n, seed, raw, synthetic)
    sigma = dataset_kernel(ds, depth, jitter)
    est = estimate_c0(sigma, ds.labels, samples, seed, tol)
    b0 = realisable_bound(est.c0_nats, n, delta)
    b1 = realisable_bound(est.info_upper_nats, n, delta)
    row = {
        "variant": Variant(variant).value,
        "n": int(n),
        "seed": int(seed),
        "depth": int(depth),
        "samples": int(samples),
        "c0_nats": est.c0_nats,
        "c0_stderr": est.c0_std_error,
        "c1_nats": est.c1_nats,
        "info_upper_nats": est.info_upper_nats,
        "raw_bound_c0": b0.raw_bound,
        "error_bound_c0": b0.error_bound,
        "raw_bound_c1": b1.raw_bound,
        "error_bound_c1": b1.error_bound,
        "vacuous": b0.vacuous,
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }
    return row, est


def sweep(variants, n_list, seeds, raw=None, **kw):
    """All (variant, n, seed) cells, ordered by variant, then n, then seed."""
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidArgument("n_list must be non-empty and strictly increasing")
    if not seeds:
        raise InvalidArgument("seed list must be non-empty")
    rows = []
    for v in variants:
        for n in n_list:
            for s in seeds:
                rows.append(info_row(v, n, s, raw, **kw)[0])
    return rows


def aggregate(rows):
    """Mean and range over seeds for each (variant, n), in first-seen order."""
    groups = {}
    for r in rows:
        groups.setdefault((r["variant"], r["n"]), []).append(r)
    out = []
    for (variant, n), rs in groups.items():
        agg = {"variant": variant, "n": n, "seeds": len(rs)}
        for key, src in (("c0", "c0_nats"), ("c1", "c1_nats"),
                         ("error_bound_c0", "error_bound_c0"), ("error_bound_c1", "error_bound_c1")):
            vals = np.array([r[src] for r in rs])
            agg[f"{key}_mean"] = float(vals.mean())
            agg[f"{key}_min"] = float(vals.min())
            agg[f"{key}_max"] = float(vals.max())
        agg["c0_per_sample_mean"] = agg["c0_mean"] / n
        agg["vacuous_any"] = any(r["vacuous"] for r in rs)
        agg["wall_ms"] = float(sum(r["wall_ms"] for r in rs))
        out.append({k: agg[k] for k in AGGREGATE_FIELDS})
    return out


def bound_consistent(row, sigmas=3.0):
    """C0-based raw bound is no larger than the C1-based one, up to MC error."""
    slack = sigmas * row["c0_stderr"] / (row["n"] - 1)
    return row["raw_bound_c0"] <= row["raw_bound_c1"] + slack


def equicorrelation(n, rho):
    """Unit-diagonal matrix with every off-diagonal entry equal to ``rho``."""
    if n > 1 and not -1.0 / (n - 1) < rho < 1.0:
        raise InvalidArgument(f"rho={rho} does not give a positive definite {n}x{n} matrix")
    sigma = np.full((n, n), float(rho))
    np.fill_diagonal(sigma, 1.0)
    return sigma


def bivariate_orthant(rho, same_sign=True):
    """Closed-form P[sign(z) = c] for a standard bivariate normal."""
    p = 0.25 + math.asin(rho) / (2.0 * math.pi)
    return p if same_sign else 0.5 - p

