"""Command line front end.

Every command writes a table of records as CSV or JSON. CSV output starts with
a ``#`` comment line holding the library version and the resolved run
configuration; JSON records carry the same information under ``version`` and
``config``. Failures print ``{"error": CODE, "message": ...}`` to stderr and
exit with status 1.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import MNIST_VARIANTS, Variant, load_mnist
from .errors import NNInfoError
from .kernel import ArchSpec
from .linalg import DEFAULT_RESIDUAL_TOL, cholesky, inverse_from_cholesky, log_det, normalized_det_root
from .orthant import DEFAULT_SAMPLES, LN2, ORACLE_MAX_N, estimate_c0, orthant_oracle
from .pac_bayes import DEFAULT_DELTA, realisable_bound, symmetry_info_bound
from .pipeline import (
    AGGREGATE_FIELDS,
    DEFAULT_DEPTH,
    DEFAULT_SEEDS,
    NATS_FIELDS,
    SWEEP_FIELDS,
    SyntheticSpec,
    aggregate,
    bound_consistent,
    dataset_kernel,
    equicorrelation,
    info_row,
    make_dataset,
    sweep,
)

log = logging.getLogger("nninfo")

INFO_FIELDS = SWEEP_FIELDS + ("c0_per_sample", "info_upper_display", "inverse_residual")
BOUND_FIELDS = SWEEP_FIELDS + ("delta", "c0_bound_within_c1")
INJECTED_FIELDS = ("n", "delta", "info_nats", "raw_bound", "error_bound", "vacuous")
ORACLE_FIELDS = (
    "source", "n", "seed", "samples", "trials", "c0_nats",
    "estimator_p", "estimator_stderr", "oracle_p", "oracle_stderr",
    "combined_stderr", "agree", "wall_ms",
)
SYMMETRY_FIELDS = ("dims", "weight_bits", "num_weights", "symmetry_nats", "c0_nats", "c0_stderr", "n")
KERNEL_FIELDS = (
    "variant", "n", "seed", "depth", "offdiag_min", "offdiag_mean", "offdiag_max",
    "log_det", "det_root", "min_eigenvalue", "inverse_residual",
)

# fields that hold information quantities and follow --units
UNIT_FIELDS = set(NATS_FIELDS) | {"info_upper_display", "info_nats", "symmetry_nats"}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _variant_list(text):
    try:
        return [Variant(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser():
    p = argparse.ArgumentParser(prog="nninfo", description="Information content and PAC-Bayes bounds for infinitely wide relu networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    d = common.add_argument_group("dataset")
    d.add_argument("--variant", type=Variant, default=Variant.DECIMAL_DIGITS, choices=list(Variant),
                   metavar="{" + ",".join(v.value for v in Variant) + "}")
    d.add_argument("--mnist-images", type=Path)
    d.add_argument("--mnist-labels", type=Path)
    d.add_argument("--n", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--input-dim", type=int, default=784, help="synthetic variant only")
    d.add_argument("--intra-cos", type=float, default=0.5, help="synthetic variant only")
    m = common.add_argument_group("model")
    m.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    m.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    m.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    m.add_argument("--jitter", type=float, default=0.0, help="add jitter*I to the kernel (off by default)")
    m.add_argument("--tol", type=float, default=DEFAULT_RESIDUAL_TOL, help="inverse residual gate")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--units", choices=("nats", "bits"), default="nats")
    o.add_argument("--out", type=Path, help="output file (default stdout)")
    o.add_argument("-v", "--verbose", action="store_true")

    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="estimate C0 and C1 for one dataset")

    b = sub.add_parser("bound", parents=[common], help="PAC-Bayes error bounds from C0 and C1")
    b.add_argument("--info", type=float, help="use this many nats instead of estimating from data")

    s = sub.add_parser("sweep", parents=[common], help="grid over variants, n and seeds")
    s.add_argument("--n-list", type=_int_list, default=[100, 200, 500])
    s.add_argument("--seeds", type=_int_list, default=list(DEFAULT_SEEDS))
    s.add_argument("--variants", type=_variant_list, default=list(MNIST_VARIANTS))
    s.add_argument("--agg-out", type=Path, help="aggregate table (default: <out>.agg<suffix>)")

    r = sub.add_parser("oracle", parents=[common], help="compare the estimator with rejection sampling")
    r.add_argument("--rho", type=float, help="use an n x n equicorrelated matrix instead of a dataset")
    r.add_argument("--labels", help="sign pattern such as '+-+' (with --rho; default all +)")
    r.add_argument("--trials", type=int, default=1_000_000)

    y = sub.add_parser("symmetry", parents=[common], help="symmetry-counting information bound")
    y.add_argument("--widths", type=_int_list, required=True, help="hidden widths d_1..d_{L-1}")
    y.add_argument("--weight-bits", type=int, default=32)
    y.add_argument("--with-c0", action="store_true", help="also estimate C0 on the dataset")

    k = sub.add_parser("kernel", parents=[common], help="summarise (and optionally save) the NNGP kernel")
    k.add_argument("--matrix-out", type=Path, help="write the full matrix as .npy or delimited text")
    return p


def resolved_config(args):
    cfg = {}
    for key, val in sorted(vars(args).items()):
        if isinstance(val, Path):
            val = str(val)
        elif isinstance(val, Variant):
            val = val.value
        elif isinstance(val, list):
            val = [v.value if isinstance(v, Variant) else v for v in val]
        cfg[key] = val
    return cfg


def _load_raw(args, variants):
    if not any(Variant(v) in MNIST_VARIANTS for v in variants):
        return None
    for path in (args.mnist_images, args.mnist_labels):
        if path is None or not path.is_file():
            raise CliError("DATASET_NOT_FOUND", f"MNIST IDX file not found: {path}")
    return load_mnist(args.mnist_images, args.mnist_labels)


def _synthetic(args):
    return SyntheticSpec(input_dim=args.input_dim, intra_class_cos=args.intra_cos)


def _model_kw(args):
    return dict(depth=args.depth, samples=args.samples, delta=args.delta, jitter=args.jitter,
                tol=args.tol, synthetic=_synthetic(args))


def _check_common(args):
    if not 0.0 < args.delta < 1.0:
        raise CliError("INVALID_ARGUMENT", f"--delta must lie in (0, 1), got {args.delta}")
    if args.samples < 2:
        raise CliError("INVALID_ARGUMENT", f"--samples must be >= 2, got {args.samples}")
    if args.jitter < 0:
        raise CliError("INVALID_ARGUMENT", "--jitter must be non-negative")


def cmd_info(args):
    if args.n < 2:
        raise CliError("INVALID_N", f"--n must be >= 2 for a certified record, got {args.n}")
    raw = _load_raw(args, [args.variant])
    row, est = info_row(args.variant, args.n, args.seed, raw, **_model_kw(args))
    row["c0_per_sample"] = est.c0_per_sample
    row["info_upper_display"] = est.info_upper_display
    row["inverse_residual"] = est.inverse_residual
    return INFO_FIELDS, [row]


def cmd_bound(args):
    if args.n < 2:
        raise CliError("INVALID_N", f"a generalisation bound needs n >= 2, got {args.n}")
    if args.info is not None:
        b = realisable_bound(args.info, args.n, args.delta)
        return INJECTED_FIELDS, [{
            "n": b.n, "delta": b.delta, "info_nats": b.info_nats,
            "raw_bound": b.raw_bound, "error_bound": b.error_bound, "vacuous": b.vacuous,
        }]
    raw = _load_raw(args, [args.variant])
    row, _ = info_row(args.variant, args.n, args.seed, raw, **_model_kw(args))
    row["delta"] = args.delta
    row["c0_bound_within_c1"] = bound_consistent(row)
    if not row["c0_bound_within_c1"]:
        log.warning("C0-based bound exceeds the C1-based bound by more than 3 standard errors")
    return BOUND_FIELDS, [row]


def cmd_sweep(args):
    n_list = args.n_list
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])) or min(n_list) < 2:
        raise CliError("INVALID_SWEEP", f"--n-list must be non-empty, strictly increasing and >= 2, got {n_list}")
    if not args.seeds:
        raise CliError("INVALID_SWEEP", "--seeds must be non-empty")
    if not args.variants:
        raise CliError("INVALID_SWEEP", "--variants must be non-empty")
    raw = _load_raw(args, args.variants)
    rows = sweep(args.variants, n_list, args.seeds, raw, **_model_kw(args))
    return SWEEP_FIELDS, rows


def cmd_oracle(args):
    t0 = time.perf_counter()
    if args.rho is not None:
        if args.n > ORACLE_MAX_N:
            raise CliError("N_TOO_LARGE", f"oracle supports n <= {ORACLE_MAX_N}, got {args.n}")
        sigma = equicorrelation(args.n, args.rho)
        pattern = args.labels or "+" * args.n
        if len(pattern) != args.n or set(pattern) - {"+", "-"}:
            raise CliError("INVALID_ARGUMENT", f"--labels must be {args.n} characters of '+' or '-'")
        labels = np.array([1 if ch == "+" else -1 for ch in pattern])
        source = f"equicorrelated(rho={args.rho:g})"
    else:
        if args.n > ORACLE_MAX_N:
            raise CliError("N_TOO_LARGE", f"oracle supports n <= {ORACLE_MAX_N}, got {args.n}")
        raw = _load_raw(args, [args.variant])
        ds = make_dataset(args.variant, args.n, args.seed, raw, _synthetic(args))
        sigma, labels = dataset_kernel(ds, args.depth, args.jitter), ds.labels
        source = Variant(args.variant).value
    est = estimate_c0(sigma, labels, args.samples, args.seed, args.tol)
    p_oracle, se_oracle = orthant_oracle(sigma, labels, args.trials, args.seed)
    p_est = est.orthant_probability
    se_est = p_est * est.c0_std_error
    combined = math.hypot(se_est, se_oracle)
    return ORACLE_FIELDS, [{
        "source": source, "n": args.n, "seed": args.seed, "samples": args.samples, "trials": args.trials,
        "c0_nats": est.c0_nats, "estimator_p": p_est, "estimator_stderr": se_est,
        "oracle_p": p_oracle, "oracle_stderr": se_oracle, "combined_stderr": combined,
        "agree": abs(p_est - p_oracle) <= 3.0 * combined,
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }]


def cmd_symmetry(args):
    if args.weight_bits < 1:
        raise CliError("INVALID_ARGUMENT", f"--weight-bits must be >= 1, got {args.weight_bits}")
    arch = ArchSpec(depth=len(args.widths) + 1, input_dim=args.input_dim, widths=args.widths, weight_bits=args.weight_bits)
    dims = arch.dims
    row = {
        "dims": "-".join(str(x) for x in dims),
        "weight_bits": arch.weight_bits,
        "num_weights": sum(dims[i] * dims[i - 1] for i in range(1, len(dims))),
        "symmetry_nats": symmetry_info_bound(arch),
        "c0_nats": "", "c0_stderr": "", "n": "",
    }
    if args.with_c0:
        raw = _load_raw(args, [args.variant])
        ds = make_dataset(args.variant, args.n, args.seed, raw, _synthetic(args))
        if ds.input_dim != arch.input_dim:
            raise CliError("INVALID_ARGUMENT", f"dataset has d0={ds.input_dim} but --input-dim is {arch.input_dim}")
        est = estimate_c0(dataset_kernel(ds, arch.depth, args.jitter), ds.labels, args.samples, args.seed, args.tol)
        row.update(c0_nats=est.c0_nats, c0_stderr=est.c0_std_error, n=args.n)
    return SYMMETRY_FIELDS, [row]


def cmd_kernel(args):
    raw = _load_raw(args, [args.variant])
    ds = make_dataset(args.variant, args.n, args.seed, raw, _synthetic(args))
    sigma = dataset_kernel(ds, args.depth, args.jitter)
    f = cholesky(sigma)
    inverse_from_cholesky(f)
    off = sigma[~np.eye(ds.n, dtype=bool)]
    if args.matrix_out is not None:
        if args.matrix_out.suffix == ".npy":
            np.save(args.matrix_out, sigma)
        else:
            np.savetxt(args.matrix_out, sigma, delimiter=",", fmt="%.17g")
    return KERNEL_FIELDS, [{
        "variant": Variant(args.variant).value, "n": ds.n, "seed": args.seed, "depth": args.depth,
        "offdiag_min": float(off.min()) if off.size else "",
        "offdiag_mean": float(off.mean()) if off.size else "",
        "offdiag_max": float(off.max()) if off.size else "",
        "log_det": log_det(f), "det_root": normalized_det_root(f),
        "min_eigenvalue": float(np.linalg.eigvalsh(sigma)[0]),
        "inverse_residual": f.inverse_residual,
    }]


COMMANDS = {
    "info": cmd_info,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "symmetry": cmd_symmetry,
    "kernel": cmd_kernel,
}


def convert_units(rows, units):
    if units == "nats":
        return rows
    out = []
    for r in rows:
        r = dict(r)
        for k in UNIT_FIELDS & r.keys():
            if isinstance(r[k], float):
                r[k] = r[k] / LN2
        out.append(r)
    return out


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(rows, fields, fmt, config):
    """Serialise records; CSV and JSON carry identical values."""
    if fmt == "json":
        records = [{**{k: r[k] for k in fields}, "version": __version__, "config": config} for r in rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# nninfo {__version__} config={json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r[k]) for k in fields])
    return buf.getvalue()


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _error(code, message):
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = resolved_config(args)
    try:
        _check_common(args)
        fields, rows = COMMANDS[args.command](args)
        rows = convert_units(rows, args.units)
        _write(render(rows, fields, args.format, config), args.out)
        if args.command == "sweep":
            agg = aggregate(rows)
            agg_path = args.agg_out
            if agg_path is None and args.out is not None:
                agg_path = args.out.with_name(f"{args.out.stem}.agg{args.out.suffix}")
            if agg_path is not None:
                _write(render(agg, AGGREGATE_FIELDS, args.format, config), agg_path)
            for a in agg:
                log.info("%s n=%d: C0 mean %.3f [%.3f, %.3f]", a["variant"], a["n"], a["c0_mean"], a["c0_min"], a["c0_max"])
    except CliError as exc:
        return _error(exc.code, str(exc))
    except FileNotFoundError as exc:
        return _error("DATASET_NOT_FOUND", str(exc))
    except NNInfoError as exc:
        return _error(exc.code, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
