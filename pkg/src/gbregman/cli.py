"""Command-line front end.

Subcommands print JSON (keys sorted) on stdout and diagnostics on stderr.

Exit codes: 0 success, 1 a verified identity failed, 2 bad flags or a domain
error, 3 dimension mismatch, 4 left side without conjugate support, 5 more
clusters than points.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import catalog, centroid, divergence, identities
from .convex_core import validate_points
from .errors import (
    ClusterSizeError,
    DimensionMismatchError,
    GBregmanError,
    UnsupportedError,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DIM, EXIT_UNSUPPORTED, EXIT_K = 0, 1, 2, 3, 4, 5


class UsageError(GBregmanError):
    pass


@dataclass
class Dataset:
    points: np.ndarray
    labels: Optional[list]
    source_path: str


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv(path: str) -> Dataset:
    """One point per row; a leading row whose first cell is not numeric is a header."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row]
            if not any(cells):
                continue
            rows.append(cells)
    if rows and not _is_float(rows[0][0]):
        rows = rows[1:]
    if not rows:
        raise UsageError(f"{path}: no data rows")
    dims = {len(r) for r in rows}
    if len(dims) != 1:
        raise DimensionMismatchError(f"{path}: rows have differing lengths {sorted(dims)}")
    try:
        values = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    return Dataset(validate_points(values), None, path)


def _parse_row(text: str) -> np.ndarray:
    try:
        return np.array([float(c) for c in text.split(",") if c.strip()], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"cannot parse weights {text!r}: {exc}") from None


def _entry(args) -> catalog.CatalogEntry:
    if args.divergence == "alpha" and args.family_index is None:
        raise UsageError("--divergence alpha requires --family-index")
    return catalog.get_entry(args.divergence, args.family_index)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _floats(x):
    return [float(v) for v in np.ravel(x)]


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    entry = _entry(args)
    p = read_csv(args.p).points
    q = read_csv(args.q).points
    if p.shape[1] != q.shape[1]:
        raise DimensionMismatchError(f"p has dimension {p.shape[1]}, q has {q.shape[1]}")
    if p.shape[0] != q.shape[0] and 1 not in (p.shape[0], q.shape[0]):
        raise DimensionMismatchError(f"{p.shape[0]} p rows cannot pair with {q.shape[0]} q rows")
    n = max(p.shape[0], q.shape[0])
    p = np.broadcast_to(p, (n, p.shape[1]))
    q = np.broadcast_to(q, (n, q.shape[1]))
    spec = entry.spec
    for pi, qi in zip(p, q):
        out = {"divergence": args.divergence, "form": args.form}
        if args.family_index is not None:
            out["family_index"] = float(args.family_index)
        if args.form == "bregman":
            value = divergence.g_bregman(spec, pi, qi)
        elif args.form == "sym":
            value = divergence.g_bregman_sym(spec, pi, qi)
        else:
            skew = 0.5 if args.skew is None else args.skew
            value = divergence.g_skew_jensen(spec, pi, qi, skew)
            out["skew"] = float(skew)
        out["value"] = float(value)
        _emit(out)
    return EXIT_OK


def cmd_centroid(args) -> int:
    entry = _entry(args)
    pts = read_csv(args.input).points
    w = None if args.weights is None else _parse_row(args.weights)
    if w is not None:
        w = divergence.check_weights(w, pts.shape[0])
    if args.side == "left" and not entry.spec.generator.has_conjugate:
        raise UnsupportedError(f"{entry.label}: left centroids need a conjugate generator")
    c = centroid.centroid(entry.spec, pts, w, args.side)
    obj = centroid.weighted_objective(entry.spec, pts, w, c, args.side)
    bound = centroid.jensen_bound(entry.spec, pts, w, args.side)
    _emit({"centroid": _floats(c), "objective": obj, "jensen_bound": bound, "residual": abs(obj - bound)})
    return EXIT_OK


def cmd_cluster(args) -> int:
    entry = _entry(args)
    data = read_csv(args.input).points
    if args.side == "left" and not entry.spec.generator.has_conjugate:
        raise UnsupportedError(f"{entry.label}: left-side clustering needs a conjugate generator")
    try:
        cfg = centroid.ClusterConfig(
            k=args.k, max_iters=args.max_iters, tol=args.tol, seed=args.seed, side=args.side
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = centroid.kmeans(entry.spec, data, cfg)
    _emit(result.to_dict())
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cfg = identities.TrialConfig(trials=args.trials, dim=args.dim, seed=args.seed)
    except GBregmanError as exc:
        raise UsageError(str(exc)) from None
    keys = ["all"] if args.divergence == "all" else [args.divergence]
    entries = catalog.expand_keys(keys, args.family_index)
    suites = None if args.suite == "all" else [args.suite]
    reports = identities.run_all(entries, cfg, suites)
    _emit([r.to_dict() for r in reports])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbregman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def divergence_flags(p, allow_all=False):
        choices = list(catalog.KEYS) + (["all"] if allow_all else [])
        p.add_argument("--divergence", required=not allow_all, default="all" if allow_all else None, choices=choices)
        p.add_argument("--family-index", type=float, default=None, help="alpha-family index (not 0 or 1)")

    p = sub.add_parser("eval", help="evaluate a divergence row by row")
    divergence_flags(p)
    p.add_argument("--p", required=True, help="CSV of first arguments")
    p.add_argument("--q", required=True, help="CSV of second arguments")
    p.add_argument("--skew", type=float, default=None, help="skew weight in (0, 1) for --form jensen")
    p.add_argument("--form", choices=["bregman", "sym", "jensen"], default="bregman")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("centroid", help="weighted right or left centroid")
    divergence_flags(p)
    p.add_argument("--input", required=True)
    p.add_argument("--weights", default=None, help="comma-separated weights summing to 1")
    p.add_argument("--side", choices=["right", "left"], default="right")
    p.set_defaults(func=cmd_centroid)

    p = sub.add_parser("cluster", help="g-Bregman k-means")
    divergence_flags(p)
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--side", choices=["right", "left"], default="right")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("verify", help="randomized identity and inequality checks")
    p.add_argument("--suite", choices=["all", *identities.SUITES], default="all")
    divergence_flags(p, allow_all=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--dim", type=int, default=8)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DimensionMismatchError as exc:
        print(f"gbregman: {exc}", file=sys.stderr)
        return EXIT_DIM
    except UnsupportedError as exc:
        print(f"gbregman: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ClusterSizeError as exc:
        print(f"gbregman: {exc}", file=sys.stderr)
        return EXIT_K
    except (GBregmanError, ValueError, OSError) as exc:
        print(f"gbregman: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
