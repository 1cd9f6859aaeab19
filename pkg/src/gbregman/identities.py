"""Randomized verification of the g-divergence identities and inequalities.

Every check draws its points from a per-trial generator seeded by
``(seed, crc32(check name), trial index)``, so a single trial can be
replayed in isolation and two runs with the same seed agree bit for bit.

Identity residuals are ``|lhs - rhs| / (1 + |reference|)``.  For inequalities
the residual is the signed violation ``-gap``; a trial fails when it exceeds
:data:`GAP_FLOOR`.

In the law of cosines and the four-point identity the inner-product
correction terms use :func:`~gbregman.convex_core.reference_grad`, not
``generator.grad``.  With one gradient on both sides those identities hold
for *any* vector field, so a wrong closed-form gradient would go unnoticed.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .catalog import (
    CatalogEntry,
    generalized_alpha,
    get_entry,
    hellinger_sq,
    neyman_chi2,
    pearson_chi2,
)
from .convex_core import GDivergenceSpec, reference_grad
from .divergence import (
    bregman_raw,
    bregman_sym_raw,
    multivariate_jensen_raw,
    skew_jensen_raw,
)
from .errors import DomainError, GBregmanError, ResampleExhausted

GAP_FLOOR = 1e-12
ORACLE_TOL = 1e-10
LIMIT_TOL = 1e-3
LIMIT_EPS = 1e-4
CENTROID_TOL = 1e-10
LEFT_CENTROID_TOL = 1e-9
SKEW_GRID = (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
MAX_RESAMPLES = 1000

SUITES = (
    "cosines",
    "four-point",
    "parallelogram",
    "division",
    "bj",
    "pbj",
    "oracle",
    "limits",
    "duality",
    "centroid",
)


@dataclass(frozen=True)
class TrialConfig:
    trials: int = 1000
    dim: int = 8
    seed: int = 0
    sample_low: float = 0.1
    sample_high: float = 10.0
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if self.dim < 1:
            raise DomainError("dim must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not 0 < self.sample_low < self.sample_high:
            raise DomainError("need 0 < sample_low < sample_high")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")


@dataclass
class IdentityReport:
    identity_name: str
    divergence: str
    trials: int
    max_residual: float
    mean_residual: float
    failures: int
    worst_case: Optional[dict] = None
    kind: str = "identity"
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.error is None

    def to_dict(self) -> dict:
        out = {
            "identity_name": self.identity_name,
            "divergence": self.divergence,
            "trials": self.trials,
            "max_residual": _json_float(self.max_residual),
            "mean_residual": _json_float(self.mean_residual),
            "failures": self.failures,
            "kind": self.kind,
            "pass": self.passed,
        }
        if self.worst_case is not None:
            out["worst_case"] = self.worst_case
        if self.error is not None:
            out["error"] = self.error
        return out


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _serial(x):
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 0:
        return _json_float(a)
    return [_serial(v) for v in a]


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


def trial_rng(cfg: TrialConfig, check: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, zlib.crc32(check.encode()), trial])


def _sample(cfg: TrialConfig, check: str, count: int, extra: int = 0):
    """Per-trial points ``(T, count, d)`` and ``extra`` uniform(0, 1) draws ``(T, extra)``."""
    pts = np.empty((cfg.trials, count, cfg.dim))
    u = np.empty((cfg.trials, extra))
    for t in range(cfg.trials):
        rng = trial_rng(cfg, check, t)
        pts[t] = rng.uniform(cfg.sample_low, cfg.sample_high, (count, cfg.dim))
        u[t] = rng.uniform(0.0, 1.0, extra)
    return pts, u


def _valid_image(spec: GDivergenceSpec, gs) -> bool:
    link = spec.link
    if not np.all(np.isfinite(gs)) or not np.all(link.image(gs)):
        return False
    with np.errstate(all="ignore"):
        s = link.backward(gs)
    return bool(np.all(np.isfinite(s)) and np.all(s > 0) and np.all(spec.generator.domain(gs)))


def sample_parallelograms(spec: GDivergenceSpec, cfg: TrialConfig, check: str) -> np.ndarray:
    """Quadruples ``(p, q, r, s)`` with ``g(p) + g(r) = g(q) + g(s)``; shape ``(T, 4, d)``.

    ``s`` is solved from the other three; triples whose ``s`` would leave the
    domain are redrawn from the same trial stream.
    """
    out = np.empty((cfg.trials, 4, cfg.dim))
    for t in range(cfg.trials):
        rng = trial_rng(cfg, check, t)
        for _ in range(MAX_RESAMPLES):
            p, q, r = rng.uniform(cfg.sample_low, cfg.sample_high, (3, cfg.dim))
            gs = spec.link.apply(p) + spec.link.apply(r) - spec.link.apply(q)
            if _valid_image(spec, gs):
                out[t] = (p, q, r, spec.link.backward(gs))
                break
        else:
            raise ResampleExhausted(
                f"{MAX_RESAMPLES} consecutive parallelogram constructions left the domain"
            )
    return out


def _inner(a, b):
    return np.sum(a * b, axis=-1)


def _report(name, label, residual, failed, payload: Callable[[int], dict], trials, kind="identity"):
    residual = np.asarray(residual, dtype=np.float64)
    failed = np.asarray(failed, dtype=bool)
    worst = int(np.argmax(residual))  # first index among ties
    wc = {k: _serial(v) for k, v in payload(worst).items()}
    wc["trial"] = worst
    return IdentityReport(
        identity_name=name,
        divergence=label,
        trials=trials,
        max_residual=float(residual[worst]),
        mean_residual=float(np.mean(residual)),
        failures=int(np.count_nonzero(failed)),
        worst_case=wc,
        kind=kind,
    )


def _label(spec, label):
    return label if label is not None else spec.name


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------


def check_law_of_cosines(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    """Generalized law of cosines, plain and symmetric forms, on random triangles."""
    pts, _ = _sample(cfg, "cosines", 3)
    p, q, r = pts[:, 0], pts[:, 1], pts[:, 2]
    gen = spec.generator
    P, Q, R = spec.linked(p), spec.linked(q), spec.linked(r)
    dP, dQ, dR = (reference_grad(gen, X) for X in (P, Q, R))
    b_pq, _ = bregman_raw(gen, P, Q)
    b_pr, _ = bregman_raw(gen, P, R)
    b_rq, _ = bregman_raw(gen, R, Q)
    cross_p = _inner(P - R, dQ - dR)
    cross_q = _inner(Q - R, dP - dR)
    res = np.abs(b_pq - b_pr - b_rq + cross_p) / (1.0 + np.abs(b_pq))
    s_pq = bregman_sym_raw(gen, P, Q)
    s_pr = bregman_sym_raw(gen, P, R)
    s_rq = bregman_sym_raw(gen, R, Q)
    res_sym = np.abs(s_pq - s_pr - s_rq + cross_p + cross_q) / (1.0 + np.abs(s_pq))
    residual = np.maximum(res, res_sym)
    return _report(
        "law_of_cosines",
        _label(spec, label),
        residual,
        residual > cfg.rel_tol,
        lambda t: {"p": p[t], "q": q[t], "r": r[t]},
        cfg.trials,
    )


def check_four_point(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    pts, _ = _sample(cfg, "four-point", 4)
    p, q, r, s = (pts[:, i] for i in range(4))
    gen = spec.generator
    P, Q, R, S = (spec.linked(x) for x in (p, q, r, s))
    lhs = _inner(reference_grad(gen, R) - reference_grad(gen, S), P - Q)
    rhs = bregman_raw(gen, Q, R)[0] + bregman_raw(gen, P, S)[0] - bregman_raw(gen, P, R)[0] - bregman_raw(gen, Q, S)[0]
    residual = np.abs(lhs - rhs) / (1.0 + np.abs(lhs))
    return _report(
        "four_point",
        _label(spec, label),
        residual,
        residual > cfg.rel_tol,
        lambda t: {"p": p[t], "q": q[t], "r": r[t], "s": s[t]},
        cfg.trials,
    )


def _quad_sides(spec, quads):
    gen = spec.generator
    P, Q, R, S = (spec.linked(quads[:, i]) for i in range(4))
    sides = (
        bregman_sym_raw(gen, P, Q)
        + bregman_sym_raw(gen, Q, R)
        + bregman_sym_raw(gen, R, S)
        + bregman_sym_raw(gen, S, P)
    )
    return P, Q, R, S, sides


def check_parallelogram(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    quads = sample_parallelograms(spec, cfg, "parallelogram")
    P, Q, R, S, sides = _quad_sides(spec, quads)
    diagonals = bregman_sym_raw(spec.generator, P, R) + bregman_sym_raw(spec.generator, Q, S)
    residual = np.abs(sides - diagonals) / (1.0 + np.abs(diagonals))
    return _report(
        "parallelogram",
        _label(spec, label),
        residual,
        residual > cfg.rel_tol,
        lambda t: {"p": quads[t, 0], "q": quads[t, 1], "r": quads[t, 2], "s": quads[t, 3]},
        cfg.trials,
    )


def check_division_lemmas(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    """Division of a g-segment at ``r = g^-1((1-a) g(p) + a g(q))``, ``a`` in [0.05, 0.95]."""
    pts, u = _sample(cfg, "division", 2, extra=1)
    p, q = pts[:, 0], pts[:, 1]
    a = 0.05 + 0.9 * u[:, 0]
    gen = spec.generator
    P, Q = spec.linked(p), spec.linked(q)
    r = spec.link.invert((1.0 - a)[:, None] * P + a[:, None] * Q)
    R = spec.linked(r)
    B = lambda X, Y: bregman_raw(gen, X, Y)[0]  # noqa: E731
    Bs = lambda X, Y: bregman_sym_raw(gen, X, Y)  # noqa: E731
    b_pq, b_qp = B(P, Q), B(Q, P)
    fwd = np.abs(b_pq - B(P, R) - B(R, Q) - a / (1 - a) * Bs(R, Q)) / (1.0 + np.abs(b_pq))
    inv = np.abs(b_qp - B(R, P) - B(Q, R) - (1 - a) / a * Bs(R, P)) / (1.0 + np.abs(b_qp))
    s_pq = Bs(P, Q)
    geo = np.abs(s_pq - Bs(P, R) / a - Bs(R, Q) / (1 - a)) / (1.0 + np.abs(s_pq))
    residual = np.maximum(fwd, np.maximum(inv, geo))
    return _report(
        "division_lemmas",
        _label(spec, label),
        residual,
        residual > cfg.rel_tol,
        lambda t: {"p": p[t], "q": q[t], "a": a[t]},
        cfg.trials,
    )


# --------------------------------------------------------------------------
# inequalities
# --------------------------------------------------------------------------


def check_bj_inequality(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None, grid=SKEW_GRID):
    """Symmetric g-Bregman divergence dominates the scaled skew g-Jensen divergence."""
    pts, _ = _sample(cfg, "bj", 2)
    p, q = pts[:, 0], pts[:, 1]
    P, Q = spec.linked(p), spec.linked(q)
    sym = bregman_sym_raw(spec.generator, P, Q)
    gaps = np.stack([sym - skew_jensen_raw(spec.generator, P, Q, a)[0] for a in grid], axis=1)
    worst_a = np.argmin(gaps, axis=1)
    residual = -gaps[np.arange(cfg.trials), worst_a]
    return _report(
        "bj_inequality",
        _label(spec, label),
        residual,
        residual > GAP_FLOOR,
        lambda t: {"p": p[t], "q": q[t], "a": grid[worst_a[t]], "gap": -residual[t]},
        cfg.trials,
        kind="inequality",
    )


def check_parallelogram_bj(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    quads = sample_parallelograms(spec, cfg, "pbj")
    P, Q, R, S, sides = _quad_sides(spec, quads)
    U = np.stack([P, Q, R, S], axis=0)
    jensen, _ = multivariate_jensen_raw(spec.generator, U, np.full(4, 0.25))
    gap = sides / 8.0 - jensen
    residual = -gap
    return _report(
        "parallelogram_bj",
        _label(spec, label),
        residual,
        residual > GAP_FLOOR,
        lambda t: {"p": quads[t, 0], "q": quads[t, 1], "r": quads[t, 2], "s": quads[t, 3], "gap": gap[t]},
        cfg.trials,
        kind="inequality",
    )


# --------------------------------------------------------------------------
# cross-module checks
# --------------------------------------------------------------------------


def check_oracle(entry: CatalogEntry, cfg: TrialConfig = TrialConfig()):
    """g-forms against the entry's closed forms, relative error at most 1e-10."""
    spec = entry.spec
    pts, _ = _sample(cfg, "oracle", 2)
    p, q = pts[:, 0], pts[:, 1]
    gen = spec.generator
    P, Q = spec.linked(p), spec.linked(q)
    parts = []

    def rel(value, ref):
        return np.abs(value - ref) / (np.abs(ref) + 1e-300)

    if entry.oracle_forward is not None:
        parts.append(rel(bregman_raw(gen, P, Q)[0], entry.oracle_forward(p, q)))
    if entry.oracle_symmetric is not None:
        parts.append(rel(bregman_sym_raw(gen, P, Q), entry.oracle_symmetric(p, q)))
    if entry.oracle_skew_jensen is not None:
        skew = np.stack(
            [rel(skew_jensen_raw(gen, P, Q, a)[0], entry.oracle_skew_jensen(p, q, a)) for a in SKEW_GRID]
        )
        parts.append(np.max(skew, axis=0))
    fi = spec.family_index
    if fi == 0.5:
        parts.append(rel(0.5 * generalized_alpha(p, q, 0.5), hellinger_sq(p, q)))
    elif fi == 2.0:
        parts.append(rel(2.0 * generalized_alpha(p, q, 2.0), pearson_chi2(p, q)))
    elif fi == -1.0:
        parts.append(rel(2.0 * generalized_alpha(p, q, -1.0), neyman_chi2(p, q)))
    residual = np.max(np.stack(parts), axis=0)
    return _report(
        "oracle_equivalence",
        entry.label,
        residual,
        residual > ORACLE_TOL,
        lambda t: {"p": p[t], "q": q[t]},
        cfg.trials,
    )


def check_limits(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None, eps=LIMIT_EPS):
    """Scaled skew Jensen at ``a -> 0`` and ``a -> 1`` approaches the two Bregman orders."""
    pts, _ = _sample(cfg, "limits", 2)
    p, q = pts[:, 0], pts[:, 1]
    gen = spec.generator
    P, Q = spec.linked(p), spec.linked(q)
    b_qp, b_pq = bregman_raw(gen, Q, P)[0], bregman_raw(gen, P, Q)[0]
    low = np.abs(skew_jensen_raw(gen, P, Q, eps)[0] - b_qp) / (1.0 + np.abs(b_qp))
    high = np.abs(skew_jensen_raw(gen, P, Q, 1.0 - eps)[0] - b_pq) / (1.0 + np.abs(b_pq))
    residual = np.maximum(low, high)
    return _report(
        "limits",
        _label(spec, label),
        residual,
        residual > LIMIT_TOL,
        lambda t: {"p": p[t], "q": q[t]},
        cfg.trials,
    )


def check_duality(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None):
    """``B_F^g(q, p) = B_{F*}^{grad F o g}(p, q)``."""
    dual = spec.dual()
    pts, _ = _sample(cfg, "duality", 2)
    p, q = pts[:, 0], pts[:, 1]
    primal, _ = bregman_raw(spec.generator, spec.linked(q), spec.linked(p))
    mirrored, _ = bregman_raw(dual.generator, dual.linked(p), dual.linked(q))
    residual = np.abs(primal - mirrored) / (1.0 + np.abs(primal))
    return _report(
        "duality",
        _label(spec, label),
        residual,
        residual > cfg.rel_tol,
        lambda t: {"p": p[t], "q": q[t]},
        cfg.trials,
    )


def check_centroids(spec: GDivergenceSpec, cfg: TrialConfig = TrialConfig(), label=None, perturbations=20):
    """Centroid equality conditions on both sides, plus local optimality under perturbation.

    Instances have 1 to 6 points in at most 4 dimensions with Dirichlet weights;
    each centroid ``c`` is compared against ``c * (1 + delta)``,
    ``delta ~ U[-0.2, 0.2]`` per coordinate.
    """
    from .centroid import jensen_bound, left_centroid, right_centroid

    sides = ["right"] + (["left"] if spec.generator.has_conjugate else [])
    tol = {"right": CENTROID_TOL, "left": LEFT_CENTROID_TOL}
    gen = spec.generator
    residual = np.zeros(cfg.trials)
    failed = np.zeros(cfg.trials, dtype=bool)
    cases = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg, "centroid", t)
        n = int(rng.integers(1, 7))
        dim = int(rng.integers(1, min(cfg.dim, 4) + 1))
        pts = rng.uniform(cfg.sample_low, cfg.sample_high, (n, dim))
        w = rng.dirichlet(np.ones(n))
        w = w / w.sum()
        deltas = rng.uniform(-0.2, 0.2, (perturbations, dim))
        cases.append({"points": pts, "weights": w})
        u = spec.linked(pts)
        for side in sides:
            c = right_centroid(spec, pts, w) if side == "right" else left_centroid(spec, pts, w)
            cands = np.vstack([c, c * (1.0 + deltas)])
            v = spec.linked(cands)
            if side == "right":
                d, _ = bregman_raw(gen, u[None, :, :], v[:, None, :])
            else:
                d, _ = bregman_raw(gen, v[:, None, :], u[None, :, :])
            objs = d @ w
            bound = jensen_bound(spec, pts, w, side)
            res = abs(objs[0] - bound) / (1.0 + abs(bound))
            residual[t] = max(residual[t], res)
            if res > tol[side] or objs[1:].min() < objs[0] - GAP_FLOOR * (1.0 + abs(objs[0])):
                failed[t] = True
    return _report(
        "centroid",
        _label(spec, label),
        residual,
        failed,
        lambda t: cases[t],
        cfg.trials,
    )


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def _entry(x) -> CatalogEntry:
    return x if isinstance(x, CatalogEntry) else get_entry(x)


def _run_one(suite: str, entry: CatalogEntry, cfg: TrialConfig) -> list[IdentityReport]:
    spec, label = entry.spec, entry.label
    if suite == "cosines":
        return [check_law_of_cosines(spec, cfg, label)]
    if suite == "four-point":
        return [check_four_point(spec, cfg, label)]
    if suite == "parallelogram":
        return [check_parallelogram(spec, cfg, label)]
    if suite == "division":
        return [check_division_lemmas(spec, cfg, label)]
    if suite == "bj":
        return [check_bj_inequality(spec, cfg, label)]
    if suite == "pbj":
        return [check_parallelogram_bj(spec, cfg, label)]
    if suite == "oracle":
        return [check_oracle(entry, cfg)]
    if suite == "limits":
        return [check_limits(spec, cfg, label)]
    if suite == "duality":
        return [check_duality(spec, cfg, label)] if spec.generator.has_conjugate else []
    if suite == "centroid":
        return [check_centroids(spec, cfg, label)]
    raise ValueError(f"unknown suite {suite!r}")


def run_all(
    specs: Sequence,
    cfg: TrialConfig = TrialConfig(),
    suites: Optional[Iterable[str]] = None,
) -> list[IdentityReport]:
    """Run the selected suites (all by default) over catalog entries or keys.

    A check that raises is reported as a failed report carrying the error
    message; the remaining checks still run.
    """
    suites = list(SUITES if suites is None else suites)
    for s in suites:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}")
    reports = []
    for x in specs:
        entry = _entry(x)
        for suite in suites:
            try:
                reports.extend(_run_one(suite, entry, cfg))
            except (GBregmanError, ArithmeticError, ValueError) as exc:
                reports.append(
                    IdentityReport(
                        identity_name=suite,
                        divergence=entry.label,
                        trials=cfg.trials,
                        max_residual=float("nan"),
                        mean_residual=float("nan"),
                        failures=cfg.trials,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return reports
