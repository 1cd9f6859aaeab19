"""Centroids of the g-Bregman divergence and a Lloyd-style clusterer.

The right centroid (unknown in the second argument) is the quasi-arithmetic
mean ``g^-1(sum w g(p))``.  The left centroid is the same construction under
the dual link ``grad F o g``, which is why it needs a conjugate gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import kernels
from .convex_core import GDivergenceSpec, _check_positive, validate_points
from .divergence import (
    bregman_raw,
    check_weights,
    multivariate_g_jensen,
    uniform_weights,
    _same_dim,
)
from .errors import ClusterSizeError, DomainError

Side = Literal["right", "left"]


def _prepare(points, w):
    pts = validate_points(points)
    w = uniform_weights(pts.shape[0]) if w is None else check_weights(w, pts.shape[0])
    return pts, w


def _quasi_arithmetic_mean(link, generator, pts, w):
    u = link.apply(pts)
    generator.check_domain(u)
    m = w @ u
    generator.check_domain(m)
    q = link.invert(m)
    _check_positive(q)
    return q


def right_centroid(spec: GDivergenceSpec, points, w=None) -> np.ndarray:
    """Minimizer over ``q`` of ``sum_v w_v B^g(p_v, q)``: ``g^-1(sum w g(p))``."""
    pts, w = _prepare(points, w)
    return _quasi_arithmetic_mean(spec.link, spec.generator, pts, w)


def left_centroid(spec: GDivergenceSpec, points, w=None) -> np.ndarray:
    """Minimizer over ``q`` of ``sum_v w_v B^g(q, p_v)``.

    Raises :class:`~gbregman.errors.UnsupportedError` for generators without
    a registered conjugate.
    """
    dual = spec.dual()
    pts, w = _prepare(points, w)
    return _quasi_arithmetic_mean(dual.link, dual.generator, pts, w)


def weighted_objective(spec: GDivergenceSpec, points, w, q, side: Side = "right") -> float:
    pts, w = _prepare(points, w)
    q = np.asarray(q, dtype=np.float64)
    _same_dim(pts, q)
    _check_positive(q)
    u = spec.linked(pts)
    v = spec.linked(q)
    if side == "right":
        d, _ = bregman_raw(spec.generator, u, v[None, :])
    elif side == "left":
        d, _ = bregman_raw(spec.generator, v[None, :], u)
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    return float(w @ d)


def jensen_bound(spec: GDivergenceSpec, points, w=None, side: Side = "right") -> float:
    """Minimum of :func:`weighted_objective`: the multivariate Jensen gap of F under g
    (right side) or of F* under the dual link (left side)."""
    pts, w = _prepare(points, w)
    if side == "left":
        spec = spec.dual()
    return multivariate_g_jensen(spec, pts, w)


def centroid(spec: GDivergenceSpec, points, w=None, side: Side = "right") -> np.ndarray:
    if side == "right":
        return right_centroid(spec, points, w)
    if side == "left":
        return left_centroid(spec, points, w)
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


# --------------------------------------------------------------------------
# clustering
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterConfig:
    k: int
    max_iters: int = 100
    tol: float = 1e-9
    seed: int = 0
    side: Side = "right"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.side not in ("right", "left"):
            raise ValueError(f"side must be 'right' or 'left', got {self.side!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass
class ClusterResult:
    assignments: np.ndarray
    centroids: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            "assignments": [int(a) for a in self.assignments],
            "centroids": [[float(c) for c in row] for row in self.centroids],
            "objective_trace": [float(o) for o in self.objective_trace],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


class _Lloyd:
    def __init__(self, spec: GDivergenceSpec, data: np.ndarray, side: Side):
        self.spec = spec
        self.side = side
        self.data = data
        self.gen = spec.generator
        self.u = np.ascontiguousarray(spec.linked(data))
        self.fu = np.ascontiguousarray(self.gen.eval(self.u))
        if side == "left":
            self.gu = np.ascontiguousarray(self.gen.grad(self.u))
            spec.dual()  # fail early without a conjugate

    def assign(self, centroids):
        v = np.ascontiguousarray(self.spec.linked(centroids))
        fv = np.ascontiguousarray(self.gen.eval(v))
        if self.side == "right":
            gv = np.ascontiguousarray(self.gen.grad(v))
            labels, _ = kernels.assign_nearest(self.u, self.fu, v, fv, gv)
        else:
            dist = kernels.pairwise_bregman(v, fv, self.u, self.fu, self.gu)
            labels = np.argmin(dist, axis=0).astype(np.intp)
        return np.asarray(labels, dtype=np.intp)

    def member_distances(self, labels, centroids):
        v = self.spec.linked(centroids)[labels]
        if self.side == "right":
            d, _ = bregman_raw(self.gen, self.u, v)
        else:
            d, _ = bregman_raw(self.gen, v, self.u)
        return d

    def objective(self, labels, centroids) -> float:
        return float(np.mean(self.member_distances(labels, centroids)))

    def heal(self, labels, centroids):
        """Move empty clusters onto the worst-served points, then reassign."""
        k = centroids.shape[0]
        for _ in range(k):
            counts = np.bincount(labels, minlength=k)
            empty = np.flatnonzero(counts == 0)
            if empty.size == 0:
                break
            centroids = centroids.copy()
            dist = self.member_distances(labels, centroids)
            movable = counts[labels] > 1
            order = np.lexsort((np.arange(dist.size), -dist))
            donors = [i for i in order if movable[i]]
            for j, i in zip(empty, donors):
                centroids[j] = self.data[i]
            labels = self.assign(centroids)
        return labels, centroids

    def update(self, labels, k, centroids):
        new = centroids.copy()
        for j in range(k):
            members = self.data[labels == j]
            if members.shape[0]:
                new[j] = centroid(self.spec, members, None, self.side)
        return new


def kmeans(spec: GDivergenceSpec, data, cfg: ClusterConfig) -> ClusterResult:
    """Lloyd iteration with g-Bregman assignment and quasi-arithmetic-mean updates."""
    data = validate_points(data)
    n = data.shape[0]
    if cfg.k > n:
        raise ClusterSizeError(f"k={cfg.k} exceeds the number of data points ({n})")
    lloyd = _Lloyd(spec, data, cfg.side)
    rng = np.random.default_rng(cfg.seed)
    init = np.sort(rng.choice(n, size=cfg.k, replace=False))
    centroids = data[init].copy()

    labels = lloyd.assign(centroids)
    labels, centroids = lloyd.heal(labels, centroids)
    trace = [lloyd.objective(labels, centroids)]
    converged = trace[0] == 0.0
    it = 0
    while not converged and it < cfg.max_iters:
        it += 1
        centroids = lloyd.update(labels, cfg.k, centroids)
        labels = lloyd.assign(centroids)
        labels, centroids = lloyd.heal(labels, centroids)
        obj = lloyd.objective(labels, centroids)
        prev = trace[-1]
        trace.append(obj)
        if obj == 0.0 or prev - obj <= cfg.tol * abs(prev):
            converged = True
    if converged:
        # centroids consistent with the final labels
        centroids = lloyd.update(labels, cfg.k, centroids)
    return ClusterResult(labels, centroids, trace, it, converged)


def partition_objective(spec: GDivergenceSpec, data, labels, side: Side = "right") -> float:
    """Mean divergence of a fixed partition to its own optimal centroids."""
    data = validate_points(data)
    labels = np.asarray(labels)
    if labels.shape != (data.shape[0],):
        raise DomainError("one label per data point is required")
    total = 0.0
    for j in np.unique(labels):
        members = data[labels == j]
        c = centroid(spec, members, None, side)
        total += weighted_objective(spec, members, None, c, side) * members.shape[0]
    return total / data.shape[0]
