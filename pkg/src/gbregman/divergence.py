"""Bregman, symmetric Bregman and skew Jensen divergences and their g-forms.

Every function accepts either single points (1-D arrays) or stacks of points
(``(..., d)`` arrays broadcast against each other) and returns a float or an
array of the batch shape.

Two Jensen forms live here on purpose.  :func:`skew_jensen_scaled` carries the
``1/(a(1-a))`` factor and is the one compared against the symmetric Bregman
divergence; :func:`multivariate_g_jensen` is unscaled and is the value the
weighted centroid objective attains at its minimum.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .convex_core import GDivergenceSpec, Generator, _check_positive
from .errors import ConvexityViolation, DimensionMismatchError, DomainError, LengthMismatchError

#: absolute roundoff floor for computed divergences, scaled by ``max(1, |terms|)``
ROUNDOFF_FLOOR = 1e-12


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _same_dim(*arrays):
    dims = {np.shape(a)[-1] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")


def _as_points(p) -> np.ndarray:
    x = np.asarray(p, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DomainError(f"a point must be a non-empty vector, got shape {x.shape}")
    _check_positive(x)
    return x


def _inner(a, b):
    # np.sum reduces a contiguous last axis pairwise, which keeps dim > 1024 accurate.
    return np.sum(a * b, axis=-1)


def check_skew(a) -> float:
    """Validate a skew weight strictly inside ``(0, 1)``."""
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"skew weight must lie in the open interval (0, 1), got {a!r}")
    return a


def check_weights(w, n: int | None = None) -> np.ndarray:
    """Validate non-negative weights summing to one within 1e-12."""
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.size == 0:
        raise LengthMismatchError("weight vector is empty")
    if n is not None and w.size != n:
        raise LengthMismatchError(f"{w.size} weights for {n} points")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise DomainError("weights must be finite and non-negative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise DomainError(f"weights must sum to 1, got {w.sum()!r}")
    return w


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _floor(value, magnitude):
    """Clamp roundoff-sized negatives to zero; raise on anything larger."""
    value = np.asarray(value, dtype=np.float64)
    tol = ROUNDOFF_FLOOR * np.maximum(1.0, magnitude)
    if np.any(value < -tol):
        worst = float(np.min(value))
        raise ConvexityViolation(f"divergence evaluated to {worst!r}; the generator is not convex here")
    return np.where(value < 0, 0.0, value)


# --------------------------------------------------------------------------
# raw forms (no validation, no floor); the verification harness uses these
# --------------------------------------------------------------------------


def bregman_raw(gen: Generator, u, v):
    fu, fv = gen.eval(u), gen.eval(v)
    lin = _inner(u - v, gen.grad(v))
    return fu - fv - lin, np.abs(fu) + np.abs(fv) + np.abs(lin)


def bregman_sym_raw(gen: Generator, u, v):
    return _inner(u - v, gen.grad(u) - gen.grad(v))


def skew_jensen_raw(gen: Generator, u, v, a):
    a = np.asarray(a, dtype=np.float64)
    am = a[..., None] if a.ndim else a
    fu, fv = gen.eval(u), gen.eval(v)
    fm = gen.eval((1.0 - am) * u + am * v)
    terms = (1.0 - a) * fu + a * fv - fm
    mag = (1.0 - a) * np.abs(fu) + a * np.abs(fv) + np.abs(fm)
    s = 1.0 / (a * (1.0 - a))
    return s * terms, s * mag


def multivariate_jensen_raw(gen: Generator, u, w):
    # u: (N, ..., d), w: (N,)
    w = np.asarray(w, dtype=np.float64)
    shape = (-1,) + (1,) * (u.ndim - 2)
    fu = gen.eval(u)
    mean = np.sum(w.reshape(shape + (1,)) * u, axis=0)
    fm = gen.eval(mean)
    first = np.sum(w.reshape(shape) * fu, axis=0)
    return first - fm, np.sum(w.reshape(shape) * np.abs(fu), axis=0) + np.abs(fm)


# --------------------------------------------------------------------------
# plain divergences on generator-domain vectors
# --------------------------------------------------------------------------


def _gen_args(gen, p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    _same_dim(p, q)
    gen.check_domain(p)
    gen.check_domain(q)
    return p, q


def bregman(gen: Generator, p, q):
    """``F(p) - F(q) - <p - q, grad F(q)>``."""
    p, q = _gen_args(gen, p, q)
    value, mag = bregman_raw(gen, p, q)
    return _scalar_or_array(_floor(value, mag))


def bregman_sym(gen: Generator, p, q):
    """``<p - q, grad F(p) - grad F(q)>``, i.e. ``B(p, q) + B(q, p)``."""
    p, q = _gen_args(gen, p, q)
    gp, gq = gen.grad(p), gen.grad(q)
    value = _inner(p - q, gp - gq)
    mag = _inner(np.abs(p - q), np.abs(gp) + np.abs(gq))
    return _scalar_or_array(_floor(value, mag))


def skew_jensen_scaled(gen: Generator, p, q, a):
    """``((1-a) F(p) + a F(q) - F((1-a) p + a q)) / (a (1-a))``."""
    a = check_skew(a)
    p, q = _gen_args(gen, p, q)
    gen.check_domain((1.0 - a) * p + a * q)
    value, mag = skew_jensen_raw(gen, p, q, a)
    return _scalar_or_array(_floor(value, mag))


# --------------------------------------------------------------------------
# g-divergences on points
# --------------------------------------------------------------------------


def _linked_pair(spec: GDivergenceSpec, p, q):
    p, q = _as_points(p), _as_points(q)
    _same_dim(p, q)
    return spec.linked(p), spec.linked(q)


def g_bregman(spec: GDivergenceSpec, p, q):
    """``B_F(g(p), g(q))``."""
    u, v = _linked_pair(spec, p, q)
    value, mag = bregman_raw(spec.generator, u, v)
    return _scalar_or_array(_floor(value, mag))


def g_bregman_sym(spec: GDivergenceSpec, p, q):
    u, v = _linked_pair(spec, p, q)
    return bregman_sym(spec.generator, u, v)


def g_skew_jensen(spec: GDivergenceSpec, p, q, a):
    u, v = _linked_pair(spec, p, q)
    return skew_jensen_scaled(spec.generator, u, v, a)


def multivariate_g_jensen(spec: GDivergenceSpec, points: Sequence, w) -> float:
    """``sum_v w_v F(g(p_v)) - F(sum_v w_v g(p_v))`` (unscaled)."""
    pts = _as_points(np.asarray(points, dtype=np.float64))
    if pts.ndim < 2:
        raise DomainError("points must be a sequence of vectors")
    w = check_weights(w, pts.shape[0])
    u = spec.linked(pts)
    spec.generator.check_domain(np.tensordot(w, u, axes=1))
    value, mag = multivariate_jensen_raw(spec.generator, u, w)
    return _scalar_or_array(_floor(value, mag))


def interpolate(spec: GDivergenceSpec, p, q, a) -> np.ndarray:
    """The point ``r`` with ``g(r) = (1-a) g(p) + a g(q)``."""
    u, v = _linked_pair(spec, p, q)
    r = spec.link.invert((1.0 - a) * u + a * v)
    _check_positive(r)
    return r


def jensen_bregman_decomposition(spec: GDivergenceSpec, p, q, a):
    """Return ``(sJ^g_a(p, q), ((1-a) B^g(p, r) + a B^g(q, r)) / (a(1-a)))``.

    ``r`` is the g-interpolant of ``p`` and ``q`` at ``a``; both numbers agree
    up to roundoff.
    """
    a = check_skew(a)
    lhs = g_skew_jensen(spec, p, q, a)
    r = interpolate(spec, p, q, a)
    rhs = ((1.0 - a) * g_bregman(spec, p, r) + a * g_bregman(spec, q, r)) / (a * (1.0 - a))
    return lhs, _scalar_or_array(rhs)
