"""Generators, links and the dual link.

A *generator* is a strictly convex function ``F`` together with its gradient
and, optionally, its Legendre conjugate pair ``(F*, grad F*)``.  A *link* is
an injective elementwise map ``g`` with an exact inverse.  Pairing the two
gives a :class:`GDivergenceSpec`, from which every divergence in
:mod:`gbregman.divergence` is evaluated.

Arrays follow one convention throughout: the last axis holds coordinates,
leading axes are batch axes.  ``eval`` reduces over the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, UnsupportedError

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _first_bad_index(mask: np.ndarray):
    bad = np.argwhere(~mask)
    idx = tuple(int(i) for i in bad[0])
    return idx[0] if len(idx) == 1 else idx


def _positive(x):
    return np.isfinite(x) & (x > 0)


def _negative(x):
    return np.isfinite(x) & (x < 0)


def _finite(x):
    return np.isfinite(x)


# --------------------------------------------------------------------------
# points
# --------------------------------------------------------------------------


def validate_point(raw) -> np.ndarray:
    """Validate ``raw`` as a point of the positive orthant.

    Returns a read-only 1-D float64 array.  Raises :class:`DomainError`
    carrying the offending index on the first non-finite or non-positive
    entry.
    """
    x = np.array(raw, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"a point must be a non-empty vector, got shape {x.shape}")
    _check_positive(x)
    x.flags.writeable = False
    return x


def validate_points(raw) -> np.ndarray:
    """Validate a stack of points, shape ``(n, d)``; returns a read-only copy."""
    x = np.array(raw, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None] if x.size else x.reshape(0, 1)
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise DomainError(f"expected a non-empty (n, d) array of points, got shape {x.shape}")
    _check_positive(x)
    x.flags.writeable = False
    return x


def _check_positive(x: np.ndarray) -> None:
    finite = np.isfinite(x)
    if not finite.all():
        idx = _first_bad_index(finite)
        raise DomainError(f"non-finite coordinate at index {idx}", index=idx)
    pos = x > 0
    if not pos.all():
        idx = _first_bad_index(pos)
        raise DomainError(
            f"coordinate at index {idx} is {x[idx]!r}; points must be strictly positive",
            index=idx,
        )


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """A strictly convex function with closed-form gradient.

    ``domain`` and ``conjugate_domain`` are elementwise predicates; every
    generator shipped here is a sum of identical one-dimensional terms, but
    nothing downstream relies on separability.
    """

    name: str
    eval: ArrayFn
    grad: ArrayFn
    domain: ArrayFn = _finite
    conjugate_eval: Optional[ArrayFn] = None
    conjugate_grad: Optional[ArrayFn] = None
    conjugate_domain: ArrayFn = _finite

    @property
    def has_conjugate(self) -> bool:
        return self.conjugate_eval is not None and self.conjugate_grad is not None

    def check_domain(self, x: np.ndarray) -> None:
        ok = np.asarray(self.domain(x), dtype=bool)
        if not ok.all():
            idx = _first_bad_index(ok)
            raise DomainError(f"{self.name}: argument outside the domain at index {idx}", index=idx)

    def in_domain(self, x) -> bool:
        return bool(np.all(self.domain(np.asarray(x, dtype=np.float64))))

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self.check_domain(x)
        return self.eval(x)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self.check_domain(x)
        return self.grad(x)

    def conjugate(self) -> "Generator":
        """Return ``F*`` as a generator in its own right (its conjugate is ``F``)."""
        if not self.has_conjugate:
            raise UnsupportedError(f"generator {self.name!r} has no registered conjugate")
        return Generator(
            name=f"{self.name}*",
            eval=self.conjugate_eval,
            grad=self.conjugate_grad,
            domain=self.conjugate_domain,
            conjugate_eval=self.eval,
            conjugate_grad=self.grad,
            conjugate_domain=self.domain,
        )


def squared() -> Generator:
    return Generator(
        name="squared",
        eval=lambda x: np.sum(x * x, axis=-1),
        grad=lambda x: 2.0 * x,
        domain=_finite,
        conjugate_eval=lambda y: np.sum(y * y, axis=-1) / 4.0,
        conjugate_grad=lambda y: y / 2.0,
        conjugate_domain=_finite,
    )


def neg_entropy() -> Generator:
    return Generator(
        name="neg_entropy",
        eval=lambda x: np.sum(x * np.log(x), axis=-1),
        grad=lambda x: np.log(x) + 1.0,
        domain=_positive,
        conjugate_eval=lambda y: np.sum(np.exp(y - 1.0), axis=-1),
        conjugate_grad=lambda y: np.exp(y - 1.0),
        conjugate_domain=_finite,
    )


def exponential() -> Generator:
    return Generator(
        name="exp",
        eval=lambda x: np.sum(np.exp(x), axis=-1),
        grad=np.exp,
        domain=_finite,
        conjugate_eval=lambda y: np.sum(y * np.log(y) - y, axis=-1),
        conjugate_grad=np.log,
        conjugate_domain=_positive,
    )


def inverse() -> Generator:
    # F*(y) = -2 sum sqrt(-y) on y < 0
    return Generator(
        name="inverse",
        eval=lambda x: np.sum(1.0 / x, axis=-1),
        grad=lambda x: -1.0 / (x * x),
        domain=_positive,
        conjugate_eval=lambda y: -2.0 * np.sum(np.sqrt(-y), axis=-1),
        conjugate_grad=lambda y: 1.0 / np.sqrt(-y),
        conjugate_domain=_negative,
    )


def neg_sqrt() -> Generator:
    # F*(y) = -sum 1/y on y < 0
    return Generator(
        name="neg_sqrt",
        eval=lambda x: -2.0 * np.sum(np.sqrt(x), axis=-1),
        grad=lambda x: -1.0 / np.sqrt(x),
        domain=_positive,
        conjugate_eval=lambda y: -np.sum(1.0 / y, axis=-1),
        conjugate_grad=lambda y: 1.0 / (y * y),
        conjugate_domain=_negative,
    )


def power_family(a: float) -> Generator:
    """``F(x) = sum x**(1/a) / (1 - a)`` for ``a`` outside ``{0, 1}``.

    The gradient is ``c * x**((1-a)/a)`` with ``c = 1/(a(1-a))``, and the
    conjugate is ``F*(y) = sum (y/c)**(1/(1-a)) / a``, defined where ``y``
    has the sign of ``c``.
    """
    a = float(a)
    if a in (0.0, 1.0) or not np.isfinite(a):
        raise DomainError(f"family index must lie in R \\ {{0, 1}}, got {a!r}")
    c = 1.0 / (a * (1.0 - a))
    expo = (1.0 - a) / a
    inv_a = 1.0 / a
    sign = np.sign(c)
    return Generator(
        name=f"power({a!r})",
        eval=lambda x: np.sum(x**inv_a, axis=-1) / (1.0 - a),
        grad=lambda x: c * x**expo,
        domain=_positive,
        conjugate_eval=lambda y: np.sum((y / c) ** (1.0 / (1.0 - a)), axis=-1) / a,
        conjugate_grad=lambda y: (y / c) ** (a / (1.0 - a)),
        conjugate_domain=lambda y: np.isfinite(y) & (np.sign(y) == sign),
    )


def combine(generators, coefficients) -> Generator:
    """Positive linear combination ``sum c_i F_i`` (no conjugate)."""
    gens = tuple(generators)
    coefs = tuple(float(c) for c in coefficients)
    if len(gens) != len(coefs) or not gens:
        raise ValueError("need one positive coefficient per generator")
    if any(c <= 0 for c in coefs):
        raise DomainError("combination coefficients must be positive")

    def eval_(x):
        return sum(c * g.eval(x) for c, g in zip(coefs, gens))

    def grad_(x):
        return sum(c * g.grad(x) for c, g in zip(coefs, gens))

    def domain_(x):
        ok = np.ones(np.shape(x), dtype=bool)
        for g in gens:
            ok &= np.asarray(g.domain(x), dtype=bool)
        return ok

    name = " + ".join(f"{c!r}*{g.name}" for c, g in zip(coefs, gens))
    return Generator(name=name, eval=eval_, grad=grad_, domain=domain_)


def convexity_gap(gen: Generator, x, y, lam: float = 0.5) -> np.ndarray:
    """``lam F(x) + (1-lam) F(y) - F(lam x + (1-lam) y)``; positive for distinct x, y."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return lam * gen.value(x) + (1.0 - lam) * gen.value(y) - gen.value(lam * x + (1.0 - lam) * y)


def grad_check(gen: Generator, x, step: float = 1e-5) -> float:
    """Max relative deviation between ``gen.grad`` and a finite-difference gradient.

    Uses the fourth-order central stencil, so ``x +- 2*step`` along every
    axis must stay inside the generator's domain.
    """
    x = np.asarray(x, dtype=np.float64)
    if not 0 < step:
        raise ValueError("step must be positive")
    gen.check_domain(x)
    g = gen.grad(x)
    fd = np.empty_like(x)
    for i in range(x.shape[-1]):
        e = np.zeros_like(x)
        e[..., i] = step
        probes = [x + 2 * e, x + e, x - e, x - 2 * e]
        for probe in probes:
            if not gen.in_domain(probe):
                raise DomainError(
                    f"{gen.name}: finite-difference probe leaves the domain along axis {i}",
                    index=i,
                )
        f2, f1, fm1, fm2 = (gen.eval(p) for p in probes)
        fd[..., i] = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * step)
    return float(np.max(np.abs(fd - g) / (np.abs(g) + 1e-300)))


def reference_grad(gen: Generator, x: np.ndarray) -> np.ndarray:
    """Gradient of ``gen.eval`` computed without touching ``gen.grad``.

    Complex-step differentiation when ``eval`` accepts complex input (exact to
    roundoff), otherwise a fourth-order central stencil with a relative step.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    h = 1e-30
    try:
        with np.errstate(all="ignore"):
            for i in range(x.shape[-1]):
                z = x.astype(np.complex128)
                z[..., i] += 1j * h
                fz = np.asarray(gen.eval(z))
                if not np.iscomplexobj(fz):
                    raise TypeError("eval dropped the imaginary part")
                out[..., i] = fz.imag / h
        if np.all(np.isfinite(out)):
            return out
    except (TypeError, ValueError):
        pass
    for i in range(x.shape[-1]):
        step = 1e-3 * np.maximum(np.abs(x[..., i]), 1e-3)
        e = np.zeros_like(x)
        e[..., i] = step
        f2, f1, fm1, fm2 = (gen.eval(x + k * e) for k in (2, 1, -1, -2))
        out[..., i] = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * step)
    return out


def fenchel_residual(gen: Generator, x) -> float:
    """``|F(x) + F*(grad F(x)) - <x, grad F(x)>|`` (zero for a true conjugate)."""
    if gen.conjugate_eval is None:
        raise UnsupportedError(f"generator {gen.name!r} has no registered conjugate")
    x = np.asarray(x, dtype=np.float64)
    gen.check_domain(x)
    y = gen.grad(x)
    r = gen.eval(x) + gen.conjugate_eval(y) - np.sum(x * y, axis=-1)
    return float(np.max(np.abs(r)))


# --------------------------------------------------------------------------
# links
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    """Injective elementwise map ``g`` with inverse; ``image`` guards ``invert``."""

    name: str
    forward: ArrayFn
    backward: ArrayFn
    domain: ArrayFn = _positive
    image: ArrayFn = _positive

    def apply(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        ok = np.asarray(self.domain(p), dtype=bool)
        if not ok.all():
            idx = _first_bad_index(ok)
            raise DomainError(f"link {self.name}: argument outside the domain at index {idx}", index=idx)
        return self.forward(p)

    def invert(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        ok = np.asarray(self.image(u), dtype=bool)
        if not ok.all():
            idx = _first_bad_index(ok)
            raise DomainError(f"link {self.name}: no pre-image in the domain at index {idx}", index=idx)
        return self.backward(u)


def identity_link() -> Link:
    return Link("identity", lambda p: p.copy(), lambda u: u.copy())


def log_link() -> Link:
    return Link("log", np.log, np.exp, image=_finite)


def power_link(r: float) -> Link:
    r = float(r)
    if r == 0.0 or not np.isfinite(r):
        raise DomainError("power link exponent must be finite and non-zero")
    names = {0.5: "sqrt", 2.0: "square", -1.0: "reciprocal"}
    inv = 1.0 / r
    if r == -1.0:
        fwd, bwd = (lambda p: 1.0 / p), (lambda u: 1.0 / u)
    elif r == 0.5:
        fwd, bwd = np.sqrt, (lambda u: u * u)
    elif r == 2.0:
        fwd, bwd = (lambda p: p * p), np.sqrt
    else:
        fwd, bwd = (lambda p: p**r), (lambda u: u**inv)
    return Link(names.get(r, f"power({r!r})"), fwd, bwd)


@dataclass(frozen=True)
class DualLink:
    """The composed link ``grad F o g`` and its inverse ``g^-1 o grad F*``."""

    base_generator: Generator
    base_link: object

    @property
    def name(self) -> str:
        return f"grad[{self.base_generator.name}]o{self.base_link.name}"

    def domain(self, p):
        return self.base_link.domain(p)

    def image(self, y):
        return self.base_generator.conjugate_domain(y)

    def apply(self, p) -> np.ndarray:
        u = self.base_link.apply(p)
        self.base_generator.check_domain(u)
        return self.base_generator.grad(u)

    def invert(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        ok = np.asarray(self.image(y), dtype=bool)
        if not ok.all():
            idx = _first_bad_index(ok)
            raise DomainError(f"dual link {self.name}: argument outside the conjugate domain at {idx}", index=idx)
        return self.base_link.invert(self.base_generator.conjugate_grad(y))


# --------------------------------------------------------------------------
# specs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GDivergenceSpec:
    generator: Generator
    link: object = field(default_factory=identity_link)
    family_index: Optional[float] = None

    def __post_init__(self):
        if self.family_index is not None and float(self.family_index) in (0.0, 1.0):
            raise DomainError(f"family index must lie in R \\ {{0, 1}}, got {self.family_index!r}")

    @property
    def name(self) -> str:
        return f"({self.generator.name}, {self.link.name})"

    def linked(self, p) -> np.ndarray:
        """``g(p)``, checked against the generator's domain."""
        u = self.link.apply(p)
        self.generator.check_domain(u)
        return u

    def dual(self) -> "GDivergenceSpec":
        """``(F*, grad F o g)``: swaps the argument order of the g-Bregman divergence."""
        return GDivergenceSpec(self.generator.conjugate(), dual_link(self), self.family_index)


def dual_link(spec: GDivergenceSpec) -> DualLink:
    if spec.generator.conjugate_grad is None:
        raise UnsupportedError(f"generator {spec.generator.name!r} has no conjugate gradient")
    return DualLink(spec.generator, spec.link)
