"""Registered generator/link pairs and closed-form f-divergence oracles.

Six pairings are registered.  Each carries closed forms written directly from
the textbook formulas, never through the generator machinery, so they serve
as independent oracles for :func:`gbregman.divergence.g_bregman` and friends.

========================  =====================  =============  ==================================
key                       generator F            link g         g-Bregman B(p, q) equals
========================  =====================  =============  ==================================
``kl``                    sum p ln p             identity       generalized KL(p || q)
``reverse_kl``            sum exp(p)             log            generalized KL(q || p)
``alpha(a)``              sum p**(1/a) / (1-a)   p**a           generalized alpha-div D_a(p || q)
``hellinger``             sum p**2               sqrt           sum (sqrt p - sqrt q)**2
``pearson_chi2``          -2 sum sqrt p          p**2           sum (p - q)**2 / q
``neyman_chi2``           sum 1/p                1/p            sum (p - q)**2 / p
========================  =====================  =============  ==================================
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import convex_core as cc
from .divergence import _as_points, _same_dim
from .errors import DomainError, UnknownKeyError

Oracle = Callable[[np.ndarray, np.ndarray], np.ndarray]
SkewOracle = Callable[[np.ndarray, np.ndarray, float], np.ndarray]

KEYS = ("kl", "reverse_kl", "alpha", "hellinger", "pearson_chi2", "neyman_chi2")

#: family indices exercised when ``alpha`` is requested without one
DEFAULT_ALPHA_INDICES = (-1.0, 0.5, 2.0)


# --------------------------------------------------------------------------
# closed forms (sum over the last axis)
# --------------------------------------------------------------------------


def kl(p, q):
    return np.sum(p * np.log(p / q), axis=-1)


def generalized_kl(p, q):
    return np.sum(q - p + p * np.log(p / q), axis=-1)


def jeffreys(p, q):
    return np.sum((p - q) * np.log(p / q), axis=-1)


def hellinger_sq(p, q):
    return np.sum((np.sqrt(p) - np.sqrt(q)) ** 2, axis=-1)


def pearson_chi2(p, q):
    return np.sum((p - q) ** 2 / q, axis=-1)


def neyman_chi2(p, q):
    return np.sum((p - q) ** 2 / p, axis=-1)


def alpha_divergence(p, q, a):
    """Normalized-distribution form ``sum(p**a q**(1-a) - 1) / (a(a-1))``."""
    return np.sum(p**a * q ** (1.0 - a) - 1.0, axis=-1) / (a * (a - 1.0))


def generalized_alpha(p, q, a):
    """``sum(p**a q**(1-a) - a p - (1-a) q) / (a(a-1))``, valid off the simplex."""
    return np.sum(p**a * q ** (1.0 - a) - a * p - (1.0 - a) * q, axis=-1) / (a * (a - 1.0))


def skew_js(p, q, a=0.5):
    """``(1-a) KL(p || m) + a KL(q || m)`` with ``m = (1-a) p + a q``."""
    m = (1.0 - a) * p + a * q
    return (1.0 - a) * kl(p, m) + a * kl(q, m)


def _alpha_family_skew(A):
    def f(p, q, b):
        inner = ((1.0 - b) * p**A + b * q**A) ** (1.0 / A)
        return np.sum((1.0 - b) * p + b * q - inner, axis=-1) / (b * (1.0 - b) * (1.0 - A))

    return f


def _pearson_skew(p, q, a):
    return 2.0 / (a * (1.0 - a)) * np.sum(-(1.0 - a) * p - a * q + np.sqrt((1.0 - a) * p**2 + a * q**2), axis=-1)


def _neyman_skew(p, q, a):
    return np.sum((1.0 - a) * p + a * q - p * q / ((1.0 - a) * q + a * p), axis=-1) / (a * (1.0 - a))


_FDIV = {
    "kl": lambda p, q, fi, a: kl(p, q),
    "hellinger": lambda p, q, fi, a: hellinger_sq(p, q),
    "pearson": lambda p, q, fi, a: pearson_chi2(p, q),
    "neyman": lambda p, q, fi, a: neyman_chi2(p, q),
    "alpha": lambda p, q, fi, a: alpha_divergence(p, q, fi),
    "js": lambda p, q, fi, a: skew_js(p, q, a),
}


def oracle_fdiv(name: str, p, q, family_index: Optional[float] = None, skew: float = 0.5):
    """Evaluate one of the classical f-divergence formulas literally.

    ``name`` is one of ``kl``, ``hellinger``, ``pearson``, ``neyman``,
    ``alpha`` (needs ``family_index``) or ``js`` (skewed by ``skew``, 1/2 gives
    the usual Jensen-Shannon divergence).  Operands need not be normalized.
    """
    if name not in _FDIV:
        raise UnknownKeyError(name)
    if name == "alpha" and (family_index is None or float(family_index) in (0.0, 1.0)):
        raise DomainError("alpha divergence needs a family index outside {0, 1}")
    p, q = _as_points(p), _as_points(q)
    _same_dim(p, q)
    value = _FDIV[name](p, q, None if family_index is None else float(family_index), skew)
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    spec: cc.GDivergenceSpec
    oracle_forward: Optional[Oracle] = None
    oracle_symmetric: Optional[Oracle] = None
    oracle_skew_jensen: Optional[SkewOracle] = None
    notes: str = ""

    @property
    def label(self) -> str:
        if self.spec.family_index is None:
            return self.key
        return f"{self.key}({self.spec.family_index:g})"


def _kl():
    return CatalogEntry(
        "kl",
        cc.GDivergenceSpec(cc.neg_entropy(), cc.identity_link()),
        oracle_forward=generalized_kl,
        oracle_symmetric=jeffreys,
        oracle_skew_jensen=lambda p, q, a: skew_js(p, q, a) / (a * (1.0 - a)),
        notes="B(p, q) = sum(q - p + p ln(p/q)); skew Jensen is the skew JS divergence over a(1-a).",
    )


def _reverse_kl():
    return CatalogEntry(
        "reverse_kl",
        cc.GDivergenceSpec(cc.exponential(), cc.log_link()),
        oracle_forward=lambda p, q: generalized_kl(q, p),
        oracle_symmetric=jeffreys,
        oracle_skew_jensen=lambda p, q, a: generalized_alpha(p, q, 1.0 - a),
        notes="B(p, q) = KL(q || p), arguments swapped; skew Jensen at a is D_{1-a}(p || q).",
    )


def _alpha(a):
    a = float(a)
    if a in (0.0, 1.0) or not np.isfinite(a):
        raise DomainError(f"alpha family index must lie in R \\ {{0, 1}}, got {a!r}")
    return CatalogEntry(
        "alpha",
        cc.GDivergenceSpec(cc.power_family(a), cc.power_link(a), family_index=a),
        oracle_forward=lambda p, q: generalized_alpha(p, q, a),
        oracle_symmetric=lambda p, q: generalized_alpha(p, q, a) + generalized_alpha(q, p, a),
        oracle_skew_jensen=_alpha_family_skew(a),
        notes="B(p, q) = D_a(p || q) with the 1/(a(a-1)) sign convention.",
    )


def _hellinger():
    return CatalogEntry(
        "hellinger",
        cc.GDivergenceSpec(cc.squared(), cc.power_link(0.5)),
        oracle_forward=hellinger_sq,
        oracle_symmetric=lambda p, q: 2.0 * hellinger_sq(p, q),
        oracle_skew_jensen=lambda p, q, a: hellinger_sq(p, q),
        notes="symmetric form is 2 H^2; skew Jensen is H^2 for every skew weight.",
    )


def _pearson():
    return CatalogEntry(
        "pearson_chi2",
        cc.GDivergenceSpec(cc.neg_sqrt(), cc.power_link(2.0)),
        oracle_forward=pearson_chi2,
        oracle_symmetric=lambda p, q: pearson_chi2(p, q) + pearson_chi2(q, p),
        oracle_skew_jensen=_pearson_skew,
        notes="B(p, q) = sum (p - q)^2 / q, the Pearson divergence of p from q.",
    )


def _neyman():
    return CatalogEntry(
        "neyman_chi2",
        cc.GDivergenceSpec(cc.inverse(), cc.power_link(-1.0)),
        oracle_forward=neyman_chi2,
        oracle_symmetric=lambda p, q: neyman_chi2(p, q) + neyman_chi2(q, p),
        oracle_skew_jensen=_neyman_skew,
        notes="B(p, q) = sum (p - q)^2 / p, the Neyman divergence of p from q.",
    )


_BUILDERS = {
    "kl": _kl,
    "reverse_kl": _reverse_kl,
    "hellinger": _hellinger,
    "pearson_chi2": _pearson,
    "neyman_chi2": _neyman,
}

_KEYED = re.compile(r"^alpha\(\s*([^)]+)\s*\)$")


def get_entry(key: str, family_index: Optional[float] = None) -> CatalogEntry:
    """Look up a catalog entry.

    ``alpha`` takes its family index either from ``family_index`` or inline,
    as in ``"alpha(0.5)"``.
    """
    m = _KEYED.match(key)
    if m:
        key, family_index = "alpha", float(m.group(1))
    if key == "alpha":
        if family_index is None:
            raise DomainError("the alpha entry needs a family index")
        return _alpha(family_index)
    try:
        return _BUILDERS[key]()
    except KeyError:
        raise UnknownKeyError(f"unknown divergence {key!r}; choose from {', '.join(KEYS)}") from None


def expand_keys(keys, family_index: Optional[float] = None) -> list[CatalogEntry]:
    """Resolve keys (``"all"`` allowed) to entries; bare ``alpha`` fans out over defaults."""
    out = []
    for key in keys:
        if key == "all":
            out.extend(expand_keys(KEYS, family_index))
        elif key == "alpha" and family_index is None:
            out.extend(_alpha(a) for a in DEFAULT_ALPHA_INDICES)
        else:
            out.append(get_entry(key, family_index))
    return out


def all_entries() -> list[CatalogEntry]:
    return expand_keys(["all"])
