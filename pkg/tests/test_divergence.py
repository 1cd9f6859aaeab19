import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gbregman import catalog
from gbregman import convex_core as cc
from gbregman import divergence as dv
from gbregman.errors import ConvexityViolation, DimensionMismatchError, DomainError, LengthMismatchError

P2, Q2 = np.array([0.5, 0.5]), np.array([0.25, 0.75])


def _js_direct(p, q):
    m = [(a + b) / 2 for a, b in zip(p, q)]
    kl = lambda x, y: sum(a * math.log(a / b) for a, b in zip(x, y))  # noqa: E731
    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def test_bregman_examples():
    sq, ne = cc.squared(), cc.neg_entropy()
    assert dv.bregman(sq, [3.0], [1.0]) == 4.0
    assert dv.bregman(ne, [0.4, 0.6], [0.4, 0.6]) == 0.0
    assert dv.bregman(ne, P2, Q2) == pytest.approx(0.143841, abs=1e-6)


def test_bregman_sym_examples():
    sq = cc.squared()
    assert dv.bregman_sym(sq, [3.0], [1.0]) == 8.0
    assert dv.bregman_sym(sq, [3.0], [1.0]) == dv.bregman(sq, [3.0], [1.0]) + dv.bregman(sq, [1.0], [3.0])
    assert dv.bregman_sym(cc.neg_entropy(), P2, Q2) == pytest.approx(0.274653, abs=1e-6)


def test_g_bregman_examples():
    assert dv.g_bregman(catalog.get_entry("hellinger").spec, [0.25], [1.0]) == pytest.approx(0.25, abs=1e-15)
    assert dv.g_bregman(catalog.get_entry("neyman_chi2").spec, [2.0, 3.0], [2.0, 3.0]) == 0.0
    assert dv.g_bregman(catalog.get_entry("pearson_chi2").spec, P2, Q2) == pytest.approx(1 / 3, abs=1e-12)


def test_g_bregman_sym_examples():
    assert dv.g_bregman_sym(catalog.get_entry("hellinger").spec, [0.25], [1.0]) == pytest.approx(0.5, abs=1e-15)
    assert dv.g_bregman_sym(catalog.get_entry("kl").spec, P2, Q2) == pytest.approx(0.274653, abs=1e-6)


def test_skew_jensen_examples():
    sq = cc.squared()
    assert dv.skew_jensen_scaled(sq, [3.0], [1.0], 0.5) == pytest.approx(4.0, abs=1e-12)
    assert dv.skew_jensen_scaled(sq, [3.0], [1.0], 0.25) == pytest.approx(4.0, abs=1e-12)
    assert dv.skew_jensen_scaled(sq, [3.0], [3.0], 0.3) == pytest.approx(0.0, abs=1e-12)


def test_g_skew_jensen_examples():
    assert dv.g_skew_jensen(catalog.get_entry("hellinger").spec, [0.25], [1.0], 0.5) == pytest.approx(0.25, abs=1e-14)
    value = dv.g_skew_jensen(catalog.get_entry("kl").spec, P2, Q2, 0.5)
    assert value == pytest.approx(4 * _js_direct(P2, Q2), rel=1e-13)
    # frozen from the direct evaluation above
    assert value == pytest.approx(0.1352883, abs=1e-6)


@pytest.mark.parametrize("a", [0.0, 1.0, -0.1, 1.5])
def test_skew_weight_must_be_interior(a):
    with pytest.raises(DomainError):
        dv.skew_jensen_scaled(cc.squared(), [3.0], [1.0], a)


def test_multivariate_examples():
    spec = cc.GDivergenceSpec(cc.squared(), cc.identity_link())
    assert dv.multivariate_g_jensen(spec, [[3.0]], [1.0]) == 0.0
    assert dv.multivariate_g_jensen(spec, [[3.0], [1.0]], [0.5, 0.5]) == pytest.approx(1.0, abs=1e-14)
    assert dv.multivariate_g_jensen(spec, [[2.0, 1.0]] * 3, [0.2, 0.3, 0.5]) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(LengthMismatchError):
        dv.multivariate_g_jensen(spec, [[3.0], [1.0]], [1.0])
    with pytest.raises(DomainError):
        dv.multivariate_g_jensen(spec, [[3.0], [1.0]], [0.6, 0.6])


def test_jensen_bregman_decomposition_examples():
    kl = catalog.get_entry("kl").spec
    assert dv.jensen_bregman_decomposition(kl, P2, P2, 0.3) == (0.0, 0.0)
    lhs, rhs = dv.jensen_bregman_decomposition(kl, P2, Q2, 0.5)
    assert lhs == pytest.approx(4 * _js_direct(P2, Q2), rel=1e-12)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))
    lhs, rhs = dv.jensen_bregman_decomposition(catalog.get_entry("hellinger").spec, [0.25], [1.0], 0.5)
    assert lhs == pytest.approx(0.25, abs=1e-14) and rhs == pytest.approx(0.25, abs=1e-14)


def test_decomposition_random(entry, rng):
    for _ in range(50):
        p, q = rng.uniform(0.1, 10.0, (2, 6))
        a = rng.uniform(0.05, 0.95)
        lhs, rhs = dv.jensen_bregman_decomposition(entry.spec, p, q, a)
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_errors():
    spec = catalog.get_entry("kl").spec
    with pytest.raises(DimensionMismatchError):
        dv.g_bregman(spec, [1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        dv.g_bregman(spec, [1.0, 0.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        dv.bregman(cc.neg_entropy(), [-1.0], [1.0])


def test_concave_generator_raises():
    concave = cc.Generator("neg_squared", eval=lambda x: -np.sum(x * x, axis=-1), grad=lambda x: -2 * x)
    with pytest.raises(ConvexityViolation):
        dv.bregman(concave, [3.0], [1.0])


def test_roundoff_floor_clamps_tiny_negatives():
    assert dv._floor(np.array(-1e-13), 1.0) == 0.0
    with pytest.raises(ConvexityViolation):
        dv._floor(np.array(-1e-9), 1.0)


points8 = hnp.arrays(np.float64, 8, elements=st.floats(min_value=0.1, max_value=10.0))


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(p=points8, q=points8)
def test_axioms_and_symmetry(entry, p, q):
    spec = entry.spec
    b_pq, b_qp = dv.g_bregman(spec, p, q), dv.g_bregman(spec, q, p)
    assert b_pq >= 0 and b_qp >= 0
    assert dv.g_bregman(spec, p, p) == 0.0
    assert dv.g_bregman_sym(spec, p, q) == pytest.approx(b_pq + b_qp, rel=1e-9, abs=1e-12)
    assert dv.g_bregman_sym(spec, p, q) == pytest.approx(dv.g_bregman_sym(spec, q, p), rel=1e-12, abs=1e-15)
    if not np.array_equal(p, q):
        assert dv.g_bregman_sym(spec, p, q) > 0


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(p=points8, q=points8, a=st.floats(min_value=0.01, max_value=0.99))
def test_two_point_multivariate_is_unscaled_skew_jensen(entry, p, q, a):
    spec = entry.spec
    mv = dv.multivariate_g_jensen(spec, [p, q], [1 - a, a])
    sj = dv.g_skew_jensen(spec, p, q, a)
    assert mv == pytest.approx(a * (1 - a) * sj, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("link", [cc.identity_link(), cc.log_link(), cc.power_link(0.5), cc.power_link(-1.0)], ids=lambda l: l.name)
def test_linearity(link, rng):
    gens = {
        "identity": (cc.neg_entropy(), cc.squared()),
        "log": (cc.exponential(), cc.squared()),
        "sqrt": (cc.squared(), cc.neg_entropy()),
        "reciprocal": (cc.inverse(), cc.neg_sqrt()),
    }[link.name]
    for _ in range(100):
        c1, c2 = rng.uniform(0.1, 5.0, 2)
        p, q = rng.uniform(0.1, 10.0, (2, 8))
        combo = cc.GDivergenceSpec(cc.combine(gens, (c1, c2)), link)
        parts = [dv.g_bregman(cc.GDivergenceSpec(g, link), p, q) for g in gens]
        assert dv.g_bregman(combo, p, q) == pytest.approx(c1 * parts[0] + c2 * parts[1], rel=1e-10)


def test_duality_swaps_arguments(entry, rng):
    dual = entry.spec.dual()
    p = rng.uniform(0.1, 10.0, (500, 8))
    q = rng.uniform(0.1, 10.0, (500, 8))
    np.testing.assert_allclose(dv.g_bregman(dual, p, q), dv.g_bregman(entry.spec, q, p), rtol=1e-9)


def test_limits_converge_linearly(entry, rng):
    # error of the scaled skew Jensen against its limits shrinks in proportion to the skew
    p, q = rng.uniform(0.1, 10.0, (2, 8))
    target = dv.g_bregman(entry.spec, q, p)
    errs = [abs(dv.g_skew_jensen(entry.spec, p, q, eps) - target) for eps in (1e-3, 1e-4, 1e-5)]
    if errs[0] > 1e-9 * (1 + target):
        assert errs[1] == pytest.approx(errs[0] / 10, rel=0.05)
    assert errs[2] <= 1e-3 * (1 + target) * max(1.0, errs[0] / (1e-3 * (1 + target)) / 50)


def test_large_dimension_uses_accurate_sum():
    spec = catalog.get_entry("kl").spec
    p = np.full(5000, 0.7)
    q = np.full(5000, 0.9)
    expected = 5000 * (0.9 - 0.7 + 0.7 * math.log(0.7 / 0.9))
    assert dv.g_bregman(spec, p, q) == pytest.approx(expected, rel=1e-10)
