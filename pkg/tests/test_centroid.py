import itertools
import math

import numpy as np
import pytest

from gbregman import catalog, centroid as ct
from gbregman import convex_core as cc
from gbregman.errors import ClusterSizeError, DomainError, LengthMismatchError, UnsupportedError

PTS = np.array([[1.0], [4.0]])


def _spec(link):
    return cc.GDivergenceSpec(cc.squared(), link)


@pytest.mark.parametrize(
    "link, expected",
    [
        (cc.log_link(), 2.0),
        (cc.identity_link(), 2.5),
        (cc.power_link(-1.0), 1.6),
        (cc.power_link(2.0), math.sqrt(8.5)),
        (cc.power_link(0.5), 2.25),
    ],
    ids=["geometric", "arithmetic", "harmonic", "quadratic", "sqrt"],
)
def test_right_centroid_is_quasi_arithmetic_mean(link, expected):
    assert ct.right_centroid(_spec(link), PTS)[0] == pytest.approx(expected, rel=1e-14)


def test_weighted_right_centroid():
    c = ct.right_centroid(_spec(cc.log_link()), PTS, [0.25, 0.75])
    assert c[0] == pytest.approx(4.0 ** 0.75, rel=1e-14)


def test_left_centroids():
    # kl: the left centroid is the geometric mean, neyman: the quadratic mean
    assert ct.left_centroid(catalog.get_entry("kl").spec, PTS)[0] == pytest.approx(2.0, rel=1e-13)
    assert ct.left_centroid(catalog.get_entry("reverse_kl").spec, PTS)[0] == pytest.approx(2.5, rel=1e-13)
    assert ct.left_centroid(catalog.get_entry("neyman_chi2").spec, PTS)[0] == pytest.approx(math.sqrt(8.5), rel=1e-13)


def test_left_centroid_needs_conjugate():
    gen = cc.Generator("plain", eval=lambda x: np.sum(x * x, axis=-1), grad=lambda x: 2 * x)
    with pytest.raises(UnsupportedError):
        ct.left_centroid(cc.GDivergenceSpec(gen, cc.identity_link()), PTS)


def test_weighted_objective_kl_example():
    p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
    spec = catalog.get_entry("kl").spec
    c = ct.right_centroid(spec, [p, q])
    m = (p + q) / 2
    js = 0.5 * sum(p * np.log(p / m)) + 0.5 * sum(q * np.log(q / m))
    obj = ct.weighted_objective(spec, [p, q], None, c)
    assert obj == pytest.approx(js, rel=1e-13)
    assert obj == pytest.approx(0.0338221, abs=1e-7)
    assert ct.jensen_bound(spec, [p, q]) == pytest.approx(obj, rel=1e-12)


def test_centroid_minimizes(entry, rng):
    pts = rng.uniform(0.1, 10.0, (7, 4))
    w = rng.dirichlet(np.ones(7))
    for side in ("right", "left"):
        c = ct.centroid(entry.spec, pts, w, side)
        best = ct.weighted_objective(entry.spec, pts, w, c, side)
        assert abs(best - ct.jensen_bound(entry.spec, pts, w, side)) <= 1e-9 * (1 + best)
        for _ in range(20):
            q = c * np.exp(rng.normal(0, 0.05, c.shape))
            assert ct.weighted_objective(entry.spec, pts, w, q, side) >= best - 1e-12 * (1 + best)


def test_weight_errors():
    spec = catalog.get_entry("kl").spec
    with pytest.raises(LengthMismatchError):
        ct.right_centroid(spec, PTS, [1.0])
    with pytest.raises(DomainError):
        ct.right_centroid(spec, PTS, [0.7, 0.7])
    with pytest.raises(ValueError):
        ct.centroid(spec, PTS, None, "middle")


def test_cluster_config_validation():
    for kwargs in ({"k": 0}, {"k": 1, "max_iters": 0}, {"k": 1, "tol": 0.0}, {"k": 1, "side": "up"}):
        with pytest.raises(ValueError):
            ct.ClusterConfig(**kwargs)


def test_k_equals_n_gives_zero():
    data = np.array([[1.0], [2.0], [5.0]])
    res = ct.kmeans(catalog.get_entry("kl").spec, data, ct.ClusterConfig(k=3))
    assert res.objective_trace[-1] == 0.0
    assert sorted(res.assignments.tolist()) == [0, 1, 2]


def test_k_one_gives_quasi_arithmetic_mean():
    data = np.array([[1.0], [4.0], [16.0]])
    res = ct.kmeans(_spec(cc.log_link()), data, ct.ClusterConfig(k=1))
    assert res.centroids[0, 0] == pytest.approx(4.0, rel=1e-13)
    assert res.converged


def test_two_groups_match_brute_force(entry):
    data = np.array([[0.9], [1.1], [9.0], [11.0]])
    res = ct.kmeans(entry.spec, data, ct.ClusterConfig(k=2, seed=3))
    assert res.assignments[0] == res.assignments[1] != res.assignments[2] == res.assignments[3]
    best = min(
        ct.partition_objective(entry.spec, data, labels)
        for labels in itertools.product([0, 1], repeat=4)
        if len(set(labels)) == 2
    )
    assert res.objective_trace[-1] == pytest.approx(best, rel=1e-9, abs=1e-12)


def test_trace_non_increasing_and_deterministic(entry, rng):
    data = np.concatenate([rng.uniform(0.2, 1.0, (30, 3)), rng.uniform(3.0, 9.0, (30, 3))])
    for side in ("right", "left"):
        cfg = ct.ClusterConfig(k=4, seed=11, side=side)
        a = ct.kmeans(entry.spec, data, cfg)
        b = ct.kmeans(entry.spec, data, cfg)
        assert a.to_dict() == b.to_dict()
        trace = np.array(a.objective_trace)
        assert np.all(np.diff(trace) <= 1e-12 * (1 + trace[:-1]))
        assert len(set(a.assignments.tolist())) == 4


def test_empty_cluster_is_healed():
    # duplicated points make two initial centroids coincide
    data = np.array([[1.0], [1.0], [1.0], [5.0], [6.0]])
    res = ct.kmeans(catalog.get_entry("kl").spec, data, ct.ClusterConfig(k=3, seed=0))
    assert len(set(res.assignments.tolist())) == 3


def test_too_many_clusters():
    with pytest.raises(ClusterSizeError):
        ct.kmeans(catalog.get_entry("kl").spec, PTS, ct.ClusterConfig(k=3))


def test_result_serializes():
    res = ct.kmeans(catalog.get_entry("hellinger").spec, PTS, ct.ClusterConfig(k=1))
    d = res.to_dict()
    assert set(d) == {"assignments", "centroids", "objective_trace", "iterations", "converged"}
    assert d["centroids"] == [[2.25]]
