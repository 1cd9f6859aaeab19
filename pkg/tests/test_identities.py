import json

import numpy as np
import pytest

from gbregman import catalog, identities as idn
from gbregman import convex_core as cc
from gbregman.divergence import bregman_raw, bregman_sym_raw
from gbregman.errors import DomainError

SMALL = idn.TrialConfig(trials=200, dim=5, seed=7)

CHECKS = [
    idn.check_law_of_cosines,
    idn.check_four_point,
    idn.check_parallelogram,
    idn.check_division_lemmas,
    idn.check_bj_inequality,
    idn.check_parallelogram_bj,
    idn.check_duality,
]


@pytest.mark.parametrize("check", CHECKS, ids=lambda f: f.__name__)
def test_checks_pass_for_every_entry(check, entry):
    rep = check(entry.spec, SMALL, entry.label)
    assert rep.passed, rep.to_dict()
    assert rep.trials == SMALL.trials and rep.divergence == entry.label


def test_oracle_and_centroid_checks(entry):
    assert idn.check_oracle(entry, SMALL).passed
    assert idn.check_centroids(entry.spec, idn.TrialConfig(trials=30, seed=1), entry.label).passed


def test_degenerate_triangle_has_zero_cosine_terms():
    spec = catalog.get_entry("kl").spec
    p = spec.linked(np.array([0.4, 0.6]))
    b, _ = bregman_raw(spec.generator, p, p)
    assert b == 0.0 and bregman_sym_raw(spec.generator, p, p) == 0.0


def test_squared_division_example():
    # g = id, F = |x|^2: B(p, q) = |p - q|^2 and r = (1-a) p + a q splits it exactly
    gen = cc.squared()
    p, q, a = np.array([1.0]), np.array([5.0]), 0.25
    r = (1 - a) * p + a * q
    B = lambda x, y: bregman_raw(gen, x, y)[0]  # noqa: E731
    assert B(p, q) == 16.0
    assert B(p, r) + B(r, q) + a / (1 - a) * bregman_sym_raw(gen, r, q) == pytest.approx(16.0, abs=1e-12)


def _mutated(factor=1.01):
    base = cc.neg_entropy()
    gen = cc.Generator("mutant", eval=base.eval, grad=lambda x: factor * base.grad(x), domain=base.domain)
    return cc.GDivergenceSpec(gen, cc.identity_link())


def test_mutated_gradient_fails_cosines_and_four_point():
    spec = _mutated()
    cfg = idn.TrialConfig(trials=200, seed=3)
    for check in (idn.check_law_of_cosines, idn.check_four_point):
        rep = check(spec, cfg)
        assert not rep.passed
        assert rep.failures == cfg.trials


def test_run_all_empty_and_unknown_suite():
    assert idn.run_all([], SMALL) == []
    with pytest.raises(ValueError):
        idn.run_all(["kl"], SMALL, ["nope"])


def test_run_all_is_deterministic():
    cfg = idn.TrialConfig(trials=50, seed=42)
    a = [r.to_dict() for r in idn.run_all(catalog.all_entries(), cfg, ["cosines", "bj", "oracle"])]
    b = [r.to_dict() for r in idn.run_all(catalog.all_entries(), cfg, ["cosines", "bj", "oracle"])]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_errors_become_failed_reports(monkeypatch):
    def boom(*args, **kwargs):
        raise DomainError("synthetic failure")

    monkeypatch.setattr(idn, "check_four_point", boom)
    reports = idn.run_all(["hellinger"], idn.TrialConfig(trials=10), ["four-point", "cosines"])
    assert [r.identity_name for r in reports] == ["four-point", "law_of_cosines"]
    assert not reports[0].passed and "synthetic failure" in reports[0].error
    assert reports[0].to_dict()["max_residual"] == "nan"
    assert reports[1].passed


def test_report_serialization():
    rep = idn.check_bj_inequality(catalog.get_entry("kl").spec, idn.TrialConfig(trials=20), "kl")
    d = rep.to_dict()
    assert d["kind"] == "inequality" and d["pass"] is True
    assert set(d["worst_case"]) >= {"p", "q", "a", "gap", "trial"}
    json.dumps(d)


@pytest.mark.parametrize(
    "kwargs", [{"trials": 0}, {"dim": 0}, {"seed": -1}, {"sample_low": 0.0}, {"rel_tol": 0.0}]
)
def test_trial_config_validation(kwargs):
    with pytest.raises(DomainError):
        idn.TrialConfig(**kwargs)


def test_parallelogram_construction(entry):
    quads = idn.sample_parallelograms(entry.spec, idn.TrialConfig(trials=50, dim=3), "parallelogram")
    g = entry.spec.link.apply
    np.testing.assert_allclose(g(quads[:, 0]) + g(quads[:, 2]), g(quads[:, 1]) + g(quads[:, 3]), rtol=1e-12, atol=1e-12)
    assert np.all(quads > 0)


def test_limits_residual_is_first_order(entry):
    cfg = idn.TrialConfig(trials=100, seed=42)
    coarse = idn.check_limits(entry.spec, cfg, entry.label, eps=1e-4).max_residual
    fine = idn.check_limits(entry.spec, cfg, entry.label, eps=1e-5).max_residual
    assert fine <= coarse / 8 or fine < 1e-8
