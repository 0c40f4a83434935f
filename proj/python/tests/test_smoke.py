"""Smoke tests for the Python surface."""

import json
import math

import pytest

import rpd

LASSO_SPEC = {
    "version": 1,
    "family": "lasso",
    "dimensions": {"features": 8, "samples": 16},
    "tau": 0.1,
    "data_seed": 7,
    "algorithm": "alg1",
    "activation": {"kind": "bernoulli", "prob": 0.5},
    "errors": {"kind": "none"},
    "lambda": 1.0,
    "stop": {"max_iters": 4000, "tol": 1e-13, "window": 10},
    "seed": 3,
}


def test_soft_threshold():
    f = rpd.ProxFn.l1(2, 1.0)
    y = rpd.prox_metric(f, [1.0, 1.0], [2.0, -0.5])
    assert y == pytest.approx([1.0, 0.0])


def test_conjugate_prox_clips():
    f = rpd.ProxFn.l1(2, 1.0)
    y = rpd.prox_conjugate(f, [1.0, 1.0], [0.4, 3.0])
    assert y == pytest.approx([0.4, 1.0])


def test_alpha_hat_value():
    assert rpd.alpha_hat(0.5, 2.0, 1.0) == pytest.approx(1.0 + math.sqrt(3.0))
    assert rpd.alpha_hat(0.3, 1.2, 1.2) == pytest.approx(1.0)


def test_project_consensus():
    assert rpd.project_consensus([1.0, 3.0], 2) == pytest.approx([2.0, 2.0])


def test_scaled_norm_scalar():
    assert rpd.scaled_norm([[2.0]], [0.25], [0.25], 1e-12) == pytest.approx(0.5)


def test_check_and_run_are_deterministic():
    text = json.dumps(LASSO_SPEC)
    report = rpd.check(text)
    assert report["pass"]
    assert report["activation_valid"]
    a = rpd.run(text, seed=3)
    b = rpd.run(text, seed=3)
    assert a["csv"] == b["csv"]
    assert a["config_hash"] == b["config_hash"]
    ref = rpd.reference(text)
    assert a["final_objective"] - ref["objective"] < 1e-3
    assert ref["residual"] < 1e-9


def test_invalid_spec_raises():
    bad = dict(LASSO_SPEC)
    bad["mystery"] = 1
    with pytest.raises(ValueError):
        rpd.check(json.dumps(bad))
