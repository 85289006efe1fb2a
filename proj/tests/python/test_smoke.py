import json
import math
import os
import subprocess

import numpy as np
import pytest

import sglab


def test_table_roundtrip():
    t = sglab.ScrambleTable.random(6, 11)
    assert sorted(t.forward.tolist()) == list(range(64))
    assert np.array_equal(t.inverse[t.forward], np.arange(64))
    u = sglab.ScrambleTable.from_bytes(t.to_bytes())
    assert np.array_equal(u.forward, t.forward)
    assert t.cost(t.target) == 0


def test_apply_matches_dense():
    op = sglab.AdiabaticOperator(sglab.ScrambleTable.random(5, 2))
    x = np.linspace(-1.0, 1.0, op.dim)
    h = op.dense_matrix(0.3)
    assert np.allclose(h, h.T)
    assert np.allclose(op.apply(0.3, x), h @ x, atol=1e-13)
    with pytest.raises(ValueError):
        op.apply(0.3, x[:-1])


def test_spectrum_and_gap():
    op = sglab.AdiabaticOperator(sglab.ScrambleTable.random(7, 5))
    dense = sglab.dense_spectrum(op, 0.5)
    values, residuals = sglab.lowest_k(op, 0.5, 6)
    assert np.allclose(values, dense[:6], atol=1e-9)
    assert np.all(residuals <= 1e-10)
    assert math.isclose(sglab.gap(op, 0.5), dense[1] - dense[0], abs_tol=1e-9)


def test_identity_min_gap():
    op = sglab.AdiabaticOperator(sglab.ScrambleTable.identity(4))
    r = sglab.min_gap(op)
    assert abs(r["s_min"] - 0.5) < 1e-5
    assert abs(r["gap"] - math.sqrt(0.5)) < 1e-9


def test_bounds_sandwich():
    op = sglab.AdiabaticOperator(sglab.ScrambleTable.random(6, 3))
    e0, psi = sglab.ground_state(op, 0.6)
    assert np.all(psi > 0)
    rng = np.random.default_rng(0)
    phi = rng.uniform(0.1, 1.0, op.dim)
    lower, _ = sglab.cw_lower(op, 0.6, phi)
    upper = sglab.variational_upper(op, 0.6, phi / np.linalg.norm(phi))
    assert lower <= e0 <= upper


def test_evolve():
    op = sglab.AdiabaticOperator(sglab.ScrambleTable.identity(3))
    r = sglab.evolve(op, 50.0)
    assert r["success_probability"] > 0.99
    assert r["norm_drift"] < 1e-8


@pytest.mark.skipif("SGLAB_CLI" not in os.environ, reason="CLI not built")
def test_cli_json():
    out = subprocess.run(
        [os.environ["SGLAB_CLI"], "evolve", "--n", "3", "--perm", "identity", "--T", "1,10", "--format", "json"],
        check=True, capture_output=True, text=True,
    ).stdout
    doc = json.loads(out)
    assert doc["config"]["n"] == 3
    assert [row["T"] for row in doc["data"]] == [1.0, 10.0]
    assert doc["generator"]["id"] == sglab.generator_id
