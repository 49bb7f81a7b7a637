import math

import numpy as np
import pytest

import hclab


def test_zoo_lists_core_families():
    ids = [i for i, _ in hclab.zoo()]
    assert any(i.startswith("rolewicz") for i in ids)
    assert any(i.startswith("salas") for i in ids)


def test_materialize_rolewicz():
    m = hclab.materialize("rolewicz:2.0", 5)
    assert m.shape == (5, 5)
    want = np.zeros((5, 5), dtype=complex)
    for i in range(4):
        want[i, i + 1] = 2.0
    assert np.array_equal(m, want)


def test_certificate_2b_passes_and_half_b_fails():
    r = hclab.check_certificate("rolewicz:2.0", K=10, d=32)
    assert r["schema"] == 1
    assert r["pass"] is True
    assert hclab.check_certificate("rolewicz:0.5", K=10, d=32)["pass"] is False


def test_first_hit_at_four_with_witness():
    r = hclab.first_hit("rolewicz:2.0", "e1:0.1", "e2:0.1", n_max=16)
    assert r["feasible"] and r["n"] == 4
    x = np.array([complex(*z) for z in r["x_witness"]])
    assert abs(x[0] - 1) < 1e-9 and abs(x[5] - 1 / 16) < 1e-9


def test_ball_as_numpy_pair():
    u = (np.array([1, 0, 0], dtype=complex), 0.1)
    v = (np.array([0, 1, 0], dtype=complex), 0.1)
    assert hclab.intersects("rolewicz:2.0", 4, u, v)["feasible"]
    assert not hclab.intersects("rolewicz:2.0", 1, u, v)["feasible"]


def test_witness_and_errors():
    r = hclab.construct_witness("rolewicz:2.0", "e1xe1", "e1xe1", eps=0.5, d=64)
    assert r["success"] and r["residual_a"] < 0.5 and r["residual_b"] < 0.5
    with pytest.raises(ValueError):
        hclab.materialize("nope", 4)
    with pytest.raises(hclab.GuardBandError):
        hclab.intersects("rolewicz:2.0", 8, "e1:0.1", "e2:0.1", d=4)


def test_battery_small_config():
    cfg = {"n_max": 32, "ball_samples": 4, "subsequences": 2, "seed": 3}
    good = hclab.run_battery("rolewicz:2.0", cfg)
    bad = hclab.run_battery("identity", cfg)
    assert good["consistent"] and bad["consistent"]
    assert all(c["verdict"] == "pass" for c in good["conditions"])
    assert all(c["verdict"] != "pass" for c in bad["conditions"])
    assert hclab.run_battery("rolewicz:2.0", cfg) == good


def test_required_dim_guard_band():
    assert hclab.required_dim("rolewicz:2.0", 2, 10) >= 12
    assert not math.isnan(hclab.default_config()["tol"])
