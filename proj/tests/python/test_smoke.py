import math
import os
from pathlib import Path

import numpy as np
import pytest

import auvtrack

CONFIGS = Path(os.environ.get("AUVTRACK_CONFIG_DIR", Path(__file__).parents[2] / "configs"))


def test_channel():
    assert auvtrack.thorp_absorption(10.0) == pytest.approx(1.18703, abs=1e-4)
    assert auvtrack.transmission_loss(1000.0, 25.0) == pytest.approx(66.105, abs=0.01)
    assert auvtrack.slot_byte_budget(120.0, 4.0) == 60


def test_fiedler_path_graph():
    L = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    assert auvtrack.fiedler(L) == pytest.approx(1.0)


def test_estimate_noise_free():
    p0, v = np.array([-30.0, -100.0]), np.array([0.3, 0.4])
    rows = []
    for t in (0.0, 1.0, 2.0):
        for s, obs in enumerate((np.array([-17.0, -23.0]), np.array([20.0, -3.0]))):
            o = obs + np.array([t, 0.0])
            d = p0 + t * v - o
            rows.append((t, math.atan2(d[1], d[0]), o[0], o[1], s))
    out = auvtrack.estimate(rows, 2.0, 0.01)
    assert out is not None
    np.testing.assert_allclose(out["xi"], np.r_[p0 + 2.0 * v, v], atol=1e-6)
    assert auvtrack.estimate(rows[:2], 2.0, 0.01) is None


def test_validate():
    assert auvtrack.validate(str(CONFIGS / "scenario1.json")) == []
    bad = Path(__file__).parents[1] / "data" / "invalid.json"
    assert len(auvtrack.validate(str(bad))) >= 3


def test_run_deterministic():
    path = CONFIGS / "scenario1.json"
    s1, csv1 = auvtrack.run(path, seed=3)
    s2, csv2 = auvtrack.run(path, seed=3)
    assert csv1 == csv2
    assert s1 == s2
    assert csv1.splitlines()[0].startswith("round,t,")


def test_sweep_shape():
    rows = auvtrack.sweep(str(CONFIGS / "horizon_sweep.json"), [1, 2], 2)
    assert [r["horizon"] for r in rows] == [1, 2]
    assert all(len(r["per_seed"]) == 2 for r in rows)
