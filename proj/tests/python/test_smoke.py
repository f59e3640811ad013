import math

import numpy as np
import pytest

import ssblowup


def test_ground_state_constants():
    gs = ssblowup.ground_state(1, 5.0)
    assert gs.kappa == pytest.approx(math.sqrt(2) * 3 ** 0.25, rel=1e-8)
    assert gs.n_c == pytest.approx(math.sqrt(3) * math.pi / 4, rel=1e-8)
    r = gs.r
    assert isinstance(r, np.ndarray) and r.shape == gs.q.shape
    exact = np.array([ssblowup.closed_form_soliton_1d(5.0, x) for x in r[r <= 20]])
    assert np.max(np.abs(gs.q[r <= 20] - exact)) < 1e-8


def test_airy_wronskian():
    for s in (-10.0, 0.0, 3.0):
        ai, aid, bb, bbd = ssblowup.airy(s)
        assert ai * bbd - aid * bb == pytest.approx(1.0, abs=1e-10)
        assert bb.imag == pytest.approx(math.pi * ai, abs=1e-12)


def test_solve_coupled():
    sol = ssblowup.solve(1e-2, d=1, couple_p=True)
    assert sol["residual"] <= 1e-8
    assert abs(sol["b"] / sol["b_sigma"] - 1) < 0.05
    g = sol["diagnostics"]
    assert abs(g["energy"]) <= max(1e-3 * g["kinetic"], g["energy_error"])
    assert abs(g["tail_amp"] / sol["rho"] - 1) < 0.02
    r, psi = sol["r"], sol["psi"]
    assert r[0] == 0.0 and np.all(np.diff(r) > 0)
    assert psi.dtype == np.complex128 and psi.shape == r.shape


def test_sweep_trend_and_errors():
    rows = ssblowup.sweep([1e-2, 1e-3], d=1, p=5.0)
    assert all(r["converged"] for r in rows)
    assert abs(rows[1]["b_dev"]) < abs(rows[0]["b_dev"])
    with pytest.raises(ValueError):
        ssblowup.sweep([1e-3, 1e-2])
    with pytest.raises(ValueError):
        ssblowup.solve(0.5)


def test_verify_suites():
    res = ssblowup.verify()
    assert len(res) == 8 and all(s["passed"] for s in res)
    bad = {s["name"]: s["passed"] for s in ssblowup.verify(perturb_kappa_b=0.01)}
    assert bad["kappa_b_identity"] is False
