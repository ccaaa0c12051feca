import math

import numpy as np
import pytest

import bilayer_lab as bl


def test_potential():
    assert bl.phi(1.0) == pytest.approx(-1.0 / 6.0, abs=1e-15)
    assert bl.pi_eps(0.02, eps=0.01) == pytest.approx(6.25, abs=1e-12)
    with pytest.raises(bl.DomainError):
        bl.phi(-1.0)


def test_lens_build_and_profile():
    sol = bl.build("lens", sigma=0.2, L=2.0, h1_m=0.4, h_m=0.2)
    assert sol["lambda1_0"] == pytest.approx(5.0 / 6.0, abs=1e-12)
    assert sol["solution_id"] == 1
    assert len(sol["contact_lines"]) == 1
    prof = bl.sample_profile("lens", 0.2, 2.0, 0.4, 0.2, eps=0.01, grid_points=3201)
    assert prof["x"].shape == (3201,)
    assert np.all(prof["h1"] > 0) and np.all(prof["h"] > 0)
    assert not prof["resolution_warning"]


def test_constraint_violation():
    with pytest.raises(bl.ConstraintViolation):
        bl.build("zigzag", sigma=0.2, L=0.5, h1_m=0.3, h_m=0.45)
    report = dict(bl.existence_report("zigzag", 0.2, 0.5, 0.3, 0.45))
    assert report["zigzag.lower_merge_s_to_0"] < 0
    with pytest.raises(bl.UsageError):
        bl.build("nonsense", 0.2, 2.0, 0.4, 0.2)


def test_chain_and_diagram():
    assert bl.parse_chain("(2-0-02)") == "(2-0-02)"
    prof = bl.assemble_chain("(2-0-02)", 1.2, 2.0, [(0.08, 0.15)], eps=0.005, grid_points=1601)
    assert np.allclose(prof["h1"], prof["h1"][::-1], atol=1e-10)
    I, II = bl.symmetric_points(0.2)
    assert I == pytest.approx(0.527046, abs=1e-6)
    assert II == pytest.approx(0.577350, abs=1e-6)
    assert bl.ed_membership("lens", 0.2, 0.4, sigma=0.2)
    assert bl.reflect_check(1.0, resolution=60)["violations"] == 0


def test_simulate_conserves_mass():
    x = np.linspace(-1.0, 0.0, 41)
    h1 = 0.2 + 0.05 * np.cos(math.pi * x)
    h = 0.3 - 0.04 * np.cos(2 * math.pi * x)
    out = bl.simulate(x, h1, h, sigma=0.7, eps=0.05, mu=1.3, t_end=0.01, dt_max=1e-3)
    assert not out["aborted"]
    assert out["t"] == pytest.approx(0.01)
    m = out["trajectory"]["mass1"]
    assert np.max(np.abs(m - m[0])) <= 1e-9 * m[0]
    assert np.all(np.diff(out["trajectory"]["energy"]) <= 1e-12 * np.abs(out["trajectory"]["energy"][1:]))
