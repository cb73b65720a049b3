import math

import numpy as np
import pytest

import selfsim


def test_exponents_golden_ratio():
    m_minus, m_plus = selfsim.exponents(0.0)
    assert m_plus == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-12)
    assert m_minus * m_plus == pytest.approx(1.0, abs=1e-12)


def test_rhs_values():
    assert selfsim.rhs_shock(1.0, 2.0, 1.0) == pytest.approx(-0.5)
    assert selfsim.rhs_rarefaction(1.0, 2.0, 1.0) == pytest.approx(-2.5)


def test_shock_bvp_profile():
    r = selfsim.solve_shock_bvp()
    assert r.outcome == "ConvergesTo"
    assert -1.0 < r.tuned_param < -0.8
    p = r.profile
    assert np.all(np.diff(p.grid) > 0)
    assert abs(p.f[-1] - 1.0) < 1e-6
    assert selfsim.ode_residual(p)["max_abs"] < 1e-8
    assert selfsim.reflection_check(p)["max_abs"] <= 10 * selfsim.ode_residual(p)["max_abs"]
    f, fp, fpp = p.eval(1.0)
    assert 0 < f < 1 and fp > 0


def test_blowup_and_pair():
    f = selfsim.solve_blowup_family(0.5, -1.0)
    amp, q, r2 = selfsim.fit_tail(f)
    assert q == pytest.approx(-1.0, rel=0.05)
    assert selfsim.parabolicity(f) > 0
    pair = selfsim.build_extension_pair(-0.5, -1.0)
    assert pair.C_rescaled == pytest.approx(pair.C0, rel=1e-3)


def test_errors_carry_kind():
    cfg = selfsim.ShootConfig()
    cfg.A_lo, cfg.A_hi = -10.0, -5.0
    with pytest.raises(selfsim.SelfsimError) as info:
        selfsim.solve_shock_bvp(cfg)
    assert info.value.kind == "NoBracket"
    with pytest.raises(selfsim.SelfsimError) as info:
        selfsim.parse_config("bogus = 1")
    assert info.value.kind == "UnknownKey"


def test_cli_exponents(tmp_path):
    code, out, _ = selfsim.run(["exponents", "--alpha", "0", "--out", str(tmp_path)])
    assert code == 0
    assert "m_plus=2.61803" in out
    assert (tmp_path / "exponents.json").exists()


def test_csv_roundtrip(tmp_path):
    p = selfsim.solve_farfield(0.0).profile
    path = tmp_path / "p.csv"
    selfsim.write_profile_csv(p, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 0], p.grid)
    assert np.allclose(data[:, 1], 1.0, atol=1e-10)
