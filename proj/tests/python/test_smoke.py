import math

import numpy as np
import pytest

import finpoisson as fp


def test_randers_values():
    s = fp.RandersStructure.minkowski_randers(np.array([0.3, 0.0]))
    x = np.zeros(2)
    assert s.F(x, np.array([1.0, 0.0])) == pytest.approx(1.3, rel=1e-15)
    assert s.F(x, np.array([-1.0, 0.0])) == pytest.approx(0.7, rel=1e-15)
    k = s.constants(x)
    assert k.l_F * k.r_F**2 == pytest.approx(1.0, rel=1e-14)
    alpha = np.array([0.2, -1.1])
    J = s.legendre(x, alpha)
    assert float(alpha @ J) == pytest.approx(s.F_dual(x, alpha) ** 2, rel=1e-12)


def test_invalid_structure_raises_value_error():
    with pytest.raises(ValueError):
        fp.RandersStructure.minkowski_randers(np.array([1.5, 0.0]))


def test_radial_flat_closed_form():
    sol = fp.solve_radial(3, 0.1, 0.0, 1.0, grid=512)
    r, f = sol["r"], sol["f"]
    exact = np.array([fp.sigma_closed(3, 0.1, 0.0, 1.0, x) for x in r])
    sel = r >= 0.01
    assert np.max(np.abs(f[sel] - exact[sel])) <= 1e-9
    assert abs(f[-1]) <= 1e-12


def test_radial_rejects_bad_dimension():
    with pytest.raises(fp.InputError):
        fp.solve_radial(2, 0.0, 0.0, 1.0)


def test_pde_forward_disc():
    out = fp.solve_pde("forward", np.zeros(2), 1.0, 81)
    u, mask = out["u"], out["interior"]
    X, Y = np.meshgrid(out["x"], out["y"])
    exact = (1.0 - X**2 - Y**2) / 4.0
    assert np.max(np.abs(u[mask] - exact[mask])) <= 2e-3 * 0.25
    assert out["csv"].startswith("i,j,x,y,u,lower_bound,upper_bound\n")


def test_verify_poincare():
    rep = fp.verify("poincare")
    assert rep["schema"] == "1"
    ids = {c["id"]: c for c in rep["checks"]}
    assert ids["poincare.I_plus"]["expected"] == pytest.approx(math.pi / 30, rel=1e-15)
    assert ids["poincare.I_plus"]["pass"]


def test_model_volume():
    assert fp.V_cn(0.0, 3, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-13)
    assert fp.w_c(0.0, 3, 0.5) == pytest.approx(0.25 / 6, rel=1e-13)
