import numpy as np
import pytest
import sympy as sp

from qrlab.errors import DomainError, HypothesisError
from qrlab.mapdsl import Box, Disk, Union, fixture, single_piece
from qrlab.potential import (
    dichotomy_scan,
    gradient_closed_form,
    grad_example_3d,
    hessian_example_3d,
    hessian_from_wirtinger,
    reconstruct_potential,
    taylor_gauge_test,
)
from qrlab.potential.example3d import det_u_closed_form
from qrlab.potential.reconstruct import rectangle_residual
from qrlab.sampling import halton_points
from qrlab.wirtinger import map_jets

IZ = fixture("iz")
PTS = halton_points(100, Box(-0.9, 0.9, -0.9, 0.9), 9)


def _gauge_free(a, b):
    d = a - b
    return float(np.max(np.abs(d - d.mean())))


def test_rotation_potential():
    pot = reconstruct_potential(IZ)
    assert pot.residual <= 1e-8
    assert _gauge_free(pot(PTS), -np.abs(PTS) ** 2 / 2) <= 1e-9
    assert pot(pot.base) == 0


def test_constant_field():
    c = 1.7
    pot = reconstruct_potential(single_piece("ic", f"i*{c}"))
    assert _gauge_free(pot(PTS), -c * PTS.real) <= 1e-10


def test_i_conj_field():
    # f = i zbar: u = y, v = x, so psi_x = -x and psi_y = y
    pot = reconstruct_potential(single_piece("iconj", "i*conj(z)"))
    assert _gauge_free(pot(PTS), (PTS.imag ** 2 - PTS.real ** 2) / 2) <= 1e-9


def test_hypothesis_refused():
    with pytest.raises(HypothesisError):
        reconstruct_potential(single_piece("z", "z"))


def test_gradient_consistency():
    pot = reconstruct_potential(single_piece("f", "i*z + 0.5*i*conj(z)^2"), region=Box(-1, 1, -1, 1))
    h = 1e-5
    p = PTS * 0.9
    gx = (pot(p + h) - pot(p - h)) / (2 * h)
    gy = (pot(p + 1j * h) - pot(p - 1j * h)) / (2 * h)
    f = pot.map.evaluate(p)
    np.testing.assert_allclose(gx, -f.imag, atol=1e-4)
    np.testing.assert_allclose(gy, f.real, atol=1e-4)


def test_path_independence():
    assert rectangle_residual(IZ, -0.5 - 0.2j, 0.7 + 0.4j) <= 1e-12
    assert rectangle_residual(single_piece("z", "z"), -0.5 - 0.5j, 0.5 + 0.5j) > 0.5


def test_taylor_gauge():
    pot = reconstruct_potential(IZ)
    assert taylor_gauge_test(pot, 0).verdict == "negative"
    assert taylor_gauge_test(reconstruct_potential(IZ, region=Box(0, 2, 0, 2)), 1 + 1j).verdict == "negative"
    saddle = reconstruct_potential(single_piece("saddle", "conj(z)"))  # psi = xy
    assert taylor_gauge_test(saddle, 0).verdict == "mixed"


def test_dichotomy():
    assert dichotomy_scan(IZ, anchors=20).verdict == "negative"
    pos = dichotomy_scan(single_piece("miz", "-i*z"), anchors=20)
    assert pos.verdict == "positive" and pos.uniform
    mixed = dichotomy_scan(single_piece("saddle", "conj(z)"), anchors=20)
    assert mixed.verdict == "mixed" and mixed.counterexample is not None
    with pytest.raises(DomainError):
        dichotomy_scan(IZ, Union((Disk(-2, 1), Disk(2, 1))))


def test_extremal_hessian_angle():
    z = np.array([0.7, 2.5]) * np.exp(1j * np.pi / 8)
    np.testing.assert_allclose(det_u_closed_form(z), -16, atol=1e-12)
    pts = np.c_[z.real, z.imag, [0.3, -1]]
    rep = hessian_example_3d(pts)
    np.testing.assert_allclose(rep.det_u, -16, atol=1e-9)


def test_hessian_bounds(rng):
    rep = hessian_example_3d(rng.normal(size=(1000, 3)))
    s = rep.summary()
    assert s["formula_residual"] <= 1e-9
    assert s["det_psi_min"] >= 16 - 1e-9
    assert -28 - 1e-9 <= s["det_u_min"] and s["det_u_max"] <= -16 + 1e-9
    assert s["sign_residual"] <= 1e-9


def test_hessian_against_sympy(rng):
    x, y, w = sp.symbols("x y w", real=True)
    psi = (x ** 4 - 6 * x ** 2 * y ** 2 + y ** 4) / (x ** 2 + y ** 2) - w ** 2 / 2
    H = sp.lambdify((x, y, w), sp.hessian(psi, (x, y, w)), "numpy")
    pts = rng.normal(size=(20, 3))
    ours = grad_example_3d().hessian(pts)
    for p, h in zip(pts, ours):
        np.testing.assert_allclose(h, np.array(H(*p), dtype=float), atol=1e-9)


def test_wirtinger_hessian_route(rng):
    p = rng.normal(size=(200, 3))
    z = p[:, 0] + 1j * p[:, 1]
    np.testing.assert_allclose(hessian_from_wirtinger(z), grad_example_3d().hessian(p)[:, :2, :2], atol=1e-9)


def test_gradient_formula_matches_autodiff(rng):
    z = rng.normal(size=500) + 1j * rng.normal(size=500)
    _, fz, fb = map_jets(fixture("grad2d"), z)
    np.testing.assert_allclose(2 * fb, gradient_closed_form(z), atol=1e-9)


@pytest.mark.parametrize("t", [0.5, 2.0, 10.0])
def test_homogeneity(t, rng):
    psi = grad_example_3d()
    p = rng.normal(size=(100, 3))
    np.testing.assert_allclose(psi(t * p), t * t * psi(p), rtol=1e-13, atol=1e-12)


def test_singular_line():
    with pytest.raises(DomainError):
        grad_example_3d().hessian(np.array([[0.0, 0.0, 1.0]]))
