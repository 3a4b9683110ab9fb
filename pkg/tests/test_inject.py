import json

import numpy as np
import pytest

from qrlab.inject import (
    bilipschitz_check,
    find_collisions,
    lambda_shift,
    preimages,
    shifted_map,
    witnesses_csv,
    witnesses_json,
)
from qrlab.mapdsl import Box, fixture, single_piece
from qrlab.wirtinger import distortion_sweep, jet_autodiff


def _sound(m, ws):
    for w in ws:
        f1, f2 = m.evaluate(w.z1), m.evaluate(w.z2)
        assert abs(f1 - f2) <= 1e-8 * (1 + abs(f1))
        assert abs(w.z1 - w.z2) >= 1e-6
        assert all(b <= a for a, b in zip(w.history, w.history[1:]))


@pytest.mark.parametrize("M", [1, 2])
def test_noninj_pair(M):
    m = fixture("noninj", M=M)
    ws = find_collisions(m, Box(0.1, 3, -5 * M - 1, 5 * M + 1), 256, image=1 - 8 * M * M)
    hits = [w for w in ws if abs(w.z1 - (1 - 4j * M)) <= 1e-3 and abs(w.z2 - (1 + 4j * M)) <= 1e-3]
    assert hits
    assert abs(m.evaluate(hits[0].z1) - (1 - 8 * M * M)) <= 1e-6
    _sound(m, ws)


def test_generic_collisions_are_sound(noninj1):
    ws = find_collisions(noninj1, Box(0.1, 3, -6, 6), 128)
    assert ws
    _sound(noninj1, ws)


def test_branch_antipodal(branch1):
    ws = find_collisions(branch1, Box(-1.5, 1.5, -1.5, 1.5), 128)
    assert ws
    _sound(branch1, ws)
    assert any(abs(w.z1 + w.z2) <= 1e-6 for w in ws)


def test_identity_has_none():
    assert find_collisions(fixture("identity"), Box(0, 1, 0, 1), 64) == []


def test_preimages(noninj1):
    pre = preimages(noninj1, -7, Box(0.1, 3, -6, 6))
    assert len(pre) == 2
    np.testing.assert_allclose(sorted(pre, key=lambda z: z.imag), [1 - 4j, 1 + 4j], atol=1e-6)


def test_exports(noninj1):
    ws = find_collisions(noninj1, Box(0.1, 3, -6, 6), 128, image=-7)
    data = json.loads(witnesses_json(ws))
    assert data["witnesses"][0]["image"]["re"] == pytest.approx(-7)
    assert witnesses_csv(ws).splitlines()[0] == "x1,y1,x2,y2,image_distance"


def test_bilipschitz_scaling():
    lam = 1.5
    b = bilipschitz_check(single_piece("s", f"{lam}*z"), lam, 1.0)
    assert b.passed and abs(b.min_ratio - lam) <= 1e-9


def test_bilipschitz_linear():
    m = single_piece("lin", "2*z + 0.5*conj(z)")
    b = bilipschitz_check(m, np.sqrt(3.75), 5 / 3)
    assert b.passed
    assert b.bound == pytest.approx(1.5)
    assert 1.5 - 1e-9 <= b.min_ratio <= 2.5


def test_bilipschitz_isometry():
    b = bilipschitz_check(fixture("iz"), 1.0, 1.0)
    assert b.passed and abs(b.min_ratio - 1) <= 1e-9


def test_lambda_shift_constant():
    rep = lambda_shift(single_piece("zero", "0"), 2.0)
    assert rep.identity_residual <= 1e-12 and rep.floor_min == pytest.approx(4.0)


def test_lambda_shift_square():
    g = shifted_map(fixture("power", n=2), 1.0)
    j = jet_autodiff(g, 1j)
    assert j.jacobian == pytest.approx(5.0)


def test_lambda_shift_branch(branch1):
    rep = lambda_shift(branch1, 0.1, Box(-2, 2, -2, 2))
    assert rep.identity_residual <= 1e-9
    assert not rep.hypothesis_holds  # Re f_z < 0 somewhere in the full box
    right = lambda_shift(branch1, 0.1, Box(0.5, 1.5, -0.5, 0.5))
    assert right.hypothesis_holds and right.floor_holds


def test_shifted_branch_is_bilipschitz(branch1):
    lam, box = 0.1, Box(0.5, 1.5, -0.5, 0.5)
    g = shifted_map(branch1, lam)
    K = distortion_sweep(g, box, 128).K_hat * (1 + 1e-6)
    b = bilipschitz_check(g, lam, K, box)
    assert b.certificate["ok"] and b.passed
