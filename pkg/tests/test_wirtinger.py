import numpy as np
import pytest

from qrlab.mapdsl import FIXTURE_IDS, Box, fixture, single_piece
from qrlab.sampling import halton_points
from qrlab.wirtinger import (
    HalfSpaceKind,
    InclusionSpec,
    RealMatrix2,
    classify_halfspace,
    distortion_sweep,
    frobenius_constant,
    gradient_field,
    homotopy_distortion,
    in_inclusion,
    inner,
    jet_autodiff,
    jet_finite_difference,
    jet_to_matrix,
    map_jets,
    matrix_to_jet,
    parse_predicate,
    qr,
    re_fz_nonneg,
    sector,
)
from qrlab.wirtinger.jets import boundary_band

PARAMS = {"scale-rotate": {"c": 2 - 1j}, "power": {"n": 3}, "conj-power": {"n": 2}}
PLANAR = [f for f in FIXTURE_IDS if f != "grad-example-3d"]


def test_identity_jet():
    j = jet_autodiff(fixture("identity"), 0.3 - 0.7j)
    assert (j.fz, j.fzbar) == (1, 0)
    fd = jet_finite_difference(fixture("identity"), 0.3 - 0.7j, h=1e-5)
    assert abs(fd.fz - 1) <= 1e-9 and abs(fd.fzbar) <= 1e-9


def test_square_jet():
    fd = jet_finite_difference(fixture("power", n=2), 1 + 1j, h=1e-5)
    assert abs(fd.fz - (2 + 2j)) <= 1e-6


def test_branch_cross_validation(branch1):
    for z in (0.7 + 0.4j, -1.2 + 0.9j, -0.5 - 0.5j):
        a = jet_autodiff(branch1, z)
        b = jet_finite_difference(branch1, z, h=1e-5)
        assert abs(a.fz - b.fz) <= 1e-5 and abs(a.fzbar - b.fzbar) <= 1e-5


@pytest.mark.parametrize("name", PLANAR)
def test_autodiff_matches_finite_difference(name):
    m = fixture(name, **PARAMS.get(name, {}))
    z = halton_points(600, Box(-2, 2, -2, 2), 11)
    z = z[m.domain.contains(z) & ~boundary_band(m, z, 1e-3)][:200]
    _, fz, fb = map_jets(m, z)
    for zi, a, b in zip(z, fz, fb):
        fd = jet_finite_difference(m, zi, h=1e-5)
        assert abs(a - fd.fz) <= 1e-5 * (1 + abs(a))
        assert abs(b - fd.fzbar) <= 1e-5 * (1 + abs(a))


def test_holomorphic_fzbar_is_exact_zero():
    m = single_piece("holo", "exp(z) * z^3 + sqrt(z + 3) / (z + 3)")
    z = halton_points(200, Box(-1, 1, -1, 1), 2)
    _, _, fb = map_jets(m, z)
    assert np.all(fb == 0)


def test_matrix_examples():
    assert np.array_equal(jet_to_matrix(1, 0).as_array(), np.eye(2))
    assert np.array_equal(jet_to_matrix(1j, 0).as_array(), [[0, -1], [1, 0]])
    M = 1.0
    j = jet_autodiff(fixture("noninj", M=M), 3 + 0.1j)
    assert np.allclose(jet_to_matrix(j.fz, j.fzbar).as_array(), (8 * M * M - 1) * np.eye(2))
    assert inner(RealMatrix2.identity(), RealMatrix2.identity()) == 2


def test_halfspace_kinds():
    assert classify_halfspace(RealMatrix2.identity()) == HalfSpaceKind.POSITIVE
    assert classify_halfspace(RealMatrix2(1, 0, 0, -1)) == HalfSpaceKind.NEGATIVE
    assert classify_halfspace(RealMatrix2(1, 0, 0, 0)) == HalfSpaceKind.SINGULAR


def test_inclusion_examples():
    res = in_inclusion(RealMatrix2.identity(), InclusionSpec(2, RealMatrix2.identity()))
    assert res.inside and res.distortion_margin == 0 and res.halfspace_margin == 2
    swap = RealMatrix2(0, 1, 1, 0)
    assert not in_inclusion(swap, InclusionSpec(5, RealMatrix2.identity())).inside


def test_jet_identities(rng):
    fz = rng.normal(size=500) + 1j * rng.normal(size=500)
    fb = rng.normal(size=500) + 1j * rng.normal(size=500)
    X = jet_to_matrix(fz, fb)
    a, b = matrix_to_jet(X)
    np.testing.assert_allclose(a, fz, rtol=0, atol=1e-15)
    np.testing.assert_allclose(b, fb, rtol=0, atol=1e-15)
    np.testing.assert_allclose(inner(X, RealMatrix2.identity()), 2 * fz.real, atol=1e-13)
    np.testing.assert_allclose(X.det, np.abs(fz) ** 2 - np.abs(fb) ** 2, atol=1e-12)


def test_frobenius_consistency(rng):
    fz = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    k = rng.uniform(0, 0.95, 1000)
    fb = k * np.abs(fz) * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    X = jet_to_matrix(fz, fb)
    K = (1 + k) / (1 - k)
    assert np.all(X.frobenius2 <= frobenius_constant(K) * X.det * (1 + 1e-12))


def test_identity_distortion(unit_box):
    rep = distortion_sweep(fixture("identity"), unit_box, 64)
    assert rep.k_hat == 0 and rep.K_hat == 1


@pytest.mark.parametrize("eps", [0.5, 1.0, 2.0])
def test_branch_distortion(eps):
    m = fixture("branch", eps=eps)
    rep = distortion_sweep(m, Box(-2, 2, -2, 2), 256, predicate=sector(eps))
    assert rep.k_hat == pytest.approx(1 / np.sqrt(1 + eps * eps), abs=1e-6)
    assert rep.violations == 0
    assert distortion_sweep(m, Box(-2, 2, -2, 2), 128, predicate=re_fz_nonneg(), refine=False).violations > 0


def test_noninj_cone():
    for M in (1.0, 2.0):
        m = fixture("noninj", M=M)
        rep = distortion_sweep(m, Box(0.05, 3, -3, 3), 128, predicate=parse_predicate(f"cone({M})"))
        assert rep.violations == 0


def test_predicate_parsing():
    assert parse_predicate("qr").name == qr().name
    with pytest.raises(ValueError):
        parse_predicate("nonsense")


def test_homotopy_start_and_decay(branch1, unit_box):
    table = homotopy_distortion(branch1, unit_box, [0, 0.5, 0.9, 0.99], restrict=True)
    plain = distortion_sweep(branch1, unit_box, 128, mask=re_fz_nonneg(), refine=False)
    assert table.k[0] == pytest.approx(plain.k_hat, abs=1e-12)
    assert table.monotone and table.k[-1] < 0.02
    assert max(r.formula_residual for r in table.rows) <= 1e-9


def test_gradient_field_of_grad2d():
    u = fixture("grad2d")
    g = gradient_field(u)
    z = halton_points(50, Box(-1, 1, -1, 1), 4)
    h = 1e-6
    ux = (u.evaluate(z + h) - u.evaluate(z - h)).real / (2 * h)
    uy = (u.evaluate(z + 1j * h) - u.evaluate(z - 1j * h)).real / (2 * h)
    np.testing.assert_allclose(g.evaluate(z), ux + 1j * uy, atol=1e-6)
    with pytest.raises(ValueError):
        gradient_field(fixture("identity"))
