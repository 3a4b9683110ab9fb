import math

import numpy as np
import pytest

from qrlab.errors import (
    DomainSingularityError,
    DslSyntaxError,
    ParameterRangeError,
    UndeclaredParameterError,
    UnknownFixtureError,
)
from qrlab.mapdsl import (
    FIXTURE_IDS,
    Box,
    Disk,
    HalfPlane,
    branch_delta,
    coverage,
    fixture,
    fixture_from_spec,
    parse_expression,
    parse_map,
    piece_consistency,
    single_piece,
)
from qrlab.mapdsl.expr import evaluate as eval_expr
from qrlab.sampling import halton_in_domain, halton_points

DEFAULT_PARAMS = {"scale-rotate": {"c": 2 - 1j}, "power": {"n": 3}, "conj-power": {"n": 2}}
PLANAR = [f for f in FIXTURE_IDS if f != "grad-example-3d"]


def planar(name):
    return fixture(name, **DEFAULT_PARAMS.get(name, {}))


def test_identity_map():
    m = parse_map("piece: true -> z")
    assert m.evaluate(3 + 2j) == 3 + 2j
    assert len(m.pieces) == 1


def test_undeclared_parameter():
    with pytest.raises(UndeclaredParameterError):
        parse_map("piece: true -> z ^ w")


def test_syntax_error_has_position():
    with pytest.raises(DslSyntaxError) as info:
        parse_map("piece: true -> z +* 2")
    assert "column" in str(info.value)


def test_guard_type_error():
    with pytest.raises(DslSyntaxError):
        parse_map("piece: z -> z")


def test_noninj_structure(noninj1):
    assert len(noninj1.pieces) == 3
    cov = coverage(noninj1, samples=10_000)
    assert cov.ok


@pytest.mark.parametrize("M", [1, 2, 5])
def test_noninj_values(M):
    m = fixture("noninj", M=M)
    for z in (1 + 4j * M, 1 - 4j * M):
        assert abs(m.evaluate(z) - (1 - 8 * M * M)) < 1e-12


def test_noninj_parameter_range():
    with pytest.raises(ParameterRangeError):
        fixture("noninj", M=0.5)


def test_branch_delta():
    assert branch_delta(2.0) == pytest.approx(1.0, abs=1e-15)
    eps = 1.0
    assert branch_delta(eps) == pytest.approx(eps / (2 + math.sqrt(4 - eps * eps)))


def test_grad2d_values():
    m = fixture("grad2d")
    z = halton_points(50, Box(-1, 1, -1, 1), 3)
    np.testing.assert_allclose(m.evaluate(z).real, np.real(z ** 4) / np.abs(z) ** 2, atol=1e-14)
    assert m.evaluate(0j) == 0


def test_fixture_spec_and_aliases():
    m = fixture_from_spec("fixture:branch?eps=2")
    assert m.param_dict["eps"] == 2.0
    assert fixture_from_spec("fixture:power?n=3").evaluate(2.0) == 8
    with pytest.raises(UnknownFixtureError):
        fixture_from_spec("fixture:nope")
    with pytest.raises(UnknownFixtureError):
        fixture("identity", q=1)


def test_division_by_zero_is_singular():
    m = single_piece("recip", "1/z")
    with pytest.raises(DomainSingularityError):
        m.evaluate(0j)
    assert np.isnan(m.evaluate(np.array([0j]), errors="nan")[0])


def test_parameter_binding():
    m = parse_map("param a = 2\npiece: true -> a*z")
    assert m.evaluate(1j) == 2j
    assert m.with_params(a=3).evaluate(1j) == 3j


def test_domains():
    assert Disk(0, 1).contains(0.5) and not Disk(0, 1).contains(2)
    h = HalfPlane(1)
    assert h.contains(1 + 5j) and not h.contains(-1)
    assert Box.parse("0 1 -2 2").as_list() == [0, 1, -2, 2]
    with pytest.raises(ValueError):
        Box.parse("1 0 0 1")


@pytest.mark.parametrize("name", PLANAR)
def test_roundtrip(name):
    m = planar(name)
    back = parse_map(m.source())
    z = halton_in_domain(1000, Box(-2, 2, -2, 2), m.domain, 7)
    a = m.evaluate(z, errors="nan")
    b = back.evaluate(z, errors="nan")
    assert np.array_equal(a, b, equal_nan=True)
    assert np.array_equal(m.select(z), back.select(z))


@pytest.mark.parametrize("name", PLANAR)
def test_coverage(name):
    assert coverage(planar(name), samples=10_000).ok


def test_reflection_symmetry(branch1):
    z = halton_points(1000, Box(-2, 2, -2, 2), 5)
    assert np.array_equal(branch1.evaluate(np.conj(z)), np.conj(branch1.evaluate(z)))


def test_consistency(branch1, noninj1):
    assert piece_consistency(branch1, 1000).max_disagreement <= 1e-9
    rep = piece_consistency(noninj1, 1000)
    assert rep.max_disagreement <= 1e-9 and rep.boundary_samples > 0
    assert piece_consistency(fixture("identity")).max_disagreement == 0


def test_noninj_ray_agreement(noninj1):
    t = np.linspace(0.1, 3, 50)
    z = 2 * t + 1j * t  # re z = 2M im z
    p0 = noninj1.pieces[0].expr
    p2 = noninj1.pieces[2].expr
    params = noninj1.param_dict
    np.testing.assert_allclose(eval_expr(p0, z, params), eval_expr(p2, z, params), atol=1e-9)


def test_expression_precedence():
    e = parse_expression("-z^2")
    assert eval_expr(e, np.array([2.0 + 0j]), {})[0] == -4
