"""Property-based checks of the core invariants."""

import json

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from qrlab.flow import TraceConfig, Verdict, circle, green_identity, trace
from qrlab.index import local_index
from qrlab.inject import find_collisions
from qrlab.mapdsl import Box, fixture, parse_map, single_piece
from qrlab.mapdsl.expr import to_source
from qrlab.potential import grad_example_3d
from qrlab.reports import dumps
from qrlab.wirtinger import jet_to_matrix, map_jets

coef = st.floats(-3, 3, allow_nan=False).filter(lambda x: abs(x) > 1e-3)
cplx = st.builds(complex, coef, coef)
point = st.builds(complex, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
SLOW = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def lit(c: complex) -> str:
    return f"({c.real!r} + {c.imag!r}*i)"


leaf = st.one_of(st.just("z"), st.just("conj(z)"), cplx.map(lit))


def _combine(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})")
    unary = st.tuples(st.sampled_from(["conj", "re", "im", "exp"]), children).map(lambda t: f"{t[0]}({t[1]})")
    power = st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}")
    return st.one_of(binary, unary, power)


formulas = st.recursive(leaf, _combine, max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_print_parse_roundtrip(formula):
    m = single_piece("f", formula)
    back = parse_map(m.source())
    z = np.linspace(-1, 1, 17) + 0.37j * np.linspace(1, -1, 17)
    assert np.array_equal(m.evaluate(z, errors="nan"), back.evaluate(z, errors="nan"), equal_nan=True)
    assert to_source(back.pieces[0].expr) == to_source(m.pieces[0].expr)


@settings(max_examples=60, deadline=None)
@given(formulas, point)
def test_jets_match_finite_differences(formula, z0):
    m = single_piece("f", formula)
    _, fz, fb = map_jets(m, np.array([z0]))
    h = 1e-6
    fx = (m.evaluate(z0 + h) - m.evaluate(z0 - h)) / (2 * h)
    fy = (m.evaluate(z0 + 1j * h) - m.evaluate(z0 - 1j * h)) / (2 * h)
    scale = 1 + abs(fz[0]) + abs(fb[0]) + abs(m.evaluate(z0))
    assert abs(fz[0] - (fx - 1j * fy) / 2) <= 1e-5 * scale
    assert abs(fb[0] - (fx + 1j * fy) / 2) <= 1e-5 * scale


@given(cplx, cplx, point)
def test_linear_jets_and_jacobian(a, b, z0):
    m = single_piece("lin", f"{lit(a)}*z + {lit(b)}*conj(z)")
    _, fz, fb = map_jets(m, np.array([z0]))
    assert np.isclose(fz[0], a, atol=1e-12) and np.isclose(fb[0], b, atol=1e-12)
    X = jet_to_matrix(fz[0], fb[0])
    assert np.isclose(X.det, abs(a) ** 2 - abs(b) ** 2, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), cplx, st.booleans())
def test_index_of_scaled_monomials(n, c, conj):
    body = f"conj(z)^{n}" if conj else f"z^{n}"
    idx = local_index(single_piece("mono", f"{lit(c)}*{body}"), 0).index
    assert idx == (-n if conj else n)


@SLOW
@given(cplx.map(lambda c: 0.3 * c / abs(c)), st.floats(0.3, 0.7))
def test_rotation_orbits_close_with_positive_integral(c, r):
    # f = i (z - c) circulates around c; seeds at distance r close up
    m = single_piece("rot", f"i*(z - {lit(c)})")
    t = trace(m, c + r, 1, TraceConfig(R=2, center=c))
    assert t.verdict == Verdict.CLOSES
    rep = green_identity(m, t)
    val = rep.trajectory_integral
    assert val.real > 0 and abs(val.imag) <= 1e-6 * abs(val)
    assert abs(rep.energy - 2 * np.pi * r * r) <= 1e-5 * rep.energy


@SLOW
@given(st.builds(lambda r, a: r * np.exp(1j * a), st.floats(0.05, 0.7), st.floats(0, 2 * np.pi)),
       st.floats(0.5, 1.0), st.sampled_from([1, -1]))
def test_time_reversal(seed, scale, direction):
    pos = single_piece("p", f"{scale!r}*(z + z^2/3)")
    neg = single_piece("n", f"-{scale!r}*(z + z^2/3)")
    a = trace(pos, seed, direction)
    b = trace(neg, seed, -direction)
    assert a.verdict == b.verdict
    assert np.array_equal(a.z, b.z)


@SLOW
@given(formulas, point.map(lambda z: 0.3 * z), st.floats(0.2, 0.9))
def test_green_identity_on_circles(formula, c, r):
    rep = green_identity(single_piece("f", formula), circle(c, r))
    assert rep.green_residual_rel <= 1e-4


@given(st.sampled_from([0.5, 2.0, 10.0]), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_homogeneity(t, x):
    x = np.array(x)
    if abs(x[0]) + abs(x[1]) < 1e-3:
        x[0] = 1.0
    psi = grad_example_3d()
    assert np.isclose(psi(t * x), t * t * psi(x), rtol=1e-12, atol=1e-12)


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([1.0, 1.5, 2.0]), st.integers(96, 200))
def test_witness_soundness(M, res):
    m = fixture("noninj", M=M)
    ws = find_collisions(m, Box(0.1, 3, -5 * M - 1, 5 * M + 1), res, max_candidates=16)
    for w in ws:
        f1, f2 = m.evaluate(w.z1), m.evaluate(w.z2)
        assert abs(f1 - f2) <= 1e-8 * (1 + abs(f1))
        assert abs(w.z1 - w.z2) >= 1e-6
        assert all(b <= a for a, b in zip(w.history, w.history[1:]))


json_leaf = st.one_of(st.none(), st.booleans(), st.integers(-10, 10), st.floats(allow_nan=True),
                      st.complex_numbers(allow_nan=True), st.text(max_size=5))
json_tree = st.recursive(json_leaf, lambda c: st.one_of(st.lists(c, max_size=4),
                                                         st.dictionaries(st.text(max_size=4), c, max_size=4)))


@given(json_tree)
def test_reports_are_deterministic_json(obj):
    text = dumps(obj)
    assert text == dumps(obj)
    json.loads(text)
