import numpy as np
import pytest

from qrlab.flow import (
    TraceConfig,
    Verdict,
    circle,
    classify_sectors,
    elliptic_loop_contradiction,
    green_identity,
    inner_circle_term,
    portrait_svg,
    punctured_disk_bound,
    trace,
    trace_many,
    trajectories_csv,
)
from qrlab.mapdsl import fixture, single_piece
from qrlab.wirtinger import gradient_field

Z = single_piece("z", "z")
ZBAR = single_piece("zbar", "conj(z)")
IZ = fixture("iz")


def test_source_backward_reaches():
    t = trace(Z, 0.5, -1)
    assert t.verdict == Verdict.REACHES
    assert abs(t.end) <= 1e-4


def test_rotation_closes():
    t = trace(IZ, 1.0, 1, TraceConfig(R=2))
    assert t.verdict == Verdict.CLOSES
    assert t.duration == pytest.approx(2 * np.pi, rel=1e-3)


def test_saddle_on_stable_axis():
    t = trace(ZBAR, 0.5j, 1)
    assert t.verdict == Verdict.REACHES
    # exact solution y = y0 e^{-t}, x = 0
    np.testing.assert_allclose(t.z.imag, 0.5 * np.exp(-t.t), rtol=1e-6)
    assert np.all(t.z.real == 0)


def test_exits_and_budget():
    assert trace(Z, 0.5, 1).verdict == Verdict.EXITS
    assert trace(IZ, 0.5, 1, TraceConfig(max_steps=5, detect_closing=False)).verdict == Verdict.BUDGET


def test_integrator_order():
    errs = []
    for tol in (1e-6, 1e-6 / 32):
        cfg = TraceConfig(R=10, tol=tol, max_move=10, t_max=2 * np.pi, detect_closing=False)
        t = trace(IZ, 1.0, 1, cfg)
        errs.append(abs(t.end - np.exp(1j * t.duration)))
    assert errs[0] / errs[1] >= 16


def test_time_reversal():
    neg = single_piece("neg", "-(z + z^2/2)")
    pos = single_piece("pos", "z + z^2/2")
    a = trace(pos, 0.3 + 0.2j, 1)
    b = trace(neg, 0.3 + 0.2j, -1)
    assert a.verdict == b.verdict
    np.testing.assert_allclose(a.z, b.z, atol=1e-12)


@pytest.mark.parametrize("m, n_e, n_h, idx", [
    (Z, 0, 0, 1),
    (ZBAR, 0, 4, -1),
    (fixture("power", n=2), 2, 0, 2),
    (fixture("power", n=3), 4, 0, 3),
    (gradient_field(fixture("grad2d")), 0, 8, -3),
])
def test_sector_counts(m, n_e, n_h, idx):
    s = classify_sectors(m, 0, seeds=64)
    assert (s.n_e, s.n_h) == (n_e, n_h)
    assert s.predicted_index == s.winding_index == idx
    assert s.agreement and not s.flagged


def test_sectors_need_zero():
    from qrlab.errors import DomainSingularityError

    with pytest.raises(DomainSingularityError):
        classify_sectors(Z, 0.5)


def test_green_unit_disk():
    r = green_identity(Z, circle())
    assert r.area_integral == pytest.approx(np.pi, abs=1e-6)
    assert abs(r.contour_side - r.area_integral) <= 1e-6


@pytest.mark.parametrize("formula", ["z^2", "i*z", "conj(z)*z", "z + 0.3*conj(z)^2"])
def test_green_residual(formula):
    r = green_identity(single_piece(formula, formula), circle(0.2 - 0.1j, 0.8))
    assert r.green_residual_rel <= 1e-4


def test_green_constant():
    r = green_identity(single_piece("c", "2 - i"), circle(0.3, 0.5))
    assert abs(r.contour_integral) <= 1e-12 and abs(r.area_integral) <= 1e-12


def test_green_polyline_orientation():
    square = np.array([0, 1j, 1 + 1j, 1])  # clockwise
    r = green_identity(Z, square)
    assert r.reoriented
    assert r.area_integral == pytest.approx(1.0, abs=1e-9)


def test_closed_orbit_energy():
    t = trace(IZ, 1.0, 1, TraceConfig(R=2))
    r = green_identity(IZ, t)
    assert r.energy == pytest.approx(2 * np.pi, abs=1e-5)
    assert abs(r.trajectory_integral.imag) <= 1e-6 * abs(r.trajectory_integral)
    assert abs(r.re_area_integral) <= 1e-6


def test_elliptic_loop_reports():
    good = elliptic_loop_contradiction(single_piece("g", "z + z^2/2"), 0, R=0.5, seeds=64)
    assert good.verdict == "no-loops-found"
    rot = elliptic_loop_contradiction(IZ, 0, R=0.5, seeds=16)
    assert rot.verdict == "not-a-counterexample"


def test_punctured_disk():
    assert punctured_disk_bound(1e-3, 1.0) == pytest.approx(np.pi * 1e-3)
    term, bound = inner_circle_term(single_piece("u", "exp(i*re(z))"), 0, 1e-3)
    assert bound == pytest.approx(np.pi * 1e-3)
    assert abs(term) <= bound


def test_exports():
    ts = trace_many(fixture("power", n=2), [0.5, 0.5j], 1)
    svg = portrait_svg(ts, 0, 1.0)
    assert svg.startswith("<svg") and 'id="traj-0"' in svg and "<circle" in svg
    rows = trajectories_csv(ts).splitlines()
    assert rows[0] == "id,seed_x,seed_y,direction,verdict,t,x,y"
    assert len(rows) == 1 + sum(len(t.z) for t in ts)
