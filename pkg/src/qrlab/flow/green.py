"""Stokes/Green checks ``iint f_z dA = (i/2) oint f dzbar`` and the elliptic-loop argument.

All contour integrals are taken counterclockwise around the enclosed region.
Along a trajectory the time-ordered integral ``int f dzbar`` equals
``int |f|^2 dt``; it is reported separately from the ccw contour value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
import shapely

from ..errors import DomainError, HypothesisError
from ..mapdsl.maps import PiecewiseMap
from ..wirtinger.jets import map_jets
from .integrate import TraceConfig, Trajectory, Verdict, hermite, hermite_slope, trace_many

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class Circle:
    center: complex = 0j
    radius: float = 1.0

    def polyline(self, n: int = 512) -> np.ndarray:
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)


def circle(center: complex = 0j, radius: float = 1.0) -> Circle:
    return Circle(complex(center), float(radius))


@dataclass
class LoopIntegralReport:
    curve: np.ndarray
    contour_integral: complex  # oint f dzbar, ccw
    contour_side: complex  # (i/2) oint f dzbar
    area_integral: complex  # iint f_z dA
    green_residual: float
    green_residual_rel: float  # residual / (1 + |oint|)
    re_area_integral: float  # the real-part vanishing test reads this
    enclosed_area: float
    method: str
    reoriented: bool = False
    band_area: float = 0.0
    trajectory_integral: Optional[complex] = None  # time-ordered int f dzbar
    energy: Optional[float] = None  # int |f|^2 dt
    energy_residual: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        d = dict(self.__dict__)
        d["curve_points"] = len(self.curve)
        del d["curve"]
        return d


def signed_area(poly: np.ndarray) -> float:
    x, y = poly.real, poly.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _check_simple(poly: np.ndarray):
    ring = shapely.LinearRing(np.column_stack([poly.real, poly.imag]))
    if not ring.is_simple:
        raise DomainError("closed curve is not simple")


def _field(m, z):
    w = m.evaluate(z, errors="nan")
    if not np.all(np.isfinite(w)):
        raise DomainError("field undefined on the curve")
    return w


def _fz(m, z):
    _, fz, _ = map_jets(m, z, errors="nan")
    return fz


def polyline_contour(m: PiecewiseMap, poly: np.ndarray) -> complex:
    """``oint f dzbar`` over the closed polygon in vertex order (Gauss-Legendre per edge)."""
    a = poly
    d = np.roll(poly, -1) - poly
    pts = a[:, None] + d[:, None] * _GL_X[None, :]
    vals = _field(m, pts.ravel()).reshape(pts.shape)
    return complex(np.sum((vals @ _GL_W) * np.conj(d)))


def _star_center(poly):
    x, y = poly.real, poly.imag
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    A = 0.5 * cross.sum()
    c = complex(np.sum((x + np.roll(x, -1)) * cross) / (6 * A), np.sum((y + np.roll(y, -1)) * cross) / (6 * A))
    rel = poly - c
    fan = np.imag(np.conj(rel) * np.roll(rel, -1))
    return c if np.all(fan > 0) else None


def fan_area_integral(m, poly, c, order: int = 8):
    """``iint f_z`` over a polygon star-shaped w.r.t. ``c`` (collapsed Gauss rule per triangle)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    a = poly - c
    b = np.roll(poly, -1) - c
    two_area = np.imag(np.conj(a) * b)
    U, V = np.meshgrid(x, x, indexing="ij")
    WU, WV = np.meshgrid(w, w, indexing="ij")
    pts = c + U[None] * ((1 - V[None]) * a[:, None, None] + V[None] * b[:, None, None])
    vals = _fz(m, pts.ravel()).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        return None
    return complex(np.sum(vals * (WU * WV * U)[None] * two_area[:, None, None]))


def raster_area_integral(m, poly, n: Optional[int] = None):
    """Even-odd rasterization; returns ``(integral, band_area)``."""
    x0, x1 = poly.real.min(), poly.real.max()
    y0, y1 = poly.imag.min(), poly.imag.max()
    seg = np.abs(np.roll(poly, -1) - poly)
    if n is None:
        n = int(np.clip(max(x1 - x0, y1 - y0) / max(np.median(seg), 1e-12), 256, 2048))
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    xs = x0 + hx * (np.arange(n) + 0.5)
    ys = y0 + hy * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(xs, ys)
    poly_g = shapely.Polygon(np.column_stack([poly.real, poly.imag]))
    inside = shapely.contains_xy(poly_g, X.ravel(), Y.ravel())
    pts = (X.ravel() + 1j * Y.ravel())[inside]
    vals = _fz(m, pts)
    ok = np.isfinite(vals)
    band = float(seg.sum() * np.hypot(hx, hy)) + float((~ok).sum() * hx * hy)
    return complex(np.sum(vals[ok]) * hx * hy), band


def _circle_report(m, c: Circle, n: int, radial: int):
    theta = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    z = c.center + c.radius * e
    dzb = -1j * c.radius * np.conj(e) * (2 * np.pi / n)
    contour = complex(np.sum(_field(m, z) * dzb))
    x, w = np.polynomial.legendre.leggauss(radial)
    rho = 0.5 * c.radius * (x + 1)
    wr = 0.5 * c.radius * w
    P = c.center + rho[:, None] * e[None, :]
    vals = _fz(m, P.ravel()).reshape(P.shape)
    ok = np.isfinite(vals)
    area = complex(np.sum(np.where(ok, vals, 0) * (wr * rho)[:, None]) * (2 * np.pi / n))
    notes = [] if ok.all() else [f"{int((~ok).sum())} quadrature nodes undefined"]
    return z, contour, area, np.pi * c.radius ** 2, "polar", notes


def _densify(traj: Trajectory, per_step: int):
    t, z, v = traj.chronological()
    s = np.arange(per_step) / per_step
    h = np.diff(t)
    pts = hermite(z[:-1, None], z[1:, None], v[:-1, None], v[1:, None], h[:, None], s[None, :])
    return pts.ravel()


def trajectory_integrals(m: PiecewiseMap, traj: Trajectory, order: int = 8):
    """Time-ordered ``int f dzbar`` and ``int |f|^2 dt`` along a traced curve."""
    t, z, v = traj.chronological()
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    h = np.diff(t)
    args = (z[:-1, None], z[1:, None], v[:-1, None], v[1:, None], h[:, None], x[None, :])
    pts = hermite(*args)
    slope = hermite_slope(*args)
    f = _field(m, pts.ravel()).reshape(pts.shape)
    loop = complex(np.sum((f * np.conj(slope)) @ w * h))
    energy = float(np.sum((np.abs(f) ** 2) @ w * h))
    return loop, energy


def green_identity(m: PiecewiseMap, curve: Union[Circle, np.ndarray, Trajectory],
                   n: int = 4096, radial: int = 32, per_step: int = 8) -> LoopIntegralReport:
    """Both sides of ``iint_U f_z dA = (i/2) oint_{dU} f dzbar`` (ccw) and their residual."""
    notes: List[str] = []
    reoriented = False
    band = 0.0
    traj_int = energy = None
    if isinstance(curve, Circle):
        poly, contour, area, enclosed, method, notes = _circle_report(m, curve, n, radial)
    else:
        if isinstance(curve, Trajectory):
            if curve.verdict is not Verdict.CLOSES:
                raise DomainError("trajectory does not close up")
            traj_int, energy = trajectory_integrals(m, curve)
            poly = _densify(curve, per_step)
        else:
            poly = np.asarray(curve, dtype=complex).ravel()
            if len(poly) > 1 and abs(poly[-1] - poly[0]) < 1e-14:
                poly = poly[:-1]
        if len(poly) < 3:
            raise DomainError("closed curve needs at least three vertices")
        _check_simple(poly)
        sa = signed_area(poly)
        if sa < 0:
            poly = poly[::-1]
            reoriented = True
            log.info("curve reoriented to counterclockwise")
        enclosed = abs(sa)
        contour = polyline_contour(m, poly)
        c = _star_center(poly)
        area = fan_area_integral(m, poly, c) if c is not None else None
        method = "fan"
        if area is None:
            area, band = raster_area_integral(m, poly)
            method = "raster"
    side = 0.5j * contour
    res = abs(area - side)
    return LoopIntegralReport(
        curve=poly, contour_integral=contour, contour_side=side, area_integral=area,
        green_residual=res, green_residual_rel=res / (1 + abs(contour)),
        re_area_integral=float(area.real), enclosed_area=float(enclosed), method=method,
        reoriented=reoriented, band_area=band, trajectory_integral=traj_int, energy=energy,
        energy_residual=None if energy is None else abs(traj_int - energy), notes=notes,
    )


# -- the elliptic-loop contradiction --------------------------------------------

def punctured_disk_bound(eps: float, sup_norm: float) -> float:
    """Bound ``pi eps ||f||_inf`` on ``|(1/2i) oint_{|z|=eps} f dzbar|``."""
    return float(np.pi * eps * sup_norm)


def inner_circle_term(m: PiecewiseMap, center: complex, eps: float, n: int = 1024):
    """``((1/2i) oint_{|z-c|=eps} f dzbar, pi eps sup|f|)`` on the small circle."""
    theta = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    f = _field(m, center + eps * e)
    val = complex(np.sum(f * (-1j * eps * np.conj(e))) * (2 * np.pi / n) / 2j)
    return val, punctured_disk_bound(eps, float(np.max(np.abs(f))))


@dataclass
class LoopCandidate:
    seed: complex
    kind: str  # closed-orbit or elliptic-loop
    enclosed_area: float
    lower_bound: float  # lambda * area
    residual: float  # what the trajectory identity leaves over
    refuted: bool

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class EllipticLoopReport:
    center: complex
    radius: float
    hypothesis_holds: bool
    lambda_hat: float
    seeds: int
    closed_orbits: int
    elliptic_loops: int
    inner_bound: float
    verdict: str
    candidates: List[LoopCandidate] = field(default_factory=list)
    classification: str = "seed-based evidence"

    def to_dict(self):
        d = dict(self.__dict__)
        d["candidates"] = [c.to_dict() for c in self.candidates]
        return d


def elliptic_loop_contradiction(m: PiecewiseMap, center: complex = 0j, R: float = 0.5,
                                seeds: int = 64, config: Optional[TraceConfig] = None,
                                resolution: int = 128, strict: bool = False) -> EllipticLoopReport:
    """Look for loops around ``center`` and weigh each against ``Re f_z >= lambda > 0``.

    Inside a loop made of trajectories, ``iint Re f_z`` equals only the small
    inner-circle term, at most ``pi eps ||f||``, while the hypothesis forces it
    above ``lambda * area``. A candidate is refuted when that lower bound wins.
    With ``strict`` a violated hypothesis raises instead of being reported.
    """
    from ..mapdsl.domains import Box

    c = complex(center)
    pts = Box.around(c, R).grid(resolution)
    pts = pts[np.abs(pts - c) < R]
    _, fz, _ = map_jets(m, pts, errors="nan")
    re = np.real(fz[np.isfinite(fz)])
    lam = float(re.min()) if len(re) else float("nan")
    holds = bool(lam > 0)
    if strict and not holds:
        raise HypothesisError(f"Re f_z >= lambda > 0 fails near {c} (min {lam:.3g})")

    cfg = TraceConfig(R=R, center=c) if config is None else config
    rho = cfg.rho_reach
    theta = 2 * np.pi * (np.arange(seeds) + 0.5) / seeds
    ring = c + 0.5 * R * np.exp(1j * theta)
    fw = trace_many(m, ring, 1, cfg)
    bw = trace_many(m, ring, -1, cfg)
    _, bound = inner_circle_term(m, c, rho)
    cands = []
    for s, f, b in zip(ring, fw, bw):
        if f.verdict is Verdict.CLOSES:
            g = green_identity(m, f)
            lb = max(lam, 0.0) * g.enclosed_area
            resid = abs(g.re_area_integral - (0.5j * g.contour_integral).real) + g.green_residual
            cands.append(LoopCandidate(complex(s), "closed-orbit", g.enclosed_area, lb, resid, lb > resid))
        elif f.verdict is Verdict.REACHES and b.verdict is Verdict.REACHES:
            loop = np.concatenate([b.z[::-1], f.z[1:]])
            area = abs(signed_area(loop))
            lb = max(lam, 0.0) * area
            cands.append(LoopCandidate(complex(s), "elliptic-loop", area, lb, bound, lb > bound))
    closed = sum(1 for x in cands if x.kind == "closed-orbit")
    loops = len(cands) - closed
    if not holds:
        verdict = "not-a-counterexample" if cands else "hypothesis-violated"
    elif not cands:
        verdict = "no-loops-found"
    elif all(x.refuted for x in cands):
        verdict = "candidates-refuted"
    else:
        verdict = "unresolved"
    return EllipticLoopReport(c, R, holds, lam, seeds, closed, loops, bound, verdict, cands)
