"""The potential ``psi`` with ``grad psi = i f`` and its local convexity tests.

When ``Re f_z = 0`` the field ``(-v, u)`` is curl free, so ``psi`` is the line
integral of ``-v dx + u dy`` from a base point. The integral runs along an
axis-aligned L-path and a closed-rectangle residual certifies the choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
from scipy.integrate import quad_vec

from ..errors import DomainError, HypothesisError
from ..mapdsl.domains import Box, Disk, Domain, Polygon
from ..mapdsl.domains import Union as UnionDomain
from ..mapdsl.maps import PiecewiseMap
from ..sampling import DEFAULT_SEED, halton_in_domain
from ..wirtinger.distortion import distortion_sweep, re_fz_zero, sweep_points
from ..wirtinger.jets import map_jets

HYPOTHESIS_TOL = 1e-6
QUAD_TOL = 1e-12


def as_domain(region: Union[Box, Domain]) -> Domain:
    if isinstance(region, Box):
        return Polygon((complex(region.xmin, region.ymin), complex(region.xmax, region.ymin),
                        complex(region.xmax, region.ymax), complex(region.xmin, region.ymax)))
    return region


def region_box(region: Union[Box, Domain]) -> Box:
    if isinstance(region, Box):
        return region
    bb = region.bbox()
    if bb is None:
        raise DomainError("region must be bounded")
    return Box(*bb)


def centroid(region: Union[Box, Domain]) -> complex:
    if isinstance(region, Box):
        return complex(0.5 * (region.xmin + region.xmax), 0.5 * (region.ymin + region.ymax))
    if isinstance(region, Disk):
        return complex(region.center)
    if isinstance(region, Polygon):
        v = np.asarray(region.vertices, dtype=complex)
        x, y = v.real, v.imag
        cr = x * np.roll(y, -1) - np.roll(x, -1) * y
        A = 0.5 * cr.sum()
        return complex(np.sum((x + np.roll(x, -1)) * cr) / (6 * A), np.sum((y + np.roll(y, -1)) * cr) / (6 * A))
    b = region_box(region)
    return complex(0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax))


def _segment_integral(m, a, b, vertical):
    """``int`` of ``-v dx`` (horizontal) or ``u dy`` (vertical) from ``a`` to ``b``, vectorized."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    d = b - a
    if not np.any(d != 0):
        return np.zeros(len(a))

    def integrand(s):
        w = m.evaluate(a + s * d, errors="nan")
        return w.real * d.imag if vertical else -w.imag * d.real

    val, err = quad_vec(integrand, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    if not np.all(np.isfinite(val)):
        raise DomainError("potential path leaves the domain of the map")
    return val


@dataclass
class Potential:
    base: complex
    map: PiecewiseMap
    region: object
    residual: float = 0.0
    residual_limit: float = float("inf")
    hypothesis_max: float = 0.0
    _cache: Dict[complex, float] = field(default_factory=dict, repr=False)

    def __call__(self, p):
        p = np.asarray(p, dtype=complex)
        flat = p.ravel()
        out = np.empty(len(flat))
        todo = [i for i, q in enumerate(flat) if complex(q) not in self._cache]
        if todo:
            q = flat[todo]
            corner = q.real + 1j * self.base.imag
            vals = (_segment_integral(self.map, np.full(len(q), self.base), corner, False)
                    + _segment_integral(self.map, corner, q, True))
            for z, v in zip(q, vals):
                self._cache[complex(z)] = float(v)
        for i, q in enumerate(flat):
            out[i] = self._cache[complex(q)]
        return out.reshape(p.shape) if p.ndim else float(out[0])

    def gradient(self, p):
        """Exact ``psi_x + i psi_y = i f``."""
        return 1j * self.map.evaluate(p)

    def section(self, a: complex, b: complex, n: int = 33):
        """The 1D restriction ``phi(t) = psi(a + t (b - a))``."""
        t = np.linspace(0.0, 1.0, n)
        return t, self(a + t * (b - a))

    def to_dict(self):
        return {"base": self.base, "map": self.map.name, "residual": self.residual,
                "residual_limit": self.residual_limit, "hypothesis_max": self.hypothesis_max}


def rectangle_residual(m: PiecewiseMap, p: complex, q: complex) -> float:
    """``oint (-v dx + u dy)`` around the rectangle with opposite corners ``p``, ``q``."""
    c = [complex(p), complex(q.real, p.imag), complex(q), complex(p.real, q.imag)]
    total = 0.0
    for k in range(4):
        a, b = c[k], c[(k + 1) % 4]
        total += float(_segment_integral(m, a, b, vertical=(k % 2 == 1))[0])
    return abs(total)


def reconstruct_potential(m: PiecewiseMap, base: Optional[complex] = None,
                          region: Union[Box, Domain] = Box(-1, 1, -1, 1), check: bool = True,
                          resolution: int = 64, rectangles: int = 8,
                          seed: int = DEFAULT_SEED) -> Potential:
    """``psi`` with ``psi(base) = 0`` on ``region``; base defaults to the centroid.

    With ``check`` the hypothesis ``|Re f_z| <= 1e-6`` is swept on the region
    and an inconsistent field (rectangle residual above
    ``1e-4 * perimeter * sup|f|``) is refused.
    """
    box = region_box(region)
    dom = as_domain(region)
    sweep = distortion_sweep(m, box, resolution, predicate=re_fz_zero(HYPOTHESIS_TOL), refine=False)
    if check and sweep.violations:
        raise HypothesisError(f"Re f_z = 0 fails at {sweep.violations} of {sweep.samples} samples "
                              f"(e.g. {sweep.violation_points[0]})")
    base = centroid(region) if base is None else complex(base)
    pot = Potential(base, m, region)
    pts = halton_in_domain(2 * rectangles, box, dom, seed)
    worst, limit = 0.0, float("inf")
    w = m.evaluate(box.grid(32), errors="nan")
    sup = float(np.max(np.abs(w[np.isfinite(w)])))
    for p, q in zip(pts[0::2], pts[1::2]):
        r = rectangle_residual(m, p, q)
        lim = 1e-4 * 2 * (abs(q.real - p.real) + abs(q.imag - p.imag)) * sup
        if r > worst:
            worst, limit = r, lim
        if check and r > lim:
            raise HypothesisError(f"closed-rectangle residual {r:.3g} exceeds {lim:.3g}; the field is not a rotated gradient")
    pot.residual, pot.residual_limit = worst, limit
    _, fz, _ = map_jets(m, sweep_points(m, box, resolution), errors="nan")
    pot.hypothesis_max = float(np.nanmax(np.abs(fz.real))) if len(fz) else 0.0
    return pot


# -- Taylor gauge and the dichotomy ----------------------------------------------

GAUGE_TOL = 1e-10


@dataclass
class TaylorGauge:
    anchor: complex
    psi_anchor: float
    gradient: complex
    verdict: str  # positive, negative, mixed or unresolved
    min_value: float
    max_value: float
    probes: int
    tolerance: float

    def to_dict(self):
        return dict(self.__dict__)


def gauge_values(pot: Potential, anchor: complex, points):
    a = complex(anchor)
    g = complex(pot.gradient(a))
    psi_a = float(pot(a))
    pts = np.asarray(points, dtype=complex)
    return pot(pts) - psi_a - np.real(np.conj(g) * (pts - a)), psi_a, g


def taylor_gauge_test(pot: Potential, anchor: complex, radius: float = 0.1, probes: int = 32,
                      rings=(0.25, 0.5, 1.0), tol: float = GAUGE_TOL) -> TaylorGauge:
    """Sign of ``psi^{a,b} = psi - (psi(a) + <grad psi(a), p - a>)`` on probe rings."""
    a = complex(anchor)
    theta = 2 * np.pi * np.arange(probes) / probes
    pts = np.concatenate([a + r * radius * np.exp(1j * theta) for r in rings])
    pts = pts[np.abs(pts - a) > 1e-6]
    vals, psi_a, g = gauge_values(pot, a, pts)
    pos, neg = vals > tol, vals < -tol
    if pos.all():
        verdict = "positive"
    elif neg.all():
        verdict = "negative"
    elif pos.any() and neg.any():
        verdict = "mixed"
    else:
        verdict = "unresolved"
    return TaylorGauge(a, psi_a, g, verdict, float(vals.min()), float(vals.max()), len(pts), tol)


@dataclass
class DichotomyReport:
    verdict: str  # positive, negative, mixed or unresolved
    uniform: bool
    gauges: List[TaylorGauge]
    unresolved: List[complex]
    counterexample: Optional[tuple] = None
    section: Optional[dict] = None
    potential: Optional[Potential] = None

    def to_dict(self):
        return {"verdict": self.verdict, "uniform": self.uniform,
                "gauges": [g.to_dict() for g in self.gauges], "unresolved": self.unresolved,
                "counterexample": self.counterexample, "section": self.section,
                "potential": self.potential.to_dict() if self.potential else None}


def dichotomy_scan(m: PiecewiseMap, region: Union[Box, Domain] = Disk(0j, 1.0), anchors: int = 20,
                   radius: float = 0.1, seed: int = DEFAULT_SEED,
                   potential: Optional[Potential] = None, gauge_tol: float = 1e-10) -> DichotomyReport:
    """Taylor-gauge verdicts at Halton anchors of a convex region; one alternative must hold throughout."""
    if isinstance(region, UnionDomain) and len(region.parts) > 1:
        raise DomainError("dichotomy_scan needs a convex region; a union of parts was given")
    dom = as_domain(region)
    box = region_box(region)
    pot = potential or reconstruct_potential(m, region=region, seed=seed)
    cand = halton_in_domain(8 * anchors, box, dom, seed)
    cand = cand[np.atleast_1d(dom.boundary_distance(cand)) > radius]
    if len(cand) < anchors:
        raise DomainError("region too small for the requested anchors and probe radius")
    gauges = [taylor_gauge_test(pot, a, radius, tol=gauge_tol) for a in cand[:anchors]]
    verdicts = [g.verdict for g in gauges]
    unresolved = [g.anchor for g in gauges if g.verdict == "unresolved"]
    kinds = set(verdicts)
    report = DichotomyReport("unresolved", False, gauges, unresolved, potential=pot)
    if unresolved:
        return report
    if kinds in ({"positive"}, {"negative"}):
        report.verdict, report.uniform = kinds.pop(), True
        return report
    report.verdict = "mixed"
    pos = [g.anchor for g in gauges if g.verdict == "positive"]
    neg = [g.anchor for g in gauges if g.verdict == "negative"]
    if pos and neg:
        a, b = pos[0], neg[0]
    else:
        g0 = next(g for g in gauges if g.verdict == "mixed")
        a, b = g0.anchor, gauges[0].anchor if gauges[0] is not g0 else gauges[-1].anchor
    t, phi = pot.section(a, b)
    report.counterexample = (a, b)
    report.section = {"t": t.tolist(), "phi": phi.tolist()}
    return report
