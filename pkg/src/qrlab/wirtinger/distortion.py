"""Grid sweeps of distortion and pointwise predicates on Wirtinger jets."""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..errors import DegenerateRegionError, HypothesisError
from ..mapdsl.domains import Box
from ..mapdsl.maps import PiecewiseMap
from .jets import BAND, boundary_band, map_jets
from .linalg import InclusionSpec, RealMatrix2, in_inclusion, inner, jet_to_matrix, matrix_to_jet

PRED_TOL = 1e-12
RBE_UNDEFINED = 1e-9


@dataclass(frozen=True)
class Predicate:
    """A pointwise condition on ``(fz, fzbar)``; ``test`` returns a boolean array."""

    name: str
    test: Callable

    def __call__(self, fz, fzbar):
        return self.test(np.asarray(fz), np.asarray(fzbar))


def _scale(fz):
    return PRED_TOL * (1.0 + np.abs(fz))


def qr(k: Optional[float] = None) -> Predicate:
    if k is None:
        return Predicate("qr", lambda fz, fb: np.abs(fb) < np.abs(fz))
    return Predicate(f"qr({k!r})", lambda fz, fb: np.abs(fb) <= k * np.abs(fz) + _scale(fz))


def re_fz_nonneg() -> Predicate:
    return Predicate("re_fz>=0", lambda fz, fb: np.real(fz) >= -_scale(fz))


def re_fz_at_least(lam: float) -> Predicate:
    return Predicate(f"re_fz>={lam!r}", lambda fz, fb: np.real(fz) >= lam - _scale(fz))


def re_fz_zero(tol: float = 1e-6) -> Predicate:
    return Predicate("re_fz==0", lambda fz, fb: np.abs(np.real(fz)) <= tol)


def sector(eps: float) -> Predicate:
    """``Re fz >= -eps |Im fz|``."""
    return Predicate(f"sector({eps!r})",
                     lambda fz, fb: np.real(fz) >= -eps * np.abs(np.imag(fz)) - _scale(fz))


def cone(M: float) -> Predicate:
    """``Re fz >= M |Im fz|``."""
    return Predicate(f"cone({M!r})",
                     lambda fz, fb: np.real(fz) >= M * np.abs(np.imag(fz)) - _scale(fz))


def jacobian_floor(lam: float) -> Predicate:
    return Predicate(f"J>={lam!r}^2",
                     lambda fz, fb: np.abs(fz) ** 2 - np.abs(fb) ** 2 >= lam * lam - _scale(fz))


def halfspace(n: RealMatrix2) -> Predicate:
    """``<Df, N> >= 0``."""
    return Predicate("halfspace",
                     lambda fz, fb: inner(jet_to_matrix(fz, fb), n) >= -_scale(fz))


def inclusion(spec: InclusionSpec) -> Predicate:
    def test(fz, fb):
        x = jet_to_matrix(fz, fb)
        return in_inclusion(x, spec, tol=PRED_TOL * (1 + x.frobenius2)).inside

    return Predicate(f"inclusion(K={spec.K!r})", test)


def reduced_beltrami(k: Optional[float] = None) -> Predicate:
    """``fzbar = lam Re fz`` with ``|lam| <= k`` (``< 1`` if ``k`` is None).

    Points with ``|Re fz| <= 1e-9 |fzbar|`` leave ``lam`` undefined and are not counted.
    """

    def test(fz, fb):
        re = np.real(fz)
        defined = np.abs(re) > RBE_UNDEFINED * np.abs(fb)
        with np.errstate(all="ignore"):
            lam = np.abs(fb) / np.abs(re)
        within = lam < 1.0 if k is None else lam <= k + PRED_TOL
        return np.where(defined, within, True)

    return Predicate("rbe" if k is None else f"rbe({k!r})", test)


def parse_predicate(text: str) -> Predicate:
    """CLI spellings: ``qr``, ``qr(0.5)``, ``re_fz>=0``, ``re_fz==0``, ``rbe``, ``rbe(0.9)``,
    ``sector(1)``, ``cone(2)``, ``J>=1``."""
    s = text.replace(" ", "")
    m = re.fullmatch(r"(\w+)\(([-+0-9.eE]+)\)", s)
    if s == "qr":
        return qr()
    if s == "re_fz>=0":
        return re_fz_nonneg()
    if s == "re_fz==0":
        return re_fz_zero()
    if s == "rbe":
        return reduced_beltrami()
    if s.startswith("re_fz>="):
        return re_fz_at_least(float(s[len("re_fz>="):]))
    if s.startswith("J>="):
        return jacobian_floor(float(s[3:]) ** 0.5)
    if m:
        name, value = m.group(1), float(m.group(2))
        table = {"qr": qr, "rbe": reduced_beltrami, "sector": sector, "cone": cone}
        if name in table:
            return table[name](value)
    raise ValueError(f"unknown predicate {text!r}")


@dataclass
class DistortionReport:
    samples: int
    excluded: int
    k_hat: float
    K_hat: float
    degenerate: bool
    jacobian_min: float
    jacobian_max: float
    predicate: Optional[str] = None
    violations: int = 0
    violation_fraction: float = 0.0
    worst_points: List[dict] = field(default_factory=list)
    violation_points: List[complex] = field(default_factory=list)
    refinement: List[dict] = field(default_factory=list)
    rbe_lambda_sup: Optional[float] = None
    rbe_undefined: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _canonical_top(z, score, count):
    """Indices of the ``count`` largest scores; ties broken by (x, y)."""
    order = np.lexsort((np.imag(z), np.real(z), -score))
    return order[:count]


def sweep_points(m: PiecewiseMap, region: Box, resolution: int, band: float = BAND):
    pts = region.grid(resolution)
    pts = pts[m.domain.contains(pts)]
    return pts[~boundary_band(m, pts, band)] if len(pts) else pts


def _jets_chunked(m, pts, jobs: int, chunk: int = 65536):
    if jobs <= 1 or len(pts) <= chunk:
        return map_jets(m, pts, errors="nan")
    parts = [pts[i:i + chunk] for i in range(0, len(pts), chunk)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        out = list(pool.map(lambda p: map_jets(m, p, errors="nan"), parts))
    return tuple(np.concatenate([o[i] for o in out]) for i in range(3))


def _finite_jets(m, pts, mask, jobs):
    f, fz, fb = _jets_chunked(m, pts, jobs)
    ok = np.isfinite(f) & np.isfinite(fz) & np.isfinite(fb)
    pts, fz, fb = pts[ok], fz[ok], fb[ok]
    if mask is not None and len(pts):
        keep = np.asarray(mask(fz, fb), dtype=bool)
        pts, fz, fb = pts[keep], fz[keep], fb[keep]
    return pts, fz, fb


def _ratio(fz, fb):
    with np.errstate(all="ignore"):
        r = np.abs(fb) / np.abs(fz)
    return np.where(np.abs(fz) > 0, r, np.where(np.abs(fb) > 0, np.inf, 0.0))


def distortion_sweep(m: PiecewiseMap, region: Box, resolution: int = 256,
                     predicate: Optional[Predicate] = None, mask: Optional[Predicate] = None,
                     refine: bool = True, refine_tol: float = 1e-6,
                     max_resolution: Optional[int] = None, worst: int = 10,
                     band: float = BAND, jobs: int = 1) -> DistortionReport:
    """Grid statistics of ``|fzbar/fz|``, the Jacobian and an optional predicate.

    Points in guard-boundary bands and singular points are excluded. ``mask``
    restricts the sweep to the points where it holds. ``k_hat`` is refined by
    doubling the resolution until it changes by less than ``refine_tol``.
    """
    raw = region.grid(resolution)
    raw = raw[m.domain.contains(raw)]
    pts = sweep_points(m, region, resolution, band)
    pts, fz, fb = _finite_jets(m, pts, mask, jobs)
    if not len(pts):
        raise DegenerateRegionError("every grid point was excluded")
    ratio = _ratio(fz, fb)
    jac = np.abs(fz) ** 2 - np.abs(fb) ** 2
    k_hat = float(np.max(ratio))
    trail = [{"resolution": resolution, "k_hat": k_hat}]
    if refine:
        limit = max_resolution or 4 * resolution
        n = resolution
        while 2 * n <= limit:
            n *= 2
            p2 = sweep_points(m, region, n, band)
            p2, z2, b2 = _finite_jets(m, p2, mask, jobs)
            if not len(p2):
                break
            k_new = float(np.max(_ratio(z2, b2)))
            trail.append({"resolution": n, "k_hat": k_new})
            converged = abs(k_new - k_hat) < refine_tol
            k_hat = max(k_hat, k_new)
            if converged:
                break
    degenerate = not (k_hat < 1.0)
    K_hat = (1 + k_hat) / (1 - k_hat) if not degenerate else float("inf")
    top = _canonical_top(pts, ratio, worst)
    report = DistortionReport(
        samples=len(pts),
        excluded=len(raw) - len(pts),
        k_hat=k_hat,
        K_hat=K_hat,
        degenerate=degenerate,
        jacobian_min=float(np.min(jac)),
        jacobian_max=float(np.max(jac)),
        worst_points=[{"z": complex(pts[i]), "ratio": float(ratio[i])} for i in top],
        refinement=trail,
    )
    if predicate is not None:
        ok = np.asarray(predicate(fz, fb), dtype=bool)
        bad = np.flatnonzero(~ok)
        report.predicate = predicate.name
        report.violations = int(len(bad))
        report.violation_fraction = len(bad) / len(pts)
        order = np.lexsort((np.imag(pts[bad]), np.real(pts[bad])))
        report.violation_points = [complex(pts[bad][i]) for i in order[:worst]]
        if predicate.name.startswith("rbe"):
            re = np.real(fz)
            defined = np.abs(re) > RBE_UNDEFINED * np.abs(fb)
            report.rbe_undefined = int((~defined).sum())
            if defined.any():
                report.rbe_lambda_sup = float(np.max(np.abs(fb[defined]) / np.abs(re[defined])))
    return report


def reduced_beltrami_multiplier(fz, fzbar):
    """``lam = fzbar / Re fz`` where defined, else NaN."""
    re = np.real(fz)
    defined = np.abs(re) > RBE_UNDEFINED * np.abs(fzbar)
    with np.errstate(all="ignore"):
        return np.where(defined, fzbar / re, np.nan + 0j)


@dataclass
class HomotopyRow:
    t: float
    k: float
    formula_residual: Optional[float]


@dataclass
class HomotopyTable:
    rows: List[HomotopyRow]
    samples: int
    monotone: bool
    hypothesis_violations: int

    @property
    def k(self):
        return [r.k for r in self.rows]

    def to_dict(self):
        return {
            "samples": self.samples,
            "monotone": self.monotone,
            "hypothesis_violations": self.hypothesis_violations,
            "rows": [r.__dict__ for r in self.rows],
        }


def homotopy_ratio_formula(fz, fzbar, t: float):
    """Squared distortion of ``(1-t) f + t z`` from the jet of ``f`` (closed form)."""
    s = t / (1.0 - t)
    return np.abs(fzbar) ** 2 / ((np.real(fz) + s) ** 2 + np.imag(fz) ** 2)


def homotopy_distortion(m: PiecewiseMap, region: Box, ts: Sequence[float],
                        L: Optional[RealMatrix2] = None, resolution: int = 128,
                        restrict: bool = False, band: float = BAND) -> HomotopyTable:
    """``k(t) = sup |f^t_zbar / f^t_z|`` for ``f^t = (1-t) f + t L``.

    Requires ``<Df, DL> >= 0`` on the grid; with ``restrict=True`` the grid is
    cut down to the points where it holds instead of raising.
    """
    L = L or RealMatrix2.identity()
    Lz, Lzb = matrix_to_jet(L)
    pts = sweep_points(m, region, resolution, band)
    pts, fz, fb = _finite_jets(m, pts, None, 1)
    ok = np.asarray(halfspace(L)(fz, fb), dtype=bool)
    violations = int((~ok).sum())
    if violations and not restrict:
        raise HypothesisError(f"<Df, N> < 0 at {violations} grid points; homotopy claim not applicable")
    pts, fz, fb = pts[ok], fz[ok], fb[ok]
    if not len(pts):
        raise DegenerateRegionError("no grid point satisfies the half-space condition")
    identity = (Lz == 1) and (Lzb == 0)
    rows = []
    for t in ts:
        if not 0 <= t < 1:
            raise ValueError("t must lie in [0, 1)")
        tz = (1 - t) * fz + t * Lz
        tb = (1 - t) * fb + t * Lzb
        ratio = _ratio(tz, tb)
        residual = None
        if identity:
            direct = np.abs(tb) ** 2 / np.abs(tz) ** 2
            residual = float(np.max(np.abs(direct - homotopy_ratio_formula(fz, fb, t))))
        rows.append(HomotopyRow(float(t), float(np.max(ratio)), residual))
    monotone = all(b.k <= a.k + 1e-12 for a, b in zip(rows, rows[1:]))
    return HomotopyTable(rows, len(pts), monotone, violations)
