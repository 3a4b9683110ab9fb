"""Injectivity diagnostics: collision witnesses, the bi-Lipschitz bound and the lambda shift.

A collision search can only ever show non-injectivity. An empty result
means no collision was found at the grid resolution used, nothing more.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import HypothesisError
from .mapdsl import expr as E
from .mapdsl.domains import Box
from .mapdsl.maps import Piece, PiecewiseMap
from .sampling import DEFAULT_SEED, halton_in_domain
from .wirtinger.distortion import distortion_sweep, jacobian_floor
from .wirtinger.jets import boundary_band, map_jets

SEPARATION_FLOOR = 1e-6
WITNESS_TOL = 1e-8


@dataclass
class CollisionWitness:
    z1: complex
    z2: complex
    separation: float
    image_distance: float
    image: complex
    history: List[float] = field(default_factory=list)

    def to_dict(self):
        return {"z1": self.z1, "z2": self.z2, "separation": self.separation,
                "image_distance": self.image_distance, "image": self.image,
                "history": self.history}


def _objective(m, z1, z2):
    with np.errstate(all="ignore"):
        d = np.abs(m.evaluate(z1, errors="nan") - m.evaluate(z2, errors="nan")) ** 2
    return np.where(np.isfinite(d), d, np.inf)


def _pattern_search(fun, x, step, iters=200, floor=1e-16):
    """Vectorized compass search with shrinking steps on the rows of ``x``.

    Only strict improvements are accepted, so the trail of best values is
    nonincreasing.
    """
    x = x.copy()
    n, dim = x.shape
    best = fun(x)
    step = np.full(n, float(step))
    trail = [best.copy()]
    moves = np.concatenate([np.eye(dim), -np.eye(dim)])
    for _ in range(iters):
        live = step > floor
        if not live.any():
            break
        trial = x[:, None, :] + step[:, None, None] * moves[None, :, :]
        vals = fun(trial.reshape(-1, dim)).reshape(n, len(moves))
        j = np.argmin(vals, axis=1)
        v = vals[np.arange(n), j]
        better = live & (v < best)
        x[better] = trial[better, j[better]]
        best = np.where(better, v, best)
        step = np.where(better | ~live, step, step / 2)
        trail.append(best.copy())
    return x, best, np.array(trail).T


def _polish(resid, x, best, iters=20):
    """Damped minimum-norm Gauss-Newton on ``|resid(x)|^2``; only accepts improvements.

    Compass search crawls along the thin valleys of strongly anisotropic
    linear pieces; a finite-difference Newton step crosses them at once.
    """
    x = x.copy()
    best = best.copy()
    n, dim = x.shape
    trail = []
    for _ in range(iters):
        r = resid(x)
        h = 1e-7 * (1 + np.abs(x))
        J = np.empty((n, 2, dim))
        for k in range(dim):
            e = np.zeros(dim)
            e[k] = 1.0
            dr = (resid(x + h[:, k:k + 1] * e) - resid(x - h[:, k:k + 1] * e)) / (2 * h[:, k])
            J[:, 0, k], J[:, 1, k] = dr.real, dr.imag
        rv = np.stack([r.real, r.imag], axis=1)
        ok = np.all(np.isfinite(J), axis=(1, 2)) & np.all(np.isfinite(rv), axis=1)
        step = np.zeros_like(x)
        if ok.any():
            step[ok] = -np.einsum("nij,nj->ni", np.linalg.pinv(J[ok]), rv[ok])
        improved = np.zeros(n, dtype=bool)
        for damp in (1.0, 0.5, 0.25, 0.125):
            cand = x + damp * step
            rc = resid(cand)
            v = np.where(np.isfinite(rc), np.abs(rc) ** 2, np.inf)
            take = ~improved & (v < best)
            x[take], best[take] = cand[take], v[take]
            improved |= take
        trail.append(best.copy())
        if not improved.any():
            break
    return x, best, np.array(trail).T if trail else np.empty((n, 0))


def _grid(m, region: Box, resolution: int):
    pts = region.grid(resolution)
    pts = pts[m.domain.contains(pts)]
    w = m.evaluate(pts, errors="nan")
    ok = np.isfinite(w)
    return pts[ok], w[ok]


def _hash_pairs(w, cell):
    """Index pairs ``i < j`` whose images share or neighbour a hash cell of size ``cell``."""
    ix = np.floor(w.real / cell).astype(np.int64)
    iy = np.floor(w.imag / cell).astype(np.int64)
    ix -= ix.min() - 1
    iy -= iy.min() - 1
    span = int(iy.max()) + 2
    key = ix * span + iy
    order = np.argsort(key, kind="stable")
    sk = key[order]
    out_i, out_j = [], []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            target = key + dx * span + dy
            lo = np.searchsorted(sk, target, "left")
            hi = np.searchsorted(sk, target, "right")
            cnt = hi - lo
            if not cnt.any():
                continue
            ii = np.repeat(np.arange(len(w)), cnt)
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            jj = order[np.repeat(lo, cnt) + offs]
            keep = ii < jj
            out_i.append(ii[keep])
            out_j.append(jj[keep])
    if not out_i:
        return np.empty(0, int), np.empty(0, int)
    return np.concatenate(out_i), np.concatenate(out_j)


def _finalize(m, z1, z2, hist):
    wit = []
    f1 = m.evaluate(z1, errors="nan")
    f2 = m.evaluate(z2, errors="nan")
    for a, b, fa, fb, h in zip(z1, z2, f1, f2, hist):
        sep = abs(a - b)
        dist = abs(fa - fb)
        if not (np.isfinite(dist) and sep >= SEPARATION_FLOOR and dist <= WITNESS_TOL * (1 + abs(fa))):
            continue
        if a.real > b.real or (a.real == b.real and a.imag > b.imag):
            a, b, fa = b, a, fb
        wit.append(CollisionWitness(complex(a), complex(b), float(sep), float(dist), complex(fa),
                                    [float(np.sqrt(v)) for v in h if np.isfinite(v)]))
    uniq: List[CollisionWitness] = []
    for wv in sorted(wit, key=lambda w: (w.image_distance, w.z1.real, w.z1.imag, w.z2.real, w.z2.imag)):
        if all(abs(wv.z1 - u.z1) + abs(wv.z2 - u.z2) > 1e-6 for u in uniq):
            uniq.append(wv)
    return uniq


def preimages(m: PiecewiseMap, w0: complex, region: Box, resolution: int = 256) -> np.ndarray:
    """Points of ``region`` mapped to ``w0``, from grid minima refined by pattern search."""
    pts, w = _grid(m, region, resolution)
    h = region.spacing(resolution)
    r = np.abs(w - w0)
    lip = np.nanmax(np.abs(np.diff(w))[np.abs(np.diff(pts)) < 1.5 * h]) / h if len(w) > 1 else 1.0
    cand = pts[r < 2 * lip * h]
    if not len(cand):
        return cand

    def resid(x):
        with np.errstate(all="ignore"):
            return m.evaluate(x[:, 0] + 1j * x[:, 1], errors="nan") - w0

    def fun(x):
        v = np.abs(resid(x)) ** 2
        return np.where(np.isfinite(v), v, np.inf)

    x, best, _ = _pattern_search(fun, np.column_stack([cand.real, cand.imag]), h)
    x, best, _ = _polish(resid, x, best)
    z = x[:, 0] + 1j * x[:, 1]
    z = z[best <= (WITNESS_TOL * (1 + abs(w0))) ** 2]
    z = z[np.lexsort((z.imag, z.real))]
    out: List[complex] = []
    for q in z:
        if all(abs(q - p) > 1e-6 for p in out):
            out.append(complex(q))
    return np.array(out)


def find_collisions(m: PiecewiseMap, region: Box, resolution: int = 256,
                    image: Optional[complex] = None, max_candidates: int = 64,
                    min_separation: Optional[float] = None) -> List[CollisionWitness]:
    """Pairs ``z1 != z2`` in ``region`` with ``f(z1) = f(z2)``, sorted by image distance.

    Grid images are bucketed in a uniform spatial hash whose cell matches
    the largest image step between grid neighbours. Candidate pairs from
    the same or adjacent cells are refined jointly by pattern search in four
    real variables. With ``image`` the search is restricted to the fibre
    over that value: its preimages are located and paired.
    """
    h = region.spacing(resolution)
    if image is not None:
        pre = preimages(m, complex(image), region, resolution)
        z1, z2 = [], []
        for i in range(len(pre)):
            for j in range(i + 1, len(pre)):
                z1.append(pre[i])
                z2.append(pre[j])
        hist = [[float(_objective(m, np.array([a]), np.array([b]))[0])] for a, b in zip(z1, z2)]
        return _finalize(m, np.array(z1, dtype=complex), np.array(z2, dtype=complex), hist)

    pts, w = _grid(m, region, resolution)
    if len(pts) < 2:
        return []
    steps = np.abs(np.diff(w))[np.abs(np.diff(pts)) < 1.5 * h]
    cell = max(float(np.max(steps)) if len(steps) else h, 1e-12)
    sep = 4 * h if min_separation is None else min_separation
    i, j = _hash_pairs(w, cell)
    keep = np.abs(pts[i] - pts[j]) > sep
    i, j = i[keep], j[keep]
    if not len(i):
        return []
    d = np.abs(w[i] - w[j])
    order = np.lexsort((pts[j].imag, pts[j].real, pts[i].imag, pts[i].real, d))
    chosen: List[tuple] = []
    for k in order:
        a, b = pts[i[k]], pts[j[k]]
        if all(abs(a - p) + abs(b - q) > 8 * h for p, q in chosen):
            chosen.append((a, b))
            if len(chosen) >= max_candidates:
                break
    x0 = np.array([[a.real, a.imag, b.real, b.imag] for a, b in chosen])

    def resid(x):
        with np.errstate(all="ignore"):
            return (m.evaluate(x[:, 0] + 1j * x[:, 1], errors="nan")
                    - m.evaluate(x[:, 2] + 1j * x[:, 3], errors="nan"))

    def fun(x):
        return _objective(m, x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3])

    x, best, trail = _pattern_search(fun, x0, h)
    x, best, trail2 = _polish(resid, x, best)
    trail = np.concatenate([trail, trail2], axis=1)
    z1 = x[:, 0] + 1j * x[:, 1]
    z2 = x[:, 2] + 1j * x[:, 3]
    return _finalize(m, z1, z2, trail)


def witnesses_json(ws: List[CollisionWitness]) -> str:
    from .reports import dumps

    return dumps({"witnesses": [w.to_dict() for w in ws]})


def witnesses_csv(ws: List[CollisionWitness]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x1", "y1", "x2", "y2", "image_distance"])
    for w in ws:
        wr.writerow([repr(w.z1.real), repr(w.z1.imag), repr(w.z2.real), repr(w.z2.imag), repr(w.image_distance)])
    return buf.getvalue()


# -- the quantitative bound ---------------------------------------------------------

@dataclass
class BiLipschitzCheck:
    lam: float
    K: float
    pairs: int
    min_ratio: float
    bound: float
    passed: bool
    argmin: tuple = ()
    certificate: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.__dict__)


def certify_quasiregular(m: PiecewiseMap, region: Box, lam: float, K: float,
                         resolution: int = 128, tol: float = 1e-9) -> dict:
    """Sampled certificate ``J >= lam^2 - tol`` and ``k_hat <= (K-1)/(K+1) + tol``."""
    rep = distortion_sweep(m, region, resolution, predicate=jacobian_floor(lam), refine=False)
    k_allowed = (K - 1) / (K + 1)
    return {"jacobian_min": rep.jacobian_min, "k_hat": rep.k_hat, "k_allowed": k_allowed,
            "samples": rep.samples, "ok": rep.violations == 0 and rep.k_hat <= k_allowed + tol}


def bilipschitz_check(m: PiecewiseMap, lam: float, K: float, region: Box = Box(-1, 1, -1, 1),
                      cloud: int = 48, seed: int = DEFAULT_SEED, certify: bool = True,
                      chunk: int = 256) -> BiLipschitzCheck:
    """Minimum of ``|f(z1) - f(z2)| / |z1 - z2|`` over all pairs of a Halton cloud against ``lam/sqrt(K)``."""
    if not lam > 0 or not K >= 1:
        raise ValueError("need lam > 0 and K >= 1")
    cert = certify_quasiregular(m, region, lam, K) if certify else {}
    if certify and not cert["ok"]:
        raise HypothesisError(f"certificate failed: J_min={cert['jacobian_min']:.6g}, "
                              f"k_hat={cert['k_hat']:.6g} vs k={cert['k_allowed']:.6g}")
    z = halton_in_domain(cloud * cloud, region, m.domain, seed)
    f = m.evaluate(z)
    best, arg = np.inf, (0, 0)
    pairs = 0
    for s in range(0, len(z), chunk):
        zi, fi = z[s:s + chunk, None], f[s:s + chunk, None]
        dz = np.abs(zi - z[None, :])
        df = np.abs(fi - f[None, :])
        upper = np.arange(s, s + len(zi))[:, None] < np.arange(len(z))[None, :]
        with np.errstate(all="ignore"):
            r = np.where(upper & (dz > 0), df / dz, np.inf)
        pairs += int(upper.sum())
        k = np.unravel_index(np.argmin(r), r.shape)
        if r[k] < best:
            best, arg = float(r[k]), (complex(z[s + k[0]]), complex(z[k[1]]))
    bound = lam / np.sqrt(K)
    return BiLipschitzCheck(float(lam), float(K), pairs, best, float(bound),
                            bool(best >= bound - 1e-9), arg, cert)


# -- lambda shift -------------------------------------------------------------------

SHIFT_PARAM = "shift_lambda"


@dataclass
class LambdaShiftReport:
    map: PiecewiseMap
    lam: float
    samples: int
    identity_residual: float
    hypothesis_holds: bool
    floor_min: float  # min J of the shift where the hypothesis holds pointwise
    floor_holds: bool
    floor_asserted: bool

    def to_dict(self):
        d = dict(self.__dict__)
        d["map"] = self.map.source()
        return d


def shifted_map(m: PiecewiseMap, lam: float) -> PiecewiseMap:
    """``f + lam z``, with ``lam`` as a declared parameter."""
    if SHIFT_PARAM in m.param_dict:
        raise ValueError(f"map already declares {SHIFT_PARAM}")
    term = E.Mul(E.Param(SHIFT_PARAM), E.Var())
    pieces = tuple(Piece(p.guard, E.Add(p.expr, term)) for p in m.pieces)
    params = tuple(m.params) + ((SHIFT_PARAM, float(lam)),)
    return PiecewiseMap(f"{m.name}+lambda", params, pieces, m.domain, m.reflect)


def lambda_shift(m: PiecewiseMap, lam: float, region: Box = Box(-1, 1, -1, 1), samples: int = 1000,
                 seed: int = DEFAULT_SEED, tol: float = 1e-9) -> LambdaShiftReport:
    """Shift ``f`` by ``lam z`` and check ``J_shift = J + lam^2 + 2 lam Re f_z`` at samples.

    The floor ``J_shift >= lam^2`` is asserted only when ``Re f_z >= -tol`` and
    ``J >= -tol`` hold at every sample.
    """
    lam = float(lam)
    g = shifted_map(m, lam)
    z = halton_in_domain(samples, region, m.domain, seed)
    z = z[~boundary_band(m, z)]
    _, fz, fb = map_jets(m, z, errors="nan")
    _, gz, gb = map_jets(g, z, errors="nan")
    ok = np.isfinite(fz) & np.isfinite(gz)
    fz, fb, gz, gb = fz[ok], fb[ok], gz[ok], gb[ok]
    J = np.abs(fz) ** 2 - np.abs(fb) ** 2
    Jl = np.abs(gz) ** 2 - np.abs(gb) ** 2
    resid = float(np.max(np.abs(Jl - (J + lam * lam + 2 * lam * fz.real)))) if len(J) else 0.0
    pointwise = (fz.real >= -tol) & (J >= -tol)
    holds = bool(pointwise.all())
    floor_min = float(Jl[pointwise].min()) if pointwise.any() else float("nan")
    floor_ok = bool(pointwise.any() and floor_min >= lam * lam - tol)
    return LambdaShiftReport(g, lam, int(len(J)), resid, holds, floor_min, floor_ok, holds)
