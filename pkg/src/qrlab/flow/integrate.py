"""Integral curves of ``dz/dt = f(z)`` by an embedded Dormand-Prince 5(4) pair.

All seeds of a batch advance together, each with its own step size, so a
fan of trajectories costs one vectorized field evaluation per stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from ..mapdsl.maps import PiecewiseMap

# Dormand-Prince tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class Verdict(str, Enum):
    REACHES = "reaches-critical-point"
    EXITS = "exits-annulus"
    CLOSES = "closes-up"
    BUDGET = "step-budget-exhausted"


@dataclass(frozen=True)
class TraceConfig:
    R: float = 1.0
    center: complex = 0j
    initial_step: float = 1e-2
    tol: float = 1e-9
    max_steps: int = 20000
    rho: Optional[float] = None  # default 1e-4 R
    rho_close: Optional[float] = None  # default 1e-3 R
    max_move: Optional[float] = None  # cap on |h f| per step, default R / 8
    transversal_deg: float = 30.0
    detect_closing: bool = True
    t_max: Optional[float] = None  # stop at this |t| (verdict step-budget-exhausted)

    @property
    def rho_reach(self) -> float:
        return self.rho if self.rho is not None else 1e-4 * self.R

    @property
    def rho_closing(self) -> float:
        return self.rho_close if self.rho_close is not None else 1e-3 * self.R

    @property
    def move_max(self) -> float:
        return self.max_move if self.max_move is not None else self.R / 8


@dataclass
class Trajectory:
    seed: complex
    direction: int  # +1 forward, -1 backward in t
    t: np.ndarray
    z: np.ndarray
    velocity: np.ndarray  # f(z) at the samples, i.e. dz/dt
    verdict: Verdict
    steps: int = 0
    rejected: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def end(self) -> complex:
        return complex(self.z[-1])

    @property
    def duration(self) -> float:
        return float(abs(self.t[-1] - self.t[0]))

    def chronological(self):
        """``(t, z, velocity)`` ordered by increasing ``t``."""
        if self.direction > 0:
            return self.t, self.z, self.velocity
        return self.t[::-1], self.z[::-1], self.velocity[::-1]


def hermite(z0, z1, d0, d1, h, s):
    """Cubic Hermite interpolant on ``[0, 1]`` with end slopes ``d0, d1`` (per unit of ``h``)."""
    s = np.asarray(s)
    s2, s3 = s * s, s * s * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * z0 + h10 * h * d0 + h01 * z1 + h11 * h * d1


def hermite_slope(z0, z1, d0, d1, h, s):
    """``d/dt`` of :func:`hermite` (``t = t0 + s h``)."""
    s = np.asarray(s)
    s2 = s * s
    return ((6 * s2 - 6 * s) * z0 / h + (3 * s2 - 4 * s + 1) * d0
            + (-6 * s2 + 6 * s) * z1 / h + (3 * s2 - 2 * s) * d1)


_CLOSE_GRID = np.linspace(0.0, 1.0, 65)


def trace_many(m: PiecewiseMap, seeds: Sequence[complex], direction: int = 1,
               config: TraceConfig = TraceConfig()) -> List[Trajectory]:
    """Trace each seed in the annulus ``rho < |z - center| < R`` until a verdict."""
    seeds = np.asarray(seeds, dtype=complex).ravel()
    n = len(seeds)
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    c = complex(config.center)
    rho, R, rho_c = config.rho_reach, config.R, config.rho_closing
    dist0 = np.abs(seeds - c)
    if np.any(dist0 <= rho) or np.any(dist0 >= R):
        raise ValueError("seeds must lie strictly inside the annulus rho < |z - center| < R")
    cos_tr = np.cos(np.radians(config.transversal_deg))

    def rhs(z):
        return direction * m.evaluate(z, errors="nan")

    z = seeds.copy()
    tau = np.zeros(n)
    k1 = rhs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.minimum(float(config.initial_step), config.move_max / np.abs(k1))
    v0 = k1.copy()
    active = np.isfinite(k1)
    left = np.zeros(n, dtype=bool)
    steps = np.zeros(n, dtype=int)
    rejected = np.zeros(n, dtype=int)
    verdict = np.full(n, None, dtype=object)
    diagnostics = [dict() for _ in range(n)]
    for i in np.flatnonzero(~active):
        verdict[i] = Verdict.BUDGET
        diagnostics[i]["reason"] = "field not finite at seed"
    hist_t = [[0.0] for _ in range(n)]
    hist_z = [[complex(s)] for s in seeds]
    hist_v = [[complex(k)] for k in k1 * direction]
    h_min = 1e-14 * R

    while active.any():
        idx = np.flatnonzero(active)
        zi, hi, k = z[idx], h[idx], [k1[idx]]
        if config.t_max is not None:
            hi = np.minimum(hi, config.t_max - tau[idx])
        for s in range(1, 7):
            inc = sum(a * kk for a, kk in zip(_A[s], k) if a != 0)
            k.append(rhs(zi + hi * inc))
        z_new = zi + hi * sum(b * kk for b, kk in zip(_B5, k) if b != 0)
        err_vec = hi * sum(e * kk for e, kk in zip(_E, k) if e != 0)
        scale = config.tol * np.maximum(np.maximum(np.abs(zi - c), np.abs(z_new - c)), rho)
        with np.errstate(all="ignore"):
            err = np.abs(err_vec) / scale
        finite = np.isfinite(z_new) & np.isfinite(err) & np.isfinite(k[6])
        accept = finite & (err <= 1.0)
        with np.errstate(all="ignore"):
            factor = np.where(finite, 0.9 * np.power(np.maximum(err, 1e-10), -0.2), 0.25)
        factor = np.clip(factor, 0.2, 5.0)
        factor = np.where(accept, factor, np.minimum(factor, 0.9))
        speed = np.abs(np.where(accept, k[6], k[0]))
        with np.errstate(divide="ignore"):
            h_cap = np.where(speed > 0, config.move_max / speed, np.inf)
        h_next = np.minimum(hi * factor, h_cap)

        rej = idx[~accept]
        rejected[rej] += 1
        h[rej] = h_next[~accept]
        tiny = rej[h[rej] < h_min]
        for i in tiny:
            verdict[i] = Verdict.BUDGET
            diagnostics[i]["reason"] = "step size underflow"
            active[i] = False

        acc = np.flatnonzero(accept)
        if len(acc):
            ids = idx[acc]
            z_old = zi[acc]
            f_old = k[0][acc]
            z1 = z_new[acc]
            f1 = k[6][acc]
            hs = hi[acc]
            t_old = tau[ids].copy()
            z[ids] = z1
            tau[ids] += hs
            k1[ids] = f1
            h[ids] = h_next[acc]
            steps[ids] += 1
            d = np.abs(z1 - c)
            closed_at = np.full(len(ids), np.nan)
            close_pt = np.full(len(ids), np.nan + 0j)
            if config.detect_closing:
                probe = left[ids]
                if probe.any():
                    pi = np.flatnonzero(probe)
                    curve = hermite(z_old[pi, None], z1[pi, None], f_old[pi, None], f1[pi, None],
                                    hs[pi, None], _CLOSE_GRID[None, :])
                    gap = np.abs(curve - seeds[ids[pi], None])
                    j = np.argmin(gap, axis=1)
                    # a minimum at the step end is resolved by the next step
                    near = (gap[np.arange(len(pi)), j] < rho_c) & (j < len(_CLOSE_GRID) - 1)
                    for q in np.flatnonzero(near):
                        row = pi[q]
                        s_star = _refine_closest(z_old[row], z1[row], f_old[row], f1[row], hs[row],
                                                 seeds[ids[row]], _CLOSE_GRID[j[q]])
                        vel = hermite_slope(z_old[row], z1[row], f_old[row], f1[row], hs[row], s_star)
                        a0 = v0[ids[row]]
                        cosang = np.real(vel * np.conj(a0)) / (abs(vel) * abs(a0) + 1e-300)
                        T = t_old[row] + s_star * hs[row]
                        if cosang >= cos_tr and T > 10 * config.initial_step:
                            closed_at[row] = T
                            close_pt[row] = _dopri_point(rhs, z_old[row], f_old[row], s_star * hs[row])
                left[ids] |= np.abs(z1 - seeds[ids]) > 10 * rho_c
            for q, i in enumerate(ids):
                if np.isfinite(closed_at[q]):
                    hist_t[i].append(direction * closed_at[q])
                    hist_z[i].append(complex(close_pt[q]))
                    hist_v[i].append(complex(m.evaluate(close_pt[q], errors="nan")))
                    verdict[i] = Verdict.CLOSES
                    diagnostics[i]["closing_gap"] = float(abs(close_pt[q] - seeds[i]))
                    active[i] = False
                    continue
                hist_t[i].append(direction * tau[i])
                hist_z[i].append(complex(z1[q]))
                hist_v[i].append(complex(f1[q] * direction))
                if d[q] < rho:
                    verdict[i] = Verdict.REACHES
                    active[i] = False
                elif d[q] > R:
                    verdict[i] = Verdict.EXITS
                    active[i] = False
                elif config.t_max is not None and tau[i] >= config.t_max:
                    verdict[i] = Verdict.BUDGET
                    diagnostics[i]["reason"] = "time limit"
                    active[i] = False
                elif steps[i] >= config.max_steps:
                    verdict[i] = Verdict.BUDGET
                    diagnostics[i]["reason"] = "max steps"
                    active[i] = False

    return [
        Trajectory(complex(seeds[i]), direction, np.array(hist_t[i]), np.array(hist_z[i]),
                   np.array(hist_v[i]), verdict[i], int(steps[i]), int(rejected[i]), diagnostics[i])
        for i in range(n)
    ]


def _dopri_point(rhs, z0, f0, h):
    k = [np.atleast_1d(f0)]
    z0 = np.atleast_1d(z0)
    for s in range(1, 6):
        k.append(rhs(z0 + h * sum(a * kk for a, kk in zip(_A[s], k) if a != 0)))
    return complex((z0 + h * sum(b * kk for b, kk in zip(_B5, k) if b != 0))[0])


def _refine_closest(z0, z1, d0, d1, h, target, s_guess, iters: int = 40):
    lo = max(0.0, s_guess - 1 / 64)
    hi = min(1.0, s_guess + 1 / 64)
    g = (np.sqrt(5) - 1) / 2
    for _ in range(iters):
        a = hi - g * (hi - lo)
        b = lo + g * (hi - lo)
        if abs(hermite(z0, z1, d0, d1, h, a) - target) < abs(hermite(z0, z1, d0, d1, h, b) - target):
            hi = b
        else:
            lo = a
    return 0.5 * (lo + hi)


def trace(m: PiecewiseMap, seed: complex, direction: int = 1,
          config: TraceConfig = TraceConfig()) -> Trajectory:
    """Trace a single integral curve; see :func:`trace_many`."""
    return trace_many(m, [seed], direction, config)[0]
