"""Wirtinger jets ``(f, f_z, f_zbar)``.

Two independent routes: forward-mode propagation through the expression
tree (``z`` and ``conj(z)`` treated as independent variables) and central
finite differences. A structurally zero derivative is carried as ``None`` so
that holomorphic pieces report ``f_zbar == 0`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import BoundaryBandError, DomainError, DomainSingularityError, CoverageGapError
from ..mapdsl import expr as E
from ..mapdsl.maps import Piece, PiecewiseMap

BAND = 1e-6


@dataclass(frozen=True)
class WirtingerJet:
    z: complex
    f: complex
    fz: complex
    fzbar: complex

    @property
    def jacobian(self) -> float:
        return abs(self.fz) ** 2 - abs(self.fzbar) ** 2

    @property
    def beltrami(self) -> complex:
        return self.fzbar / self.fz


# -- forward mode --------------------------------------------------------------

def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _neg(a):
    return None if a is None else -a


def _scale(c, a):
    return None if a is None else c * a


def _conj(a):
    return None if a is None else np.conj(a)


def forward(e: E.Expr, z, params):
    """Return ``(value, d/dz, d/dzbar)`` of ``e`` at ``z``; derivatives may be ``None``."""
    if isinstance(e, E.Var):
        return z, 1.0, None
    if isinstance(e, E.Const):
        return e.value, None, None
    if isinstance(e, E.Param):
        return complex(params[e.name]), None, None
    if isinstance(e, E.Neg):
        v, dz, db = forward(e.arg, z, params)
        return -v, _neg(dz), _neg(db)
    if isinstance(e, (E.Add, E.Sub)):
        a, adz, adb = forward(e.left, z, params)
        b, bdz, bdb = forward(e.right, z, params)
        if isinstance(e, E.Add):
            return a + b, _add(adz, bdz), _add(adb, bdb)
        return a - b, _add(adz, _neg(bdz)), _add(adb, _neg(bdb))
    if isinstance(e, E.Mul):
        a, adz, adb = forward(e.left, z, params)
        b, bdz, bdb = forward(e.right, z, params)
        return a * b, _add(_scale(b, adz), _scale(a, bdz)), _add(_scale(b, adb), _scale(a, bdb))
    if isinstance(e, E.Div):
        a, adz, adb = forward(e.left, z, params)
        b, bdz, bdb = forward(e.right, z, params)
        v = a / b
        return v, _quot(adz, bdz, v, b), _quot(adb, bdb, v, b)
    if isinstance(e, E.Pow):
        n = E.power_exponent(e, params)
        a, adz, adb = forward(e.base, z, params)
        if n == 0:
            return E.int_power(a, 0), None, None
        d = n * E.int_power(a, n - 1)
        return E.int_power(a, n), _scale(d, adz), _scale(d, adb)
    if isinstance(e, E.Call):
        a, adz, adb = forward(e.arg, z, params)
        return _call(e.fn, a, adz, adb)
    raise TypeError(f"unknown node {e!r}")


def _quot(da, db, v, b):
    if da is None and db is None:
        return None
    num = _add(da, _neg(_scale(v, db)))
    return num / b


def _call(fn, a, adz, adb):
    if fn == "conj":
        return np.conj(a), _conj(adb), _conj(adz)
    if fn == "re":
        return np.real(a) + 0j, _half(_add(adz, _conj(adb))), _half(_add(adb, _conj(adz)))
    if fn == "im":
        dz = _add(adz, _neg(_conj(adb)))
        db = _add(adb, _neg(_conj(adz)))
        return np.imag(a) + 0j, _scale(-0.5j, dz), _scale(-0.5j, db)
    if fn == "abs":
        m = np.abs(a)
        ca = np.conj(a)
        dz = _add(_scale(ca, adz), _scale(a, _conj(adb)))
        db = _add(_scale(ca, adb), _scale(a, _conj(adz)))
        return m + 0j, None if dz is None else dz / (2 * m), None if db is None else db / (2 * m)
    if fn == "sqrt":
        s = np.sqrt(a + 0j)
        d = 1.0 / (2 * s)
        return s, _scale(d, adz), _scale(d, adb)
    if fn == "exp":
        x = np.exp(a + 0j)
        return x, _scale(x, adz), _scale(x, adb)
    raise ValueError(f"unknown function {fn}")


def _half(a):
    return None if a is None else 0.5 * a


# -- symbolic derivative -------------------------------------------------------

def _s_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return E.Add(a, b)


def _s_sub(a, b):
    if b is None:
        return a
    if a is None:
        return E.Neg(b)
    return E.Sub(a, b)


def _s_mul(c, a):
    if a is None:
        return None
    if isinstance(c, E.Const) and c.value == 1:
        return a
    return E.Mul(c, a)


def _s_conj(a):
    return None if a is None else E.Call("conj", a)


def derivative(e: E.Expr):
    """Symbolic ``(d/dz, d/dzbar)`` of an expression (``None`` for zero)."""
    if isinstance(e, E.Var):
        return E.Const(1 + 0j), None
    if isinstance(e, (E.Const, E.Param)):
        return None, None
    if isinstance(e, E.Neg):
        dz, db = derivative(e.arg)
        return (None if dz is None else E.Neg(dz)), (None if db is None else E.Neg(db))
    if isinstance(e, (E.Add, E.Sub)):
        adz, adb = derivative(e.left)
        bdz, bdb = derivative(e.right)
        op = _s_add if isinstance(e, E.Add) else _s_sub
        return op(adz, bdz), op(adb, bdb)
    if isinstance(e, E.Mul):
        adz, adb = derivative(e.left)
        bdz, bdb = derivative(e.right)
        return (_s_add(_s_mul(e.right, adz), _s_mul(e.left, bdz)),
                _s_add(_s_mul(e.right, adb), _s_mul(e.left, bdb)))
    if isinstance(e, E.Div):
        adz, adb = derivative(e.left)
        bdz, bdb = derivative(e.right)

        def quot(da, db):
            if da is None and db is None:
                return None
            return E.Div(_s_sub(da, _s_mul(e, db)), e.right)

        return quot(adz, bdz), quot(adb, bdb)
    if isinstance(e, E.Pow):
        adz, adb = derivative(e.base)
        if e.exponent == 0:
            return None, None
        if isinstance(e.exponent, int):
            n = e.exponent
            factor = E.Mul(E.Const(complex(n)), E.Pow(e.base, n - 1)) if n != 1 else E.Const(1 + 0j)
        else:
            sign = -1.0 if e.negate else 1.0
            n_expr = E.Mul(E.Const(complex(sign)), E.Param(e.exponent))
            # base^(n-1) written as base^n / base keeps the exponent a parameter
            factor = E.Mul(n_expr, E.Div(e, e.base))
        return _s_mul(factor, adz), _s_mul(factor, adb)
    if isinstance(e, E.Call):
        a = e.arg
        adz, adb = derivative(a)
        if e.fn == "conj":
            return _s_conj(adb), _s_conj(adz)
        if e.fn == "re":
            h = E.Const(0.5 + 0j)
            return _s_mul(h, _s_add(adz, _s_conj(adb))), _s_mul(h, _s_add(adb, _s_conj(adz)))
        if e.fn == "im":
            h = E.Const(-0.5j)
            return _s_mul(h, _s_sub(adz, _s_conj(adb))), _s_mul(h, _s_sub(adb, _s_conj(adz)))
        if e.fn == "abs":
            ca = E.Call("conj", a)
            two_m = E.Mul(E.Const(2 + 0j), e)
            dz = _s_add(_s_mul(ca, adz), _s_mul(a, _s_conj(adb)))
            db = _s_add(_s_mul(ca, adb), _s_mul(a, _s_conj(adz)))
            return (None if dz is None else E.Div(dz, two_m)), (None if db is None else E.Div(db, two_m))
        if e.fn == "sqrt":
            d = E.Div(E.Const(1 + 0j), E.Mul(E.Const(2 + 0j), e))
            return _s_mul(d, adz), _s_mul(d, adb)
        if e.fn == "exp":
            return _s_mul(e, adz), _s_mul(e, adb)
    raise TypeError(f"unknown node {e!r}")


def gradient_field(m: PiecewiseMap) -> PiecewiseMap:
    """``u_x + i u_y = 2 u_zbar`` for a real-valued map ``u``, as a new map."""
    if not m.is_real_valued:
        raise ValueError(f"{m.name} is not real-valued; its gradient field is undefined")
    pieces = []
    for p in m.pieces:
        _, db = derivative(p.expr)
        expr = E.Const(0j) if db is None else E.Mul(E.Const(2 + 0j), db)
        pieces.append(Piece(p.guard, expr))
    return PiecewiseMap(f"grad({m.name})", m.params, tuple(pieces), m.domain, m.reflect)


# -- map-level jets ------------------------------------------------------------

def _broadcast(x, shape):
    if x is None:
        return np.zeros(shape, dtype=complex)
    return np.broadcast_to(np.asarray(x, dtype=complex), shape)


def map_jets(m: PiecewiseMap, z, errors: str = "raise"):
    """Vectorized ``(f, fz, fzbar)`` by forward mode; ``errors='nan'`` marks bad points with NaN."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    inside = m.domain.contains(z)
    if errors == "raise" and not inside.all():
        raise DomainError(f"{z[~inside][0]} is outside the domain of {m.name}")
    idx, flipped = m.select(z)
    idx[~inside] = -1
    if errors == "raise" and (inside & (idx < 0)).any():
        raise CoverageGapError(f"no piece of {m.name} covers {z[inside & (idx < 0)][0]}")
    w = np.where(flipped, np.conj(z), z)
    nan = np.nan + 1j * np.nan
    f = np.full(z.shape, nan)
    fz = np.full(z.shape, nan)
    fb = np.full(z.shape, nan)
    params = m.param_dict
    with np.errstate(all="ignore"):
        for k, piece in enumerate(m.pieces):
            sel = idx == k
            if not sel.any():
                continue
            shape = (int(sel.sum()),)
            v, dz, db = forward(piece.expr, w[sel], params)
            f[sel] = _broadcast(v, shape)
            fz[sel] = _broadcast(dz, shape)
            fb[sel] = _broadcast(db, shape)
    f = np.where(flipped, np.conj(f), f)
    fz = np.where(flipped, np.conj(fz), fz)
    fb = np.where(flipped, np.conj(fb), fb)
    if errors == "raise":
        bad = (idx >= 0) & ~(np.isfinite(f) & np.isfinite(fz) & np.isfinite(fb))
        if bad.any():
            raise DomainSingularityError(f"{m.name} has no derivative at {z[bad][0]}")
    return f, fz, fb


_PROBES = np.exp(2j * np.pi * np.arange(8) / 8)


def boundary_band(m: PiecewiseMap, z, band: float = BAND) -> np.ndarray:
    """True where the active piece (or the reflection side) changes within ``band``.

    Points whose probe circle leaves the domain are also flagged.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    idx0, fl0 = m.select(z)
    flagged = ~m.domain.contains(z)
    for p in _PROBES:
        q = z + band * p
        idx, fl = m.select(q)
        flagged |= (idx != idx0) | (fl != fl0) | ~m.domain.contains(q)
    return flagged


def jet_autodiff(m: PiecewiseMap, z: complex, band: float = BAND) -> WirtingerJet:
    """Exact-to-round-off jet of the active piece at an interior point."""
    if boundary_band(m, z, band)[0]:
        raise BoundaryBandError(f"{z} lies within {band} of a guard boundary of {m.name}")
    f, fz, fb = map_jets(m, z)
    return WirtingerJet(complex(z), complex(f[0]), complex(fz[0]), complex(fb[0]))


def jet_finite_difference(m: PiecewiseMap, z: complex, h: float = 1e-5) -> WirtingerJet:
    """Central differences: ``fz = (f_x - i f_y)/2``, ``fzbar = (f_x + i f_y)/2``."""
    z = complex(z)
    stencil = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
    if not m.domain.contains(stencil).all():
        raise BoundaryBandError(f"finite-difference stencil at {z} leaves the domain")
    idx, fl = m.select(stencil)
    if (idx != idx[0]).any() or (fl != fl[0]).any():
        raise BoundaryBandError(f"finite-difference stencil at {z} crosses a guard boundary")
    vals = m.evaluate(stencil)
    fx = (vals[1] - vals[2]) / (2 * h)
    fy = (vals[3] - vals[4]) / (2 * h)
    return WirtingerJet(z, complex(vals[0]), complex((fx - 1j * fy) / 2), complex((fx + 1j * fy) / 2))


def finite_difference_jets(m: PiecewiseMap, z, h: float = 1e-5):
    """Vectorized central-difference ``(fz, fzbar)`` without stencil checks."""
    z = np.asarray(z, dtype=complex)
    fx = (m.evaluate(z + h, "nan") - m.evaluate(z - h, "nan")) / (2 * h)
    fy = (m.evaluate(z + 1j * h, "nan") - m.evaluate(z - 1j * h, "nan")) / (2 * h)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2
