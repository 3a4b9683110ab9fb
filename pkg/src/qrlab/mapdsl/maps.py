"""Piecewise-defined planar maps and their text format."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..errors import (
    CoverageGapError,
    DomainError,
    DomainSingularityError,
    DslSyntaxError,
    UndeclaredParameterError,
)
from . import expr as E
from .domains import Disk, Domain, HalfPlane, Plane, Polygon
from .guards import Guard, TRUE, evaluate_guard, guard_parameters, guard_source
from .parser import RESERVED, parse_constant, parse_expression, parse_guard


@dataclass(frozen=True)
class Piece:
    guard: Guard
    expr: E.Expr

    def source(self) -> str:
        return f"piece: {guard_source(self.guard)} -> {E.to_source(self.expr)}"


@dataclass(frozen=True)
class PiecewiseMap:
    """Ordered (guard, formula) pieces; the first matching guard wins.

    With ``reflect=True`` the pieces describe the map on the closed upper
    half-plane and ``f(z) = conj(f(conj z))`` below the real axis.
    """

    name: str
    params: Tuple[Tuple[str, float], ...]
    pieces: Tuple[Piece, ...]
    domain: Domain = field(default_factory=Plane)
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", tuple((str(k), float(v)) for k, v in self.params))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValueError("a map needs at least one piece")
        declared = set(self.param_dict)
        for p in self.pieces:
            missing = (E.parameters_used(p.expr) | guard_parameters(p.guard)) - declared
            if missing:
                raise UndeclaredParameterError(f"undeclared parameter(s) {sorted(missing)}")

    @property
    def param_dict(self) -> Dict[str, float]:
        return dict(self.params)

    @property
    def is_real_valued(self) -> bool:
        return all(E.is_real_valued(p.expr) for p in self.pieces)

    def with_params(self, **values) -> "PiecewiseMap":
        params = self.param_dict
        for k, v in values.items():
            if k not in params:
                raise UndeclaredParameterError(f"undeclared parameter {k!r}")
            params[k] = float(v)
        return replace(self, params=tuple(params.items()))

    # -- evaluation -----------------------------------------------------------
    def fold(self, z):
        """Return ``(w, flipped)``: the point where the pieces are evaluated."""
        z = np.asarray(z, dtype=complex)
        if not self.reflect:
            return z, np.zeros(z.shape, dtype=bool)
        flipped = np.imag(z) < 0
        return np.where(flipped, np.conj(z), z), flipped

    def select(self, z):
        """Index of the active piece per point (-1: no guard matches)."""
        w, flipped = self.fold(z)
        idx = np.full(w.shape, -1, dtype=np.int64)
        params = self.param_dict
        with np.errstate(all="ignore"):
            for k, piece in enumerate(self.pieces):
                free = idx < 0
                if not free.any():
                    break
                hit = evaluate_guard(piece.guard, w[free], params)
                sub = idx[free]
                sub[hit] = k
                idx[free] = sub
        return idx, flipped

    def __call__(self, z, errors: str = "raise"):
        return self.evaluate(z, errors)

    def evaluate(self, z, errors: str = "raise"):
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        inside = self.domain.contains(z)
        if errors == "raise" and not inside.all():
            bad = z[~inside][0]
            raise DomainError(f"{bad} is outside the domain of {self.name}")
        idx, flipped = self.select(z)
        idx[~inside] = -1
        if errors == "raise" and (inside & (idx < 0)).any():
            bad = z[inside & (idx < 0)][0]
            raise CoverageGapError(f"no piece of {self.name} covers {bad}")
        w = np.where(flipped, np.conj(z), z)
        out = np.full(z.shape, np.nan + 1j * np.nan)
        params = self.param_dict
        with np.errstate(all="ignore"):
            for k, piece in enumerate(self.pieces):
                m = idx == k
                if m.any():
                    out[m] = np.broadcast_to(E.evaluate(piece.expr, w[m], params), (int(m.sum()),))
        out = np.where(flipped, np.conj(out), out)
        if errors == "raise":
            bad = (idx >= 0) & ~np.isfinite(out)
            if bad.any():
                raise DomainSingularityError(f"{self.name} is singular at {z[bad][0]}")
        return complex(out[0]) if scalar else out

    # -- text form ------------------------------------------------------------
    def source(self) -> str:
        lines = [f"name: {self.name}"]
        lines += [f"param {k} = {v!r}" for k, v in self.params]
        lines.append(f"domain: {self.domain.source()}")
        if self.reflect:
            lines.append("reflect: x-axis")
        lines += [p.source() for p in self.pieces]
        return "\n".join(lines) + "\n"


_PARAM_RE = re.compile(r"param\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*$")
_DOMAIN_RE = re.compile(r"(plane|disk|halfplane|polygon)\s*(?:\((.*)\))?\s*$")


def parse_map(source: str) -> PiecewiseMap:
    """Parse map text; errors carry the line and column of the offending token."""
    name = "unnamed"
    params: Dict[str, float] = {}
    domain: Domain = Plane()
    reflect = False
    pieces = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = raw.split("#", 1)[0].rstrip()
        stripped = text.lstrip()
        if not stripped:
            continue
        col0 = len(text) - len(stripped) + 1
        key, sep, rest = stripped.partition(":")
        key = key.strip()
        if re.match(r"param\s", stripped):
            m = _PARAM_RE.match(stripped)
            if not m:
                raise DslSyntaxError("malformed param line", lineno, col0, stripped)
            pname, value = m.groups()
            if pname in RESERVED:
                raise DslSyntaxError(f"{pname!r} is reserved", lineno, col0 + 6, pname)
            if pname in params:
                raise DslSyntaxError(f"parameter {pname!r} declared twice", lineno, col0 + 6, pname)
            try:
                params[pname] = float(value)
            except ValueError:
                raise DslSyntaxError("parameter value must be a real literal", lineno,
                                     col0 + stripped.index(value), value) from None
            continue
        if not sep:
            raise DslSyntaxError("expected 'key: value'", lineno, col0, stripped.split()[0])
        body = rest.strip()
        body_col = col0 + len(stripped) - len(rest.lstrip())
        if key == "name":
            name = body
        elif key == "domain":
            domain = _parse_domain(body, lineno, body_col)
        elif key == "reflect":
            if body.replace(" ", "") != "x-axis":
                raise DslSyntaxError("only 'reflect: x-axis' is supported", lineno, body_col, body)
            reflect = True
        elif key == "piece":
            arrow = body.find("->")
            if arrow < 0:
                raise DslSyntaxError("piece needs 'guard -> expression'", lineno, body_col, body)
            guard = parse_guard(body[:arrow], params, lineno, body_col)
            rhs = body[arrow + 2:]
            expr = parse_expression(rhs, params, lineno, body_col + arrow + 2)
            pieces.append(Piece(guard, expr))
        else:
            raise DslSyntaxError(f"unknown header {key!r}", lineno, col0, key)
    if not pieces:
        raise DslSyntaxError("map has no pieces")
    if reflect and not isinstance(domain, Plane):
        raise DslSyntaxError("reflection requires the whole plane as domain")
    return PiecewiseMap(name, tuple(params.items()), tuple(pieces), domain, reflect)


def _parse_domain(body: str, line: int, col: int) -> Domain:
    m = _DOMAIN_RE.match(body)
    if not m:
        raise DslSyntaxError("unknown domain", line, col, body)
    kind, args = m.groups()
    if kind == "plane":
        if args:
            raise DslSyntaxError("plane takes no arguments", line, col, body)
        return Plane()
    if args is None:
        raise DslSyntaxError(f"{kind} needs arguments", line, col, body)
    argcol = col + body.index("(") + 1
    try:
        if kind == "disk":
            c, r = args.split(",")
            radius = parse_constant(r, line, argcol)
            return Disk(parse_constant(c, line, argcol), float(radius.real))
        if kind == "halfplane":
            return HalfPlane(parse_constant(args, line, argcol))
        return Polygon(tuple(parse_constant(v, line, argcol) for v in args.split(";")))
    except ValueError as exc:
        raise DslSyntaxError(str(exc), line, col, body) from None


def single_piece(name: str, formula: str, params: Optional[Mapping[str, float]] = None,
                 domain: Optional[Domain] = None) -> PiecewiseMap:
    """Convenience constructor for a map given by one formula everywhere."""
    params = dict(params or {})
    expr = parse_expression(formula, params)
    return PiecewiseMap(name, tuple(params.items()), (Piece(TRUE, expr),), domain or Plane())
