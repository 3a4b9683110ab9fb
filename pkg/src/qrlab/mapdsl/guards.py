"""Boolean region predicates selecting the active piece of a map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as E


class Guard:
    __slots__ = ()


@dataclass(frozen=True)
class _True(Guard):
    pass


TRUE = _True()


@dataclass(frozen=True)
class Compare(Guard):
    op: str
    left: E.Expr
    right: E.Expr


@dataclass(frozen=True)
class And(Guard):
    left: Guard
    right: Guard


@dataclass(frozen=True)
class Or(Guard):
    left: Guard
    right: Guard


@dataclass(frozen=True)
class Not(Guard):
    arg: Guard


_OPS = {
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
}


def evaluate_guard(g: Guard, z, params) -> np.ndarray:
    z = np.asarray(z)
    if isinstance(g, _True):
        return np.ones(z.shape, dtype=bool)
    if isinstance(g, Compare):
        lhs = np.real(E.evaluate(g.left, z, params))
        rhs = np.real(E.evaluate(g.right, z, params))
        return np.broadcast_to(_OPS[g.op](lhs, rhs), z.shape).copy()
    if isinstance(g, And):
        return evaluate_guard(g.left, z, params) & evaluate_guard(g.right, z, params)
    if isinstance(g, Or):
        return evaluate_guard(g.left, z, params) | evaluate_guard(g.right, z, params)
    if isinstance(g, Not):
        return ~evaluate_guard(g.arg, z, params)
    raise TypeError(f"unknown guard {g!r}")


def comparisons(g: Guard):
    """All comparison atoms of ``g`` in left-to-right order."""
    if isinstance(g, Compare):
        return [g]
    if isinstance(g, (And, Or)):
        return comparisons(g.left) + comparisons(g.right)
    if isinstance(g, Not):
        return comparisons(g.arg)
    return []


def guard_parameters(g: Guard) -> set:
    out = set()
    for c in comparisons(g):
        out |= E.parameters_used(c.left) | E.parameters_used(c.right)
    return out


def guard_source(g: Guard) -> str:
    if isinstance(g, _True):
        return "true"
    if isinstance(g, Compare):
        return f"{E.to_source(g.left)} {g.op} {E.to_source(g.right)}"
    if isinstance(g, And):
        return f"[{guard_source(g.left)} and {guard_source(g.right)}]"
    if isinstance(g, Or):
        return f"[{guard_source(g.left)} or {guard_source(g.right)}]"
    if isinstance(g, Not):
        return f"not {guard_source(g.arg)}"
    raise TypeError(f"unknown guard {g!r}")
