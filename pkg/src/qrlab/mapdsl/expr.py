"""Expression trees for complex-valued formulas in ``z`` and ``conj(z)``.

Nodes are frozen dataclasses. Evaluation is vectorized over numpy arrays of
complex128 points; parameters are looked up in a ``{name: float}`` mapping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

FUNCTIONS = ("re", "im", "abs", "conj", "sqrt", "exp")


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    """The independent variable ``z``."""


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True, eq=True)
class Param(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    """Integer power; ``exponent`` is an int or the name of an integral parameter."""

    base: Expr
    exponent: Union[int, str]
    negate: bool = False  # only used with a parameter exponent: z ^ -n


@dataclass(frozen=True, eq=True)
class Call(Expr):
    fn: str
    arg: Expr


Z = Var()


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return Const(complex(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def conj(e) -> Expr:
    return Call("conj", as_expr(e))


def power_exponent(node: Pow, params: Mapping[str, float]) -> int:
    if isinstance(node.exponent, int):
        return node.exponent
    value = params[node.exponent]
    n = int(round(value))
    if n != value:
        raise ValueError(f"parameter {node.exponent}={value} used as an exponent is not an integer")
    return -n if node.negate else n


# -- traversal helpers ---------------------------------------------------------

def children(e: Expr):
    if isinstance(e, (Neg, Call)):
        return (e.arg,)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


def parameters_used(e: Expr) -> set:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Param):
            out.add(node.name)
        elif isinstance(node, Pow) and isinstance(node.exponent, str):
            out.add(node.exponent)
        stack.extend(children(node))
    return out


def is_real_valued(e: Expr) -> bool:
    """Static check that ``e`` evaluates to a real number for real parameters."""
    if isinstance(e, Var):
        return False
    if isinstance(e, Const):
        return complex(e.value).imag == 0.0
    if isinstance(e, Param):
        return True
    if isinstance(e, Call):
        if e.fn in ("re", "im", "abs"):
            return True
        return is_real_valued(e.arg)
    if isinstance(e, Neg):
        return is_real_valued(e.arg)
    if isinstance(e, Pow):
        return is_real_valued(e.base)
    return is_real_valued(e.left) and is_real_valued(e.right)


def is_holomorphic(e: Expr) -> bool:
    if isinstance(e, Call):
        return e.fn in ("sqrt", "exp") and is_holomorphic(e.arg)
    return all(is_holomorphic(c) for c in children(e))


# -- printing --------------------------------------------------------------------

def _fmt_real(x: float) -> str:
    s = repr(float(x))
    if s in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite literal {s}")
    return s


def format_const(c: complex) -> str:
    c = complex(c)
    if c.imag == 0.0:
        text = _fmt_real(c.real)
    elif c.real == 0.0 and not np.signbit(c.real):
        text = _fmt_real(c.imag) + "i"
    else:
        return f"({_fmt_real(c.real)} + {_fmt_real(c.imag)}i)"
    return f"({text})" if text.startswith("-") else text


_BINOPS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def to_source(e: Expr) -> str:
    """Fully parenthesized DSL text; parsing it rebuilds an equivalent tree."""
    if isinstance(e, Var):
        return "z"
    if isinstance(e, Const):
        return format_const(e.value)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Pow):
        if isinstance(e.exponent, int):
            exp = str(e.exponent)
        else:
            exp = ("-" if e.negate else "") + e.exponent
        return f"({to_source(e.base)}^{exp})"
    op = _BINOPS[type(e)]
    return f"({to_source(e.left)} {op} {to_source(e.right)})"


# -- numeric evaluation --------------------------------------------------------

def evaluate(e: Expr, z, params: Mapping[str, float]):
    """Evaluate ``e`` at complex array ``z``. Non-finite results are left to the caller."""
    if isinstance(e, Var):
        return z
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Param):
        return complex(params[e.name])
    if isinstance(e, Neg):
        return -evaluate(e.arg, z, params)
    if isinstance(e, Add):
        return evaluate(e.left, z, params) + evaluate(e.right, z, params)
    if isinstance(e, Sub):
        return evaluate(e.left, z, params) - evaluate(e.right, z, params)
    if isinstance(e, Mul):
        return evaluate(e.left, z, params) * evaluate(e.right, z, params)
    if isinstance(e, Div):
        return evaluate(e.left, z, params) / evaluate(e.right, z, params)
    if isinstance(e, Pow):
        return int_power(evaluate(e.base, z, params), power_exponent(e, params))
    if isinstance(e, Call):
        a = evaluate(e.arg, z, params)
        return apply_function(e.fn, a)
    raise TypeError(f"unknown node {e!r}")


def int_power(a, n: int):
    if n == 0:
        return np.ones_like(a) if isinstance(a, np.ndarray) else 1.0 + 0j
    if n < 0:
        return 1.0 / int_power(a, -n)
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def apply_function(fn: str, a):
    if fn == "re":
        return np.real(a) + 0j
    if fn == "im":
        return np.imag(a) + 0j
    if fn == "abs":
        return np.abs(a) + 0j
    if fn == "conj":
        return np.conj(a)
    if fn == "sqrt":
        return np.sqrt(a + 0j)
    if fn == "exp":
        return np.exp(a + 0j)
    raise ValueError(f"unknown function {fn}")
