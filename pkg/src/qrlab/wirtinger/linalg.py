"""Real 2x2 matrices, the trace inner product, half-spaces and the inclusion set U(K, N)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class RealMatrix2:
    """``[[a11, a12], [a21, a22]]``; entries may be scalars or equally shaped arrays."""

    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def identity(cls) -> "RealMatrix2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_rows(cls, rows) -> "RealMatrix2":
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def frobenius2(self):
        return self.a11 ** 2 + self.a12 ** 2 + self.a21 ** 2 + self.a22 ** 2

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    def is_zero(self) -> bool:
        return bool(np.all(np.asarray(self.frobenius2) == 0))


def jet_to_matrix(fz, fzbar) -> RealMatrix2:
    """Differential ``[[u_x, u_y], [v_x, v_y]]`` of ``f = u + iv`` from its Wirtinger pair."""
    s = fz + fzbar
    d = fz - fzbar
    return RealMatrix2(np.real(s), -np.imag(d), np.imag(s), np.real(d))


def matrix_to_jet(m: RealMatrix2):
    fz = ((m.a11 + m.a22) + 1j * (m.a21 - m.a12)) / 2
    fzbar = ((m.a11 - m.a22) + 1j * (m.a21 + m.a12)) / 2
    return fz, fzbar


def inner(x: RealMatrix2, y: RealMatrix2):
    """``Tr(X Y^T)``, the sum of entrywise products."""
    return x.a11 * y.a11 + x.a12 * y.a12 + x.a21 * y.a21 + x.a22 * y.a22


class HalfSpaceKind(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    SINGULAR = "singular"


def classify_halfspace(n: RealMatrix2, tol: float = SINGULAR_TOL) -> HalfSpaceKind:
    """Type of the hyperplane orthogonal to ``n``, by the sign of ``det n``."""
    if n.is_zero():
        raise ValueError("the zero matrix does not define a hyperplane")
    det = float(n.det)
    if abs(det) <= tol * max(1.0, float(n.frobenius2)):
        return HalfSpaceKind.SINGULAR
    return HalfSpaceKind.POSITIVE if det > 0 else HalfSpaceKind.NEGATIVE


@dataclass(frozen=True)
class InclusionSpec:
    """``U(K, N) = {X : |X|^2 <= K det X, <X, N> >= 0}`` with the Frobenius norm."""

    K: float
    N: RealMatrix2

    def __post_init__(self):
        if not self.K >= 1:
            raise ValueError("K must be at least 1")
        if not float(self.N.det) > 0:
            raise ValueError("N must have positive determinant")


@dataclass(frozen=True)
class InclusionResult:
    inside: bool
    distortion_margin: float  # K det X - |X|^2
    halfspace_margin: float  # <X, N>


def in_inclusion(x: RealMatrix2, spec: InclusionSpec, tol: float = 0.0):
    margin_k = spec.K * x.det - x.frobenius2
    margin_n = inner(x, spec.N)
    inside = (margin_k >= -tol) & (margin_n >= -tol)
    if np.ndim(inside) == 0:
        return InclusionResult(bool(inside), float(margin_k), float(margin_n))
    return InclusionResult(inside, margin_k, margin_n)


def frobenius_constant(K: float) -> float:
    """Inclusion constant matching distortion quotient ``K``: ``|Df|^2 <= (K + 1/K) det Df``."""
    return K + 1.0 / K


def linear_map_source(n: RealMatrix2) -> str:
    """Formula ``a z + b conj(z)`` of the R-linear map with differential ``n``."""
    a, b = matrix_to_jet(n)
    from ..mapdsl.expr import format_const

    return f"{format_const(complex(a))}*z + {format_const(complex(b))}*conj(z)"
