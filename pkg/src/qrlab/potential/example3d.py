"""The gradient map in three variables built from ``u = Re(z^4)/|z|^2``.

``psi(x1, x2, x3) = u(x1, x2) - x3^2/2`` is homogeneous of degree 2 and its
Hessian determinant stays at least 16 away from the line ``x1 = x2 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


def _split(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValueError("points must have three coordinates")
    return x[..., 0], x[..., 1], x[..., 2]


def _check_line(x1, x2):
    if np.any((x1 == 0) & (x2 == 0)):
        raise DomainError("sample point on the singular line x1 = x2 = 0")


@dataclass(frozen=True)
class ScalarField3:
    """``psi = (x^4 - 6 x^2 y^2 + y^4)/(x^2 + y^2) - x3^2/2`` with analytic derivatives."""

    name: str = "grad-example-3d"

    def value(self, x):
        a, b, c = _split(x)
        _check_line(a, b)
        return (a ** 4 - 6 * a * a * b * b + b ** 4) / (a * a + b * b) - 0.5 * c * c

    __call__ = value

    def gradient(self, x):
        a, b, c = _split(x)
        _check_line(a, b)
        N = a ** 4 - 6 * a * a * b * b + b ** 4
        D = a * a + b * b
        Nx, Ny = 4 * a ** 3 - 12 * a * b * b, 4 * b ** 3 - 12 * a * a * b
        return np.stack([(Nx * D - 2 * a * N) / D ** 2, (Ny * D - 2 * b * N) / D ** 2, -c], axis=-1)

    def hessian(self, x):
        """Quotient-rule Hessian of ``N/D`` in the plane, ``-1`` in the third slot."""
        a, b, c = _split(x)
        _check_line(a, b)
        N = a ** 4 - 6 * a * a * b * b + b ** 4
        D = a * a + b * b
        dN = (4 * a ** 3 - 12 * a * b * b, 4 * b ** 3 - 12 * a * a * b)
        ddN = ((12 * a * a - 12 * b * b, -24 * a * b), (-24 * a * b, 12 * b * b - 12 * a * a))
        dD = (2 * a, 2 * b)
        ddD = ((2.0, 0.0), (0.0, 2.0))
        H = np.zeros(np.shape(a) + (3, 3))
        for i in range(2):
            for j in range(2):
                H[..., i, j] = (ddN[i][j] / D - (dN[i] * dD[j] + dN[j] * dD[i]) / D ** 2
                                - N * ddD[i][j] / D ** 2 + 2 * N * dD[i] * dD[j] / D ** 3)
        H[..., 2, 2] = -1.0
        return H


def grad_example_3d() -> ScalarField3:
    return ScalarField3()


def wirtinger_second_derivatives(z):
    """``(u_{z zbar}, u_{zbar zbar})`` of ``u = Re(z^4)/|z|^2`` in closed form."""
    z = np.asarray(z, dtype=complex)
    zeta = z / np.conj(z)
    return -3 * np.real(zeta ** 2), zeta ** 3 + 3 * np.conj(zeta)


def hessian_from_wirtinger(z):
    """Planar Hessian from ``u_xx = 2u_{z zbar} + 2Re u_{zbar zbar}`` and its companions."""
    m, w = wirtinger_second_derivatives(z)
    H = np.empty(np.shape(z) + (2, 2))
    H[..., 0, 0] = 2 * m + 2 * w.real
    H[..., 1, 1] = 2 * m - 2 * w.real
    H[..., 0, 1] = H[..., 1, 0] = 2 * w.imag
    return H


def det_u_closed_form(z):
    """``det D^2 u = -22 - 6 Re(z^4 / zbar^4)``."""
    z = np.asarray(z, dtype=complex)
    return -22.0 - 6.0 * np.real((z / np.conj(z)) ** 4)


def gradient_closed_form(z):
    """``2 u_zbar = (zbar^3/|z|^2)(3 - z^4/zbar^4)``, the planar gradient ``u_x + i u_y``."""
    z = np.asarray(z, dtype=complex)
    zb = np.conj(z)
    return zb ** 3 / np.abs(z) ** 2 * (3 - z ** 4 / zb ** 4)


@dataclass
class Hessian3DReport:
    points: np.ndarray
    hessian: np.ndarray
    det_psi: np.ndarray
    det_u: np.ndarray
    det_u_formula: np.ndarray
    quotient: np.ndarray

    @property
    def formula_residual(self) -> float:
        return float(np.max(np.abs(self.det_u - self.det_u_formula)))

    @property
    def sign_residual(self) -> float:
        return float(np.max(np.abs(self.det_psi + self.det_u)))

    @property
    def max_entry(self) -> float:
        return float(np.max(np.abs(self.hessian)))

    def summary(self) -> dict:
        return {
            "points": int(len(self.points)),
            "formula_residual": self.formula_residual,
            "sign_residual": self.sign_residual,
            "det_psi_min": float(self.det_psi.min()),
            "det_u_min": float(self.det_u.min()),
            "det_u_max": float(self.det_u.max()),
            "max_hessian_entry": self.max_entry,
            "max_quotient": float(self.quotient.max()),
        }


def hessian_example_3d(points) -> Hessian3DReport:
    """Per-point Hessian data of :class:`ScalarField3`; points are ``(N, 3)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    psi = ScalarField3()
    H = psi.hessian(pts)
    z = pts[:, 0] + 1j * pts[:, 1]
    det_psi = np.linalg.det(H)
    det_u = np.linalg.det(H[:, :2, :2])
    opnorm = np.linalg.norm(H, ord=2, axis=(1, 2))
    return Hessian3DReport(pts, H, det_psi, det_u, det_u_closed_form(z), opnorm ** 3 / det_psi)
