"""Potentials of rotated gradient fields and the three-variable gradient example."""

from .example3d import (
    Hessian3DReport,
    ScalarField3,
    det_u_closed_form,
    grad_example_3d,
    gradient_closed_form,
    hessian_example_3d,
    hessian_from_wirtinger,
    wirtinger_second_derivatives,
)
from .reconstruct import (
    DichotomyReport,
    Potential,
    TaylorGauge,
    dichotomy_scan,
    reconstruct_potential,
    rectangle_residual,
    taylor_gauge_test,
)

__all__ = [
    "DichotomyReport", "Hessian3DReport", "Potential", "ScalarField3", "TaylorGauge",
    "det_u_closed_form", "dichotomy_scan", "grad_example_3d", "gradient_closed_form",
    "hessian_example_3d", "hessian_from_wirtinger", "reconstruct_potential",
    "rectangle_residual", "taylor_gauge_test", "wirtinger_second_derivatives",
]
