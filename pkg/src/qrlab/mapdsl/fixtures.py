"""Named built-in maps, including the non-injective and gradient counterexample maps."""

from __future__ import annotations

import math
from typing import Dict, Tuple
from urllib.parse import parse_qsl

from ..errors import ParameterRangeError, UnknownFixtureError
from .maps import PiecewiseMap, parse_map

BRANCH_TEMPLATE = """\
name: branch-example
param eps = {eps!r}
param delta = {delta!r}
domain: plane
reflect: x-axis
piece: abs(z) <= 0 -> 0
piece: re(z) >= -delta*im(z) -> 2*z^2/(abs(z)*sqrt(1 + delta^2))
piece: re(z) <= -delta*im(z) -> (i - eps)*z - i*conj(z)
"""

NONINJ_TEMPLATE = """\
name: noninj-example
param M = {M!r}
domain: halfplane(1)
piece: 0 < re(z) <= 2*M*im(z) -> (4*M^2 + 4*M*i)*z + (4*M^2 + 1)*conj(z)
piece: 0 < re(z) <= -2*M*im(z) -> (4*M^2 - 4*M*i)*z + (4*M^2 + 1)*conj(z)
piece: re(z) >= 2*M*abs(im(z)) -> (8*M^2 - 1)*z
"""

GRAD2D_SOURCE = """\
name: grad-example-2d
domain: plane
piece: abs(z) <= 0 -> 0
piece: true -> re(z^4)/abs(z)^2
"""


def branch_delta(eps: float) -> float:
    """Auxiliary angle parameter with ``eps = 4 delta / (1 + delta^2)``."""
    return eps / (2.0 + math.sqrt(4.0 - eps * eps))


def identity() -> PiecewiseMap:
    return parse_map("name: identity\npiece: true -> z\n")


def scale_rotate(c: complex) -> PiecewiseMap:
    c = complex(c)
    return parse_map(f"name: scale-rotate\nparam cr = {c.real!r}\nparam ci = {c.imag!r}\n"
                     "piece: true -> (cr + ci*i)*z\n")


def power(n: int) -> PiecewiseMap:
    return parse_map(f"name: power\nparam n = {int(n)}\npiece: true -> z^n\n")


def conj_power(n: int) -> PiecewiseMap:
    return parse_map(f"name: conj-power\nparam n = {int(n)}\npiece: true -> conj(z)^n\n")


def rotate_i() -> PiecewiseMap:
    return parse_map("name: rotate-i\npiece: true -> i*z\n")


def branch_example(eps: float = 1.0) -> PiecewiseMap:
    eps = float(eps)
    if not 0 < eps <= 2:
        raise ParameterRangeError(f"branch-example needs 0 < eps <= 2, got {eps}")
    return parse_map(BRANCH_TEMPLATE.format(eps=eps, delta=branch_delta(eps)))


def noninj_example(M: float = 1.0) -> PiecewiseMap:
    M = float(M)
    if not M >= 1:
        raise ParameterRangeError(f"noninj-example needs M >= 1, got {M}")
    return parse_map(NONINJ_TEMPLATE.format(M=M))


def grad_example_2d() -> PiecewiseMap:
    """The planar potential ``u = Re(z^4)/|z|^2`` (real-valued)."""
    return parse_map(GRAD2D_SOURCE)


def grad_example_2d_field() -> PiecewiseMap:
    """Gradient field ``u_x + i u_y = 2 u_zbar`` of :func:`grad_example_2d`."""
    from ..wirtinger import gradient_field

    return gradient_field(grad_example_2d())


def grad_example_3d():
    from ..potential import grad_example_3d as build

    return build()


_REGISTRY = {
    "identity": (identity, {}),
    "scale-rotate": (scale_rotate, {"c": complex}),
    "power": (power, {"n": int}),
    "conj-power": (conj_power, {"n": int}),
    "rotate-i": (rotate_i, {}),
    "branch-example": (branch_example, {"eps": float}),
    "noninj-example": (noninj_example, {"M": float}),
    "grad-example-2d": (grad_example_2d, {}),
    "grad-example-2d-field": (grad_example_2d_field, {}),
    "grad-example-3d": (grad_example_3d, {}),
}

ALIASES = {
    "branch": "branch-example",
    "noninj": "noninj-example",
    "grad2d": "grad-example-2d",
    "grad2d-field": "grad-example-2d-field",
    "grad3d": "grad-example-3d",
    "conj": "conj-power",
    "iz": "rotate-i",
}

FIXTURE_IDS = tuple(_REGISTRY)


def fixture(name: str, **params):
    """Build a fixture by id, e.g. ``fixture("noninj-example", M=2)``."""
    key = ALIASES.get(name, name)
    if key not in _REGISTRY:
        raise UnknownFixtureError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_IDS)}")
    build, types = _REGISTRY[key]
    unknown = set(params) - set(types)
    if unknown:
        raise UnknownFixtureError(f"fixture {key} has no parameter(s) {sorted(unknown)}")
    return build(**{k: types[k](v) for k, v in params.items()})


def parse_fixture_spec(spec: str) -> Tuple[str, Dict[str, str]]:
    """Split ``"branch?eps=2"`` (with optional ``fixture:`` prefix) into name and raw params."""
    if spec.startswith("fixture:"):
        spec = spec[len("fixture:"):]
    name, _, query = spec.partition("?")
    return name, dict(parse_qsl(query.replace(",", "&"), keep_blank_values=False))


def fixture_from_spec(spec: str):
    name, raw = parse_fixture_spec(spec)
    key = ALIASES.get(name, name)
    types = _REGISTRY.get(key, (None, {}))[1]
    params = {}
    for k, v in raw.items():
        conv = types.get(k, float)
        params[k] = complex(v.replace("i", "j")) if conv is complex else conv(float(v)) if conv is int else conv(v)
    return fixture(name, **params)
