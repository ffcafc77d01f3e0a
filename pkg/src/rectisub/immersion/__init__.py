"""Immersions of chart boxes into Euclidean space."""

from __future__ import annotations

import math

from . import builtins as _b
from .builtins import (
    Circle,
    CliffordTorus,
    ConeOver,
    Cylinder,
    Graph,
    Helix,
    Line,
    Plane,
    Torus,
    UnitSphere,
    circle_base,
    clifford_base,
    conic_base,
    ellipse_base,
    great_circle_curve,
    small_circle_base,
    small_circle_curve,
    sphere_patch_base,
    tilted_circle_base,
)
from .construct import (
    RectifyingCurve,
    RectifyingImmersion,
    YFactor,
    construct_rectifying,
    construct_rectifying_curve,
)
from .core import (
    BaseMetricFactor,
    Immersion,
    RegularityError,
    ScaledImmersion,
    SpecImmersion,
    SphericalFactor,
    from_spec,
    sample_points,
)


class BuiltinError(ValueError):
    """Unknown builtin name or invalid family parameters."""


def _rectifying(c=1.0, base="circle", m=None, n=None, theta=math.pi / 4, a=1.0, b=0.5, d=1.0, t0=0.3, t1=1.2):
    if base == "circle":
        fibre = circle_base(int(m) - 1 if m is not None else 2)
    elif base == "small_circle":
        fibre = small_circle_base(float(theta), int(m) - 1 if m is not None else 3)
    elif base == "ellipse":
        fibre = ellipse_base(float(a), float(b), float(d), int(m) - 1 if m is not None else 3)
    elif base == "clifford":
        fibre = clifford_base(int(m) - 1 if m is not None else 4)
    elif base == "sphere":
        fibre = sphere_patch_base(int(m) - 1 if m is not None else 3)
    else:
        raise BuiltinError(f"unknown base {base!r}; expected circle, small_circle, ellipse, clifford or sphere")
    if n is not None and fibre.chart_dim != int(n) - 1:
        raise BuiltinError(f"base {base!r} gives n={fibre.chart_dim + 1}, not n={n}")
    return construct_rectifying(float(c), fibre, (float(t0), float(t1)))


def _rectifying_curve(c=1.0, base="small_circle", theta=math.pi / 4, t0=0.3, t1=1.2):
    if base == "small_circle":
        y = small_circle_curve(float(theta))
    elif base == "great_circle":
        y = great_circle_curve()
    else:
        raise BuiltinError(f"unknown curve base {base!r}; expected small_circle or great_circle")
    return construct_rectifying_curve(float(c), y, (float(t0), float(t1)))


BUILTINS = {
    "helix": lambda a=3.0, b=4.0: Helix(float(a), float(b)),
    "unit_sphere": lambda n=2, m=None: UnitSphere(int(n), None if m is None else int(m)),
    "sphere": lambda n=2, m=None: UnitSphere(int(n), None if m is None else int(m)),
    "cone": lambda: ConeOver(tilted_circle_base()),
    "cylinder": lambda r=2.0: Cylinder(float(r)),
    "torus": lambda R=2.0, r=1.0: Torus(float(R), float(r)),
    "clifford_torus": lambda: CliffordTorus(),
    "plane": lambda: Plane(),
    "graph": lambda f="s^2 - u2^2": Graph(str(f)),
    "saddle": lambda: Graph("s^2 - u2^2"),
    "circle": lambda r=2.0: Circle(float(r)),
    "line": lambda: Line(),
    "rectifying": _rectifying,
    "rectifying_curve": _rectifying_curve,
}


def _split_params(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _value(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def builtin(name: str, **params) -> Immersion:
    """Instantiate a named reference immersion."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise BuiltinError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}") from None
    try:
        imm = factory(**params)
    except TypeError as exc:
        raise BuiltinError(f"bad parameters for {name!r}: {exc}") from None
    except BuiltinError:
        raise
    except ValueError as exc:
        raise BuiltinError(f"{name}: {exc}") from None
    return imm


def parse_builtin(text: str) -> Immersion:
    """``NAME[:k=v,...]`` as accepted on the command line."""
    name, _, rest = text.partition(":")
    params = {}
    for item in _split_params(rest):
        key, eq, val = item.partition("=")
        if not eq:
            raise BuiltinError(f"expected key=value, got {item!r}")
        params[key.strip()] = _value(val.strip())
    return builtin(name.strip(), **params)


__all__ = [name for name in dir() if not name.startswith("_")]
