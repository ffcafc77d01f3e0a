"""Explicit rectifying submanifolds ``x = sqrt(s^2 + c^2) Y``.

The spherical factor is the suspension ``Y(t, u) = cos t e0 + sin t Z(u)``
with ``t = atan(s / c)``; its metric is ``dt^2 + sin^2 t g_F``, which in the
chart variable s is ``c^2/(s^2+c^2)^2 ds^2 + s^2/(s^2+c^2) g_F``.
"""

from __future__ import annotations

import math

import numpy as np

from .. import jets
from ..exprdsl import Binary, Call, ImmersionSpec, Name, Num, default_variables, substitute
from ..exprdsl.nodes import Expr
from ..exprdsl.parser import BUILTIN_CONSTANTS
from .core import BaseMetricFactor, Immersion, SpecImmersion, SphericalFactor, sample_points

DEFAULT_T_RANGE = (0.3, 1.2)
UNIT_SPEED_TOL = 1e-8


def _check_c(c) -> float:
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise ValueError("c must be positive")
    return c


def _check_t_range(t_range) -> tuple[float, float]:
    t0, t1 = (float(v) for v in t_range)
    if not 0.0 < t0 < t1 < math.pi / 2:
        raise ValueError(f"t_range must lie strictly inside (0, pi/2), got {t_range!r}")
    return t0, t1


def _inline_constants(spec: ImmersionSpec, node: Expr) -> Expr:
    consts = dict(BUILTIN_CONSTANTS, **spec.constants)
    return substitute(node, {k: Num(v) for k, v in consts.items()})


def _radial_factor(c: float) -> Expr:
    # sqrt(s^2 + c^2)
    return Call("sqrt", (Binary("+", Binary("^", Name("s"), Num(2.0)), Num(c * c)),))


def _angle(c: float) -> Expr:
    return Call("atan", (Binary("/", Name("s"), Num(c)),))


class RectifyingImmersion(Immersion):
    def __init__(self, c: float, base: BaseMetricFactor, t_range=DEFAULT_T_RANGE, label: str | None = None):
        self.c = _check_c(c)
        self.t_range = _check_t_range(t_range)
        if not isinstance(base, BaseMetricFactor):
            base = BaseMetricFactor(base)
        self.base = base
        n = base.chart_dim + 1
        s_range = (self.c * math.tan(self.t_range[0]), self.c * math.tan(self.t_range[1]))
        self._init(
            n,
            base.ambient_dim + 1,
            (s_range,) + base.domain,
            label or f"rectifying(c={self.c:g}, base={base.label})",
            default_variables(n),
        )
        self.arclength_chart = True

    def y_factor(self) -> "YFactor":
        return YFactor(self)

    def evaluate_jets(self, coords):
        s, u = coords[0], coords[1:]
        t = jets.atan(s / self.c)
        radius = jets.sqrt(s * s + self.c * self.c)
        z = self.base.evaluate_jets(u)
        st = jets.sin(t)
        return [radius * jets.cos(t)] + [radius * (st * zk) for zk in z]

    def to_spec(self) -> ImmersionSpec:
        """Closed-form ``.imm`` description reproducing this immersion."""
        inner = self.base.inner
        while not isinstance(inner, SpecImmersion):
            inner = getattr(inner, "inner", None)
            if inner is None:
                raise TypeError("base factor is not described by an expression")
        spec = inner.spec
        rename = {v: Name(w) for v, w in zip(spec.variables, self.variables[1:])}
        radius = _radial_factor(self.c)
        t = _angle(self.c)
        comps = [Binary("*", radius, Call("cos", (t,)))]
        for z in spec.components:
            z = substitute(_inline_constants(spec, z), rename)
            comps.append(Binary("*", radius, Binary("*", Call("sin", (t,)), z)))
        return ImmersionSpec(
            chart_dim=self.chart_dim,
            ambient_dim=self.ambient_dim,
            variables=self.variables,
            components=tuple(comps),
            constants={},
            domain=self.domain,
        )


class YFactor(Immersion):
    """The spherical factor ``Y = x / sqrt(s^2 + c^2)`` in the chart (s, u)."""

    def __init__(self, rect: RectifyingImmersion):
        self._init(rect.chart_dim, rect.ambient_dim, rect.domain, f"Y[{rect.label}]", rect.variables)
        self.rect = rect

    def evaluate_jets(self, coords):
        s, u = coords[0], coords[1:]
        t = jets.atan(s / self.rect.c)
        st = jets.sin(t)
        return [jets.cos(t)] + [st * zk for zk in self.rect.base.evaluate_jets(u)]


class RectifyingCurve(Immersion):
    def __init__(self, c: float, curve: Immersion, t_range=DEFAULT_T_RANGE, label: str | None = None):
        self.c = _check_c(c)
        self.t_range = _check_t_range(t_range)
        if curve.chart_dim != 1:
            raise ValueError("spherical curve must be one-dimensional")
        if not isinstance(curve, SphericalFactor):
            curve = SphericalFactor(curve, tol=UNIT_SPEED_TOL)
        for (t,) in sample_points(curve, 9):
            speed = float(np.linalg.norm(curve.jacobian((t,))[0]))
            if abs(speed - 1.0) > UNIT_SPEED_TOL:
                raise ValueError(f"{curve.label} is not unit-speed: |y'| = {speed!r} at t={t!r}")
        self.curve = curve
        s_range = (self.c * math.tan(self.t_range[0]), self.c * math.tan(self.t_range[1]))
        self._init(1, curve.ambient_dim, (s_range,), label or f"rectifying_curve(c={self.c:g}, base={curve.label})")
        self.arclength_chart = True

    def evaluate_jets(self, coords):
        (s,) = coords
        t = jets.atan(s / self.c)
        radius = jets.sqrt(s * s + self.c * self.c)
        return [radius * y for y in self.curve.evaluate_jets([t])]

    def to_spec(self) -> ImmersionSpec:
        inner = self.curve.inner
        if not isinstance(inner, SpecImmersion):
            raise TypeError("curve is not described by an expression")
        spec = inner.spec
        t = _angle(self.c)
        radius = _radial_factor(self.c)
        comps = tuple(
            Binary("*", radius, substitute(_inline_constants(spec, y), {spec.variables[0]: t}))
            for y in spec.components
        )
        return ImmersionSpec(1, self.ambient_dim, ("s",), comps, {}, self.domain)


def construct_rectifying(c: float, base: Immersion, t_range=DEFAULT_T_RANGE, ambient_dim: int | None = None) -> RectifyingImmersion:
    """Proper rectifying submanifold over a fibre ``base`` in the unit sphere of E^(m-1)."""
    if ambient_dim is not None and ambient_dim != base.ambient_dim + 1:
        raise ValueError(f"base lives in E^{base.ambient_dim}, so the ambient dimension is {base.ambient_dim + 1}, not {ambient_dim}")
    return RectifyingImmersion(c, base, t_range)


def construct_rectifying_curve(c: float, spherical_curve: Immersion, t_range=DEFAULT_T_RANGE) -> RectifyingCurve:
    """Curve ``sqrt(s^2 + c^2) y(atan(s/c))`` for a unit-speed spherical curve y."""
    return RectifyingCurve(c, spherical_curve, t_range)
