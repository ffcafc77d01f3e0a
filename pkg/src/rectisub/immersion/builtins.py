"""Analytic reference immersions.

Parametrizations (chart variables are ``s, u2, ..., un``):

* ``helix(a, b)``: ``(a cos s, a sin s, b s)``, s in [0, 2pi]
* ``unit_sphere(n, m)``: ``S^n(th1..thn) = (sin th1 * S^(n-1)(th2..), cos th1)``
  with ``S^1(th) = (cos th, sin th)``, padded with zeros to length m;
  polar angles in [0.3, pi-0.3], the last angle in [0, 2pi]
* ``cone_over(Z)``: ``s * Z(u)`` for Z on the unit sphere, s in [0.5, 2]
* ``cylinder(r)``: ``(r cos s, r sin s, u2)``
* ``torus(R, r)``: ``((R + r cos u2) cos s, (R + r cos u2) sin s, r sin u2)``
* ``clifford_torus``: ``(cos s, sin s, cos u2, sin u2) / sqrt 2`` in E^4
* ``plane``: ``(s, u2, 0)``
* ``graph(f)``: ``(s, u2, f(s, u2))``, f a DSL expression (default ``s^2 - u2^2``)
* ``circle(r)``: ``(r cos s, r sin s, 0)``; ``line``: ``(1 + s, 2 s, 3 - s)``
"""

from __future__ import annotations

import math

from .. import jets
from ..exprdsl import parse_expression, parse_immersion
from ..exprdsl.evaluate import evaluate
from ..exprdsl.parser import BUILTIN_CONSTANTS
from .core import BaseMetricFactor, Immersion, SpecImmersion, SphericalFactor

TWO_PI = 2.0 * math.pi


class Helix(Immersion):
    def __init__(self, a: float = 3.0, b: float = 4.0, domain=((0.0, TWO_PI),)):
        if not a > 0:
            raise ValueError("helix radius a must be positive")
        self._init(1, 3, domain, f"helix(a={a:g}, b={b:g})")
        self.a, self.b = float(a), float(b)

    def evaluate_jets(self, coords):
        (s,) = coords
        return [self.a * jets.cos(s), self.a * jets.sin(s), self.b * s]


class UnitSphere(Immersion):
    def __init__(self, n: int = 2, m: int | None = None):
        m = n + 1 if m is None else m
        if n < 1 or m < n + 1:
            raise ValueError(f"unit_sphere needs n >= 1 and m >= n + 1, got n={n}, m={m}")
        domain = [(0.3, math.pi - 0.3)] * (n - 1) + [(0.0, TWO_PI)]
        self._init(n, m, domain, f"unit_sphere(n={n}, m={m})")

    def evaluate_jets(self, coords):
        def sphere(angles):
            if len(angles) == 1:
                return [jets.cos(angles[0]), jets.sin(angles[0])]
            head = jets.sin(angles[0])
            return [head * y for y in sphere(angles[1:])] + [jets.cos(angles[0])]

        out = sphere(list(coords))
        zero = out[0] * 0.0
        return out + [zero] * (self.ambient_dim - len(out))


class ConeOver(Immersion):
    def __init__(self, base: Immersion, s_range=(0.5, 2.0)):
        base = base if isinstance(base, SphericalFactor) else SphericalFactor(base)
        if s_range[0] <= 0:
            raise ValueError("cone parameter range must be positive")
        self._init(base.chart_dim + 1, base.ambient_dim, (s_range,) + base.domain, f"cone_over({base.label})")
        self.base = base

    def evaluate_jets(self, coords):
        s = coords[0]
        return [s * z for z in self.base.evaluate_jets(coords[1:])]


class Cylinder(Immersion):
    def __init__(self, r: float = 2.0):
        if not r > 0:
            raise ValueError("cylinder radius must be positive")
        self._init(2, 3, ((0.0, TWO_PI), (-1.0, 1.0)), f"cylinder(r={r:g})")
        self.r = float(r)

    def evaluate_jets(self, coords):
        s, u = coords
        return [self.r * jets.cos(s), self.r * jets.sin(s), u]


class Torus(Immersion):
    def __init__(self, R: float = 2.0, r: float = 1.0):
        if not (r > 0 and R > r):
            raise ValueError("torus needs R > r > 0")
        self._init(2, 3, ((0.0, TWO_PI), (0.0, TWO_PI)), f"torus(R={R:g}, r={r:g})")
        self.R, self.r = float(R), float(r)

    def evaluate_jets(self, coords):
        s, u = coords
        w = self.R + self.r * jets.cos(u)
        return [w * jets.cos(s), w * jets.sin(s), self.r * jets.sin(u)]


class CliffordTorus(Immersion):
    def __init__(self):
        self._init(2, 4, ((0.0, TWO_PI), (0.0, TWO_PI)), "clifford_torus")

    def evaluate_jets(self, coords):
        s, u = coords
        k = 1.0 / math.sqrt(2.0)
        return [k * jets.cos(s), k * jets.sin(s), k * jets.cos(u), k * jets.sin(u)]


class Plane(Immersion):
    def __init__(self, extent: float = 1.0):
        self._init(2, 3, ((-extent, extent), (-extent, extent)), "plane")

    def evaluate_jets(self, coords):
        s, u = coords
        return [s, u, s * 0.0]


class Graph(Immersion):
    def __init__(self, f: str = "s^2 - u2^2", domain=((1.0, 2.0), (-0.5, 0.5))):
        self._init(2, 3, domain, f"graph({f})")
        self.f = f
        self.expr = parse_expression(f)

    def evaluate_jets(self, coords):
        s, u = coords
        env = dict(BUILTIN_CONSTANTS, s=s, u2=u)
        z = evaluate(self.expr, env)
        return [s, u, z if isinstance(z, jets.Jet) else s * 0.0 + z]


class Circle(Immersion):
    def __init__(self, r: float = 2.0):
        if not r > 0:
            raise ValueError("circle radius must be positive")
        self._init(1, 3, ((0.0, TWO_PI),), f"circle(r={r:g})")
        self.r = float(r)

    def evaluate_jets(self, coords):
        (s,) = coords
        return [self.r * jets.cos(s), self.r * jets.sin(s), s * 0.0]


class Line(Immersion):
    def __init__(self):
        self._init(1, 3, ((-1.0, 1.0),), "line")

    def evaluate_jets(self, coords):
        (s,) = coords
        return [1.0 + s, 2.0 * s, 3.0 - s]


# spherical factors described as DSL text --------------------------------


def _spec_factor(text: str, label: str, cls=BaseMetricFactor):
    return cls(SpecImmersion(parse_immersion(text), label=label))


def _pad(components: list[str], length: int) -> str:
    if len(components) > length:
        raise ValueError(f"factor needs at least {len(components)} ambient coordinates, got {length}")
    return ", ".join(components + ["0"] * (length - len(components)))


def circle_base(dim: int = 2) -> BaseMetricFactor:
    """Great circle ``(cos u2, sin u2, 0, ...)`` in E^dim."""
    return _spec_factor(
        f"dim 1 -> {dim} vars u2\nx = [{_pad(['cos(u2)', 'sin(u2)'], dim)}]\nu2 in [0, 2 * pi]",
        "circle",
    )


def small_circle_base(theta: float = math.pi / 4, dim: int = 3) -> BaseMetricFactor:
    """Circle of latitude ``theta`` on the unit sphere of E^dim (dim >= 3)."""
    return _spec_factor(
        f"dim 1 -> {dim} vars u2\nconst th = {theta!r}\n"
        f"x = [{_pad(['sin(th) * cos(u2)', 'sin(th) * sin(u2)', 'cos(th)'], dim)}]\nu2 in [0, 2 * pi]",
        f"small_circle(theta={theta:g})",
    )


def conic_base(matrix, dim: int | None = None) -> BaseMetricFactor:
    """Radial projection of the conic ``A (cos u2, sin u2, 1)`` onto the unit sphere.

    ``matrix`` has shape (k, 3), k >= 3, with full column rank; circles and
    ellipses are the diagonal cases.
    """
    rows = [[float(v) for v in row] for row in matrix]
    dim = len(rows) if dim is None else dim
    lines = [f"dim 1 -> {dim} vars u2"]
    comps = []
    for i, (a, b, c) in enumerate(rows):
        lines.append(f"const a{i} = {a!r}; const b{i} = {b!r}; const c{i} = {c!r}")
        comps.append(f"(a{i} * cos(u2) + b{i} * sin(u2) + c{i})")
    norm = "sqrt(" + " + ".join(f"{c}^2" for c in comps) + ")"
    lines.append(f"x = [{_pad([f'{c} / {norm}' for c in comps], dim)}]")
    lines.append("u2 in [0, 2 * pi]")
    return _spec_factor("\n".join(lines), "conic")


def ellipse_base(a: float = 1.0, b: float = 0.5, d: float = 1.0, dim: int = 3) -> BaseMetricFactor:
    return conic_base([[a, 0, 0], [0, b, 0], [0, 0, d]], dim)


def clifford_base(dim: int = 4) -> BaseMetricFactor:
    """Flat Clifford torus in S^3, a 2-dimensional fibre for n = 3."""
    k = "sqrt(0.5)"
    return _spec_factor(
        f"dim 2 -> {dim} vars u2, u3\n"
        f"x = [{_pad([f'{k} * cos(u2)', f'{k} * sin(u2)', f'{k} * cos(u3)', f'{k} * sin(u3)'], dim)}]\n"
        "u2 in [0, 2 * pi]\nu3 in [0, 2 * pi]",
        "clifford",
    )


def sphere_patch_base(dim: int = 3) -> BaseMetricFactor:
    """Round 2-sphere patch, a 2-dimensional fibre for n = 3."""
    return _spec_factor(
        f"dim 2 -> {dim} vars u2, u3\n"
        f"x = [{_pad(['sin(u2) * cos(u3)', 'sin(u2) * sin(u3)', 'cos(u2)'], dim)}]\n"
        "u2 in [0.5, 2.5]\nu3 in [0, 2 * pi]",
        "sphere_patch",
    )


def great_circle_curve() -> SphericalFactor:
    """Unit-speed great circle on S^2 in the variable t."""
    return _spec_factor("dim 1 -> 3 vars t\nx = [cos(t), sin(t), 0]\nt in [0, 2 * pi]", "great_circle", SphericalFactor)


def small_circle_curve(theta: float = math.pi / 4) -> SphericalFactor:
    """Unit-speed circle of latitude ``theta`` on S^2 in the variable t."""
    return _spec_factor(
        f"dim 1 -> 3 vars t\nconst th = {theta!r}\n"
        "x = [sin(th) * cos(t / sin(th)), sin(th) * sin(t / sin(th)), cos(th)]\nt in [0, 2 * pi]",
        f"small_circle(theta={theta:g})",
        SphericalFactor,
    )


def tilted_circle_base() -> BaseMetricFactor:
    """``(cos u, sin u, 1) / sqrt 2``: the circle z = 1 pushed onto the unit sphere."""
    return _spec_factor(
        "dim 1 -> 3 vars u2\nx = [cos(u2) / sqrt(2), sin(u2) / sqrt(2), 1 / sqrt(2)]\nu2 in [0, 2 * pi]",
        "tilted_circle",
    )
