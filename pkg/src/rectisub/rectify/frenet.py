"""Frenet frames of space curves from order-3 jets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .. import jets

KAPPA_MIN = 1e-10


class FrenetUndefined(ArithmeticError):
    def __init__(self, point, kappa: float):
        super().__init__(f"Frenet frame undefined at s={point[0]!r}: curvature {kappa:.3e}")
        self.point = point
        self.kappa = kappa

    def __reduce__(self):
        return type(self), (self.point, self.kappa)


@dataclass
class FrenetApparatus:
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: float
    tau: float
    speed: float


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _check_curve(curve):
    if curve.chart_dim != 1:
        raise ValueError(f"Frenet apparatus needs a curve, got chart dimension {curve.chart_dim}")


def _tangent_and_curvature(curve, p):
    """Jets (order 1) of speed, unit tangent and the arclength curvature vector."""
    js = curve.evaluate(tuple(p), 3)
    d1 = [c.partial(0) for c in js]
    d2 = [c.partial(0) for c in d1]
    d1 = [c.truncate(1) for c in d1]
    speed = jets.sqrt(jets.dot(d1, d1))
    t = [c / speed for c in d1]
    along = jets.dot(d2, t)
    inv2 = jets.reciprocal(speed * speed)
    kvec = [(a - along * b) * inv2 for a, b in zip(d2, t)]
    return js, speed, t, kvec


def curve_curvature(curve, p) -> float:
    """Curvature at p; never raises on straight pieces."""
    _check_curve(curve)
    _, _, _, kvec = _tangent_and_curvature(curve, p)
    return float(np.linalg.norm([c.value for c in kvec]))


def frenet(curve, p) -> FrenetApparatus:
    _check_curve(curve)
    if curve.ambient_dim != 3:
        raise ValueError(f"full Frenet apparatus needs E^3, got E^{curve.ambient_dim}")
    js, speed, t, kvec = _tangent_and_curvature(curve, p)
    k0 = float(np.linalg.norm([c.value for c in kvec]))
    if not k0 > KAPPA_MIN:
        raise FrenetUndefined(tuple(p), k0)
    kappa = jets.sqrt(jets.dot(kvec, kvec))
    n = [c / kappa for c in kvec]
    b = _cross(t, n)
    db = np.array([c.coeffs[1] for c in b])
    nv = np.array([c.value for c in n])
    tau = -float(db @ nv) / speed.value + 0.0  # no negative zero
    return FrenetApparatus(
        t=np.array([c.value for c in t]),
        n=nv,
        b=np.array([c.value for c in b]),
        kappa=kappa.value,
        tau=tau,
        speed=speed.value,
    )


class CurveResidual(NamedTuple):
    residual: float
    lam: float
    mu: float


def rectifying_curve_residual(curve, p) -> CurveResidual:
    """|<x, n>| / (1 + |x|) together with the rectifying-plane coefficients <x,t>, <x,b>."""
    fa = frenet(curve, p)
    x = np.array(curve.position(tuple(p)))
    return CurveResidual(
        residual=float(abs(x @ fa.n) / (1.0 + np.linalg.norm(x))),
        lam=float(x @ fa.t),
        mu=float(x @ fa.b),
    )
