from __future__ import annotations

import numpy as np

from .. import jets
from ..exprdsl import ImmersionSpec, default_variables, eval_components
from ..exprdsl.evaluate import DomainViolation
from ..jets import Jet

REGULARITY_RATIO = 1e-10
UNIT_NORM_TOL = 1e-10


class RegularityError(ValueError):
    """The Jacobian of an immersion drops rank at a sampled point."""


class Immersion:
    """A map from a chart box in R^n into E^m, evaluable to jets.

    Subclasses implement :meth:`evaluate_jets`, which receives the chart
    coordinates as jets (possibly of a different map) and returns the m
    ambient components.  That makes composition free.
    """

    chart_dim: int
    ambient_dim: int
    domain: tuple[tuple[float, float], ...]
    label: str = "immersion"
    variables: tuple[str, ...] = ()

    def _init(self, chart_dim, ambient_dim, domain, label, variables=None):
        if not ambient_dim >= chart_dim >= 1:
            raise ValueError(f"need m >= n >= 1, got n={chart_dim}, m={ambient_dim}")
        domain = tuple((float(lo), float(hi)) for lo, hi in domain)
        if len(domain) != chart_dim or any(not hi > lo for lo, hi in domain):
            raise ValueError("domain must give one interval of positive length per chart variable")
        self.chart_dim = chart_dim
        self.ambient_dim = ambient_dim
        self.domain = domain
        self.label = label
        self.variables = tuple(variables) if variables else default_variables(chart_dim)

    def evaluate_jets(self, coords: list[Jet]) -> list[Jet]:
        raise NotImplementedError

    def check_domain(self, point) -> None:
        if len(point) != self.chart_dim:
            raise DomainViolation(f"expected {self.chart_dim} coordinates, got {len(point)}")
        for name, v, (lo, hi) in zip(self.variables, point, self.domain):
            if not lo <= v <= hi:
                raise DomainViolation(f"{name}={v!r} outside [{lo!r}, {hi!r}]")

    def evaluate(self, point, order: int) -> list[Jet]:
        self.check_domain(point)
        out = self.evaluate_jets(jets.seed([float(v) for v in point], order))
        return [_as_jet(v, self.chart_dim, order) for v in out]

    def position(self, point) -> np.ndarray:
        return np.array([j.value for j in self.evaluate(point, 0)])

    def jacobian(self, point) -> np.ndarray:
        """Rows are the coordinate tangent vectors x_i, shape (n, m)."""
        return jets.stack_derivatives(self.evaluate(point, 1), 1)

    def check_regular(self, point, ratio: float = REGULARITY_RATIO) -> None:
        sv = np.linalg.svd(self.jacobian(point), compute_uv=False)
        if not sv[0] > 0 or sv[-1] <= ratio * sv[0]:
            raise RegularityError(
                f"{self.label}: Jacobian rank < {self.chart_dim} at {tuple(float(p) for p in point)} "
                f"(singular values {sv.tolist()})"
            )

    def __repr__(self):
        return f"<{type(self).__name__} {self.label} n={self.chart_dim} m={self.ambient_dim}>"


def _as_jet(v, n, order) -> Jet:
    if isinstance(v, Jet):
        return v
    return jets.jet_constant(float(v), n, order)


class SpecImmersion(Immersion):
    """Immersion backed by a parsed ``.imm`` description."""

    def __init__(self, spec: ImmersionSpec, label: str | None = None):
        self._init(spec.chart_dim, spec.ambient_dim, spec.domain, label or "spec", spec.variables)
        self.spec = spec

    def evaluate_jets(self, coords):
        return eval_components(self.spec, coords)


def from_spec(spec: ImmersionSpec, label: str | None = None) -> SpecImmersion:
    return SpecImmersion(spec, label)


class ScaledImmersion(Immersion):
    """The homothety ``factor * x`` of another immersion."""

    def __init__(self, inner: Immersion, factor: float):
        if not factor > 0:
            raise ValueError("homothety factor must be positive")
        self._init(inner.chart_dim, inner.ambient_dim, inner.domain, f"{factor}*{inner.label}", inner.variables)
        self.inner = inner
        self.factor = float(factor)

    def evaluate_jets(self, coords):
        return [v * self.factor for v in self.inner.evaluate_jets(coords)]


def sample_points(imm: Immersion, per_dim: int = 5, shrink: float = 0.05) -> list[tuple[float, ...]]:
    axes = []
    for lo, hi in imm.domain:
        span = hi - lo
        axes.append(np.linspace(lo + shrink * span, hi - shrink * span, per_dim))
    mesh = np.meshgrid(*axes, indexing="ij")
    return [tuple(float(v) for v in row) for row in np.stack([m.ravel() for m in mesh], axis=1)]


class SphericalFactor(Immersion):
    """An immersion into the unit sphere, ``<Y, Y> = 1`` on the domain.

    Wraps another immersion and validates the unit-norm contract and
    regularity at sample points on construction.
    """

    def __init__(self, inner: Immersion, tol: float = UNIT_NORM_TOL, per_dim: int = 5):
        self._init(inner.chart_dim, inner.ambient_dim, inner.domain, inner.label, inner.variables)
        self.inner = inner
        for p in sample_points(inner, per_dim):
            y = inner.position(p)
            if abs(float(y @ y) - 1.0) >= tol:
                raise ValueError(f"{inner.label}: |<Y,Y> - 1| = {abs(float(y @ y) - 1.0):.3e} at {p}")
            inner.check_regular(p)

    def evaluate_jets(self, coords):
        return self.inner.evaluate_jets(coords)


class BaseMetricFactor(SphericalFactor):
    """Isometric immersion Z of an (n-1)-manifold F into the unit sphere of E^(m-1).

    Its induced metric is the fibre metric g_F of the warped product.
    """
