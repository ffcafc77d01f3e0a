from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import jets
from ..geometry import GeometrySnapshot


@dataclass
class PositionSplit:
    tangential: np.ndarray  # x^T as an m-vector
    components: np.ndarray  # chart-frame components a^i of x^T
    normal: np.ndarray  # x^N
    rho: float  # |x^T|
    nu: float  # |x^N|


def position_split(snap: GeometrySnapshot) -> PositionSplit:
    """x = x^T + x^N with x^T = g^ij <x, x_j> x_i."""
    a = snap.metric_inv @ (snap.x1 @ snap.x)
    xt = a @ snap.x1
    xn = snap.x - xt
    return PositionSplit(xt, a, xn, float(np.linalg.norm(xt)), float(np.linalg.norm(xn)))


@dataclass
class SplitJets:
    components: list  # a^i
    tangential: list  # x^T components
    normal: list  # x^N components


def split_jets(js: list, order: int) -> SplitJets:
    """Position split carried as jets of ``order`` from jets of x of ``order + 1``."""
    n = js[0].num_vars
    xs = [c.truncate(order) for c in js]
    tangents = [[c.partial(i).truncate(order) for c in js] for i in range(n)]
    g = [[jets.dot(tangents[i], tangents[j]) for j in range(n)] for i in range(n)]
    rhs = [jets.dot(xs, tangents[i]) for i in range(n)]
    a = jets.solve(g, rhs)
    xt = [sum((a[i] * tangents[i][k] for i in range(1, n)), a[0] * tangents[0][k]) for k in range(len(xs))]
    xn = [xk - tk for xk, tk in zip(xs, xt)]
    return SplitJets(a, xt, xn)


class NormalPositionField:
    """The normal component x^N as a chart function evaluable to jets."""

    def __init__(self, imm):
        self.imm = imm

    def __call__(self, point, order: int):
        return split_jets(self.imm.evaluate(point, order + 1), order).normal
