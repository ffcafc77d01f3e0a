"""Pointwise extrinsic and intrinsic geometry of an immersion.

Everything is computed from the order-3 jets of the immersion at one chart
point.  Array index conventions (n = chart dim, m = ambient dim):

* ``x1[i]``            coordinate tangent vector x_i, shape (n, m)
* ``dmetric[k, i, j]``  d_k g_ij
* ``christoffel[k, i, j]`` Gamma^k_ij;  ``dchristoffel[p, k, i, j]`` = d_p Gamma^k_ij
* ``h[i, j]``          second fundamental form h(d_i, d_j), an m-vector
* ``omega[i, j, k]``   omega_i^j(e_k) = <nabla_{e_k} e_i, e_j> for the frame e
* Riemann tensors ``R[i, j, k, l] = <R(d_i, d_j) d_k, d_l>``, with
  ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .immersion import Immersion

RANK_RTOL = 1e-10
RANK_ATOL = 1e-10
LEAKAGE_TOL = 1e-8
PLANE_SIN_TOL = 1e-8


class GeometryError(ValueError):
    pass


@dataclass
class GeometrySnapshot:
    point: tuple[float, ...]
    x: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    dmetric: np.ndarray
    ddmetric: np.ndarray
    christoffel: np.ndarray
    dchristoffel: np.ndarray
    frame: np.ndarray
    frame_coeffs: np.ndarray
    tangent_projector: np.ndarray
    normal_projector: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    omega: np.ndarray
    jets: list

    @property
    def n(self) -> int:
        return self.x1.shape[0]

    @property
    def m(self) -> int:
        return self.x1.shape[1]

    def h_frame(self) -> np.ndarray:
        """h(e_i, e_j) in the orthonormal frame, shape (n, n, m)."""
        E = self.frame_coeffs
        return np.einsum("ia,jb,abm->ijm", E, E, self.h)


def _gram_schmidt_jets(vectors):
    """Modified Gram-Schmidt on jet-valued vectors with deterministic signs."""
    frame = []
    for v in vectors:
        w = list(v)
        for e in frame:
            proj = jets.dot(w, e)
            w = [wi - proj * ei for wi, ei in zip(w, e)]
        norm = jets.sqrt(jets.dot(w, w))
        e = [wi / norm for wi in w]
        scale = max(abs(ei.value) for ei in e)
        for ei in e:
            if abs(ei.value) > 1e-12 * scale:
                if ei.value < 0:
                    e = [-ej for ej in e]
                break
        frame.append(e)
    return frame


def snapshot(imm: Immersion, p) -> GeometrySnapshot:
    """All pointwise geometric data of ``imm`` at chart point ``p``."""
    p = tuple(float(v) for v in p)
    imm.check_regular(p)
    js = imm.evaluate(p, 3)
    n = imm.chart_dim
    x = jets.stack_derivatives(js, 0)
    x1 = jets.stack_derivatives(js, 1)
    x2 = jets.stack_derivatives(js, 2)
    x3 = jets.stack_derivatives(js, 3)

    g = x1 @ x1.T
    if np.linalg.eigvalsh(g)[0] <= 0:
        raise GeometryError(f"metric not positive definite at {p}")
    ginv = np.linalg.inv(g)
    dg = np.einsum("kim,jm->kij", x2, x1) + np.einsum("im,kjm->kij", x1, x2)
    ddg = (
        np.einsum("lkim,jm->lkij", x3, x1)
        + np.einsum("kim,ljm->lkij", x2, x2)
        + np.einsum("lim,kjm->lkij", x2, x2)
        + np.einsum("im,lkjm->lkij", x1, x3)
    )

    # first-kind symbols [ij, l] from metric derivatives only
    # first[i, j, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (
        np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    )
    gamma = np.einsum("kl,ijl->kij", ginv, first)
    dfirst = 0.5 * (
        np.einsum("pijl->pijl", ddg) + np.einsum("pjil->pijl", ddg) - np.einsum("plij->pijl", ddg)
    )
    dginv = -np.einsum("ka,pab,bl->pkl", ginv, dg, ginv)
    dgamma = np.einsum("pkl,ijl->pkij", dginv, first) + np.einsum("kl,pijl->pkij", ginv, dfirst)

    h = x2 - np.einsum("kij,km->ijm", gamma, x1)
    dh = x3 - np.einsum("pkij,km->pijm", dgamma, x1) - np.einsum("kij,pkm->pijm", gamma, x2)

    P_T = x1.T @ ginv @ x1
    P_N = np.eye(imm.ambient_dim) - P_T

    tangents = [[c.partial(a).truncate(1) for c in js] for a in range(n)]
    frame_jets = _gram_schmidt_jets(tangents)
    frame = np.array([[c.value for c in e] for e in frame_jets])
    E = frame @ x1.T @ ginv
    # d_b e_i, shape (i, b, m)
    de = np.array([[[c.coeffs[1 + b] for c in e] for b in range(n)] for e in frame_jets])
    omega = np.einsum("kb,ibm,jm->ijk", E, de, frame)

    return GeometrySnapshot(
        point=p,
        x=x,
        x1=x1,
        x2=x2,
        x3=x3,
        metric=g,
        metric_inv=ginv,
        dmetric=dg,
        ddmetric=ddg,
        christoffel=gamma,
        dchristoffel=dgamma,
        frame=frame,
        frame_coeffs=E,
        tangent_projector=P_T,
        normal_projector=P_N,
        h=h,
        dh=dh,
        omega=omega,
        jets=js,
    )


def _snap(obj, p=None) -> GeometrySnapshot:
    if isinstance(obj, GeometrySnapshot):
        return obj
    if p is None:
        raise TypeError("chart point required")
    return snapshot(obj, p)


# shape operator and normal spaces ------------------------------------------


def shape_operator(snap: GeometrySnapshot, xi) -> np.ndarray:
    """A_xi in the orthonormal frame: ``<A_xi e_i, e_j> = <h(e_i, e_j), xi>``."""
    xi = np.asarray(xi, dtype=float)
    leak = np.linalg.norm(snap.tangent_projector @ xi)
    if leak > LEAKAGE_TOL * max(np.linalg.norm(xi), np.finfo(float).tiny):
        raise GeometryError(f"vector is not normal: tangential part {leak:.3e}")
    A = snap.h_frame() @ xi
    return 0.5 * (A + A.T)


@dataclass
class FirstNormalSpace:
    basis: np.ndarray  # shape (d, m)
    dimension: int
    singular_values: np.ndarray


def first_normal_space(snap: GeometrySnapshot) -> FirstNormalSpace:
    """Span of h(e_i, e_j), i <= j, with its numerical rank."""
    hf = snap.h_frame()
    n = snap.n
    cols = np.array([hf[i, j] for i in range(n) for j in range(i, n)]).T
    U, sv, _ = np.linalg.svd(cols, full_matrices=False)
    cutoff = max(RANK_ATOL, RANK_RTOL * (sv[0] if sv.size else 0.0))
    d = int(np.sum(sv > cutoff))
    return FirstNormalSpace(basis=U[:, :d].T.copy(), dimension=d, singular_values=sv)


def normal_covariant_derivative(imm: Immersion, p, xi_field, tol: float = LEAKAGE_TOL) -> np.ndarray:
    """D_{d_i} xi for a normal field given as ``xi_field(point, order) -> jets``.

    Returns shape (n, m): the normal part of the ambient derivative.
    """
    snap = _snap(imm, p)
    field = xi_field(snap.point, 1)
    xi = np.array([c.value for c in field])
    leak = np.linalg.norm(snap.tangent_projector @ xi)
    if leak > tol * (1.0 + np.linalg.norm(xi)):
        raise GeometryError(f"field is not normal: tangential part {leak:.3e}")
    dxi = jets.stack_derivatives(field, 1)
    return dxi @ snap.normal_projector


def covariant_derivative_h(imm_or_snap, p=None) -> np.ndarray:
    """(nabla-bar_{d_p} h)(d_i, d_j), shape (n, n, n, m) indexed [p, i, j]."""
    s = _snap(imm_or_snap, p)
    D = s.dh @ s.normal_projector
    G = s.christoffel
    return D - np.einsum("lpi,ljm->pijm", G, s.h) - np.einsum("lpj,ilm->pijm", G, s.h)


def codazzi_residual(imm_or_snap, p=None) -> float:
    nh = covariant_derivative_h(imm_or_snap, p)
    asym = nh - nh.transpose(1, 0, 2, 3)
    return float(np.max(np.abs(asym)) / (1.0 + np.max(np.abs(nh))))


# curvature -----------------------------------------------------------------


@dataclass
class CurvatureData:
    intrinsic: np.ndarray
    gauss: np.ndarray
    metric: np.ndarray

    def sectional(self, X, Y, which: str = "gauss") -> float:
        """K(X ^ Y) for coordinate-component vectors X, Y."""
        R = self.gauss if which == "gauss" else self.intrinsic
        X, Y = np.asarray(X, float), np.asarray(Y, float)
        g = self.metric
        xx, yy, xy = X @ g @ X, Y @ g @ Y, X @ g @ Y
        area2 = xx * yy - xy * xy
        if area2 <= (PLANE_SIN_TOL**2) * xx * yy:
            raise GeometryError("degenerate 2-plane for sectional curvature")
        return float(np.einsum("ijkl,i,j,k,l->", R, X, Y, Y, X) / area2)

    def residual(self) -> float:
        """Relative gap between the two curvature routes."""
        return float(np.max(np.abs(self.intrinsic - self.gauss)) / (1.0 + np.max(np.abs(self.gauss))))


def riemann_intrinsic(s: GeometrySnapshot) -> np.ndarray:
    G, dG = s.christoffel, s.dchristoffel
    up = (
        np.einsum("iljk->lijk", dG)
        - np.einsum("jlik->lijk", dG)
        + np.einsum("mjk,lim->lijk", G, G)
        - np.einsum("mik,ljm->lijk", G, G)
    )
    return np.einsum("qijk,ql->ijkl", up, s.metric)


def riemann_gauss(s: GeometrySnapshot) -> np.ndarray:
    h = s.h
    return np.einsum("jkm,ilm->ijkl", h, h) - np.einsum("ikm,jlm->ijkl", h, h)


def curvature(imm_or_snap, p=None) -> CurvatureData:
    s = _snap(imm_or_snap, p)
    return CurvatureData(intrinsic=riemann_intrinsic(s), gauss=riemann_gauss(s), metric=s.metric)


def to_frame(tensor: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Express a covariant 4-tensor in the frame with coefficient matrix E."""
    return np.einsum("ia,jb,kc,ld,abcd->ijkl", E, E, E, E, tensor)
