"""Pointwise residuals for the rectifying condition and its equivalents."""

from __future__ import annotations

import numpy as np

from .. import jets
from ..geometry import (
    GeometryError,
    GeometrySnapshot,
    curvature,
    normal_covariant_derivative,
    shape_operator,
    snapshot,
)
from .split import NormalPositionField, split_jets


def _snap(obj, p=None) -> GeometrySnapshot:
    if isinstance(obj, GeometrySnapshot):
        return obj
    return snapshot(obj, p)


def rectifying_residual(snap: GeometrySnapshot) -> float:
    """Normalized max |<x, h(e_i, e_j)>|; zero iff x lies in the rectifying space."""
    hf = snap.h_frame()
    num = float(np.max(np.abs(hf @ snap.x)))
    hmax = float(np.max(np.linalg.norm(hf, axis=-1)))
    return num / ((1.0 + np.linalg.norm(snap.x)) * (1.0 + hmax))


def tangential_derivative(snap: GeometrySnapshot) -> tuple[np.ndarray, np.ndarray]:
    """(a, N) with a^k the components of x^T and ``N[i, k]`` the components of nabla_{d_i} x^T."""
    sj = split_jets([c.truncate(2) for c in snap.jets], 1)
    a = np.array([c.value for c in sj.components])
    da = np.array([[c.coeffs[1 + i] for i in range(snap.n)] for c in sj.components])  # [k, i]
    nabla = da.T + np.einsum("kij,j->ik", snap.christoffel, a)
    return a, nabla


def concurrency_residual(imm_or_snap, p=None) -> float:
    """max_i |nabla_{d_i} x^T - d_i|_g / (1 + |d_i|_g)."""
    s = _snap(imm_or_snap, p)
    _, nabla = tangential_derivative(s)
    V = nabla - np.eye(s.n)
    norms = np.sqrt(np.maximum(np.einsum("ik,kl,il->i", V, s.metric, V), 0.0))
    return float(np.max(norms / (1.0 + np.sqrt(np.diag(s.metric)))))


def adapted_frame(s: GeometrySnapshot, xt: np.ndarray) -> np.ndarray | None:
    """Orthonormal tangent frame with e_1 = x^T/|x^T|; None when x^T vanishes."""
    rho = np.linalg.norm(xt)
    if rho <= 1e-12 * (1.0 + np.linalg.norm(s.x)):
        return None
    frame = [xt / rho]
    for v in s.x1:
        w = v.copy()
        for e in frame:
            w = w - (w @ e) * e
        if np.linalg.norm(w) > 1e-8 * np.linalg.norm(v):
            frame.append(w / np.linalg.norm(w))
        if len(frame) == s.n:
            break
    return np.array(frame)


def point_checks(imm, p) -> dict:
    """Every residual used by classification and the property report, at one point.

    Values that are undefined at the point (e.g. anything built on e_1 when
    x^T = 0) are NaN.
    """
    from ..geometry import codazzi_residual, first_normal_space

    s = snapshot(imm, p)
    n, m = s.n, s.m
    nan = float("nan")
    x = s.x
    a, nabla = tangential_derivative(s)
    xt = a @ s.x1
    xn = x - xt
    rho, nu = float(np.linalg.norm(xt)), float(np.linalg.norm(xn))
    curv = curvature(s)
    fns = first_normal_space(s)
    V = nabla - np.eye(n)
    conc = float(np.max(np.sqrt(np.maximum(np.einsum("ik,kl,il->i", V, s.metric, V), 0.0)) / (1.0 + np.sqrt(np.diag(s.metric)))))

    out = {
        "point": [float(v) for v in s.point],
        "x": [float(v) for v in x],
        "x_norm": float(np.linalg.norm(x)),
        "x_sq": float(x @ x),
        "rho": rho,
        "nu": nu,
        "rectifying": rectifying_residual(s),
        "concurrency": conc,
        "im_h_dim": fns.dimension,
        "codim_ok": bool(m > n + fns.dimension),
        "codazzi": codazzi_residual(s),
        "gauss": curv.residual(),
        "e_rho": nan,
        "a_xn": nan,
        "r_xt": nan,
        "k_xt": nan,
        "omega": nan,
        "dxn": nan,
        "weingarten": nan,
    }

    # A_{x^N} and the tangential Weingarten identity A_{x^N} Z = nabla_Z x^T - Z
    try:
        A = shape_operator(s, xn)
    except GeometryError:
        A = None
    if A is not None:
        out["a_xn"] = float(np.linalg.norm(A, 2))
        L = s.frame_coeffs @ V @ s.x1 @ s.frame.T  # <nabla_{e_i} x^T - e_i, e_j>
        out["weingarten"] = float(np.max(np.abs(A - L)))

    # normal Weingarten identity D_Z x^N = -h(Z, x^T), through jets of x^N
    D = _normal_derivative_of_xn(imm, s)
    if D is not None:
        h_xt = np.einsum("bim,i->bm", s.h, a)
        out["dxn"] = float(np.max(np.abs(s.frame_coeffs @ (D + h_xt))))

    frame = adapted_frame(s, xt)
    if frame is None:
        return out
    E = frame @ s.x1.T @ s.metric_inv  # e_i = E[i, a] d_a

    # e_j(rho) from the jet of |x^T|
    sj = split_jets([c.truncate(2) for c in s.jets], 1)
    rho_jet = jets.sqrt(jets.dot(sj.tangential, sj.tangential))
    drho = np.array([rho_jet.coeffs[1 + b] for b in range(n)])
    e_rho = E @ drho
    target = np.zeros(n)
    target[0] = 1.0
    out["e_rho"] = float(np.max(np.abs(e_rho - target)))

    Rg = curv.gauss
    out["r_xt"] = float(np.max(np.abs(np.einsum("i,ijkl,bj,ck,dl->bcd", a, Rg, E, E, E))))
    if n >= 2:
        R_frame = np.einsum("ia,jb,kc,ld,abcd->ijkl", E, E, E, E, Rg)
        out["k_xt"] = float(max(abs(R_frame[0, j, j, 0]) for j in range(1, n)))
        # omega_1^j(e_i) = <nabla_{e_i} e_1, e_j>, i, j >= 2
        e1 = [c / rho_jet for c in sj.tangential]
        de1 = np.array([[c.coeffs[1 + b] for c in e1] for b in range(n)])  # [b, m]
        om = E[1:] @ de1 @ frame[1:].T  # [i, j]
        out["omega"] = float(np.max(np.abs(om - np.eye(n - 1) / rho)))
    return out


def _normal_derivative_of_xn(imm, s: GeometrySnapshot):
    try:
        return normal_covariant_derivative(s, None, NormalPositionField(imm))
    except GeometryError:
        return None
