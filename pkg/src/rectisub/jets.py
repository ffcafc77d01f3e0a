"""Truncated multivariate Taylor jets (order <= 3).

A :class:`Jet` stores the Taylor coefficients of a smooth function of
``num_vars`` variables around a point, i.e. the partial derivative for
multi-index ``alpha`` divided by ``alpha!``.  Coefficients are kept densely
in graded-lexicographic order, so the storage slot of a multi-index is a
pure function of the multi-index.

Jets are immutable; every operation returns a new jet.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

MAX_ORDER = 3


class JetError(ValueError):
    """Invalid jet construction or incompatible operands."""


class JetDomainError(ArithmeticError):
    """An elementary function was applied outside its domain."""

    def __init__(self, func: str, value: float):
        super().__init__(f"{func} undefined at value {value!r}")
        self.func = func
        self.value = value

    def __reduce__(self):
        return type(self), (self.func, self.value)


@lru_cache(maxsize=None)
def multi_indices(num_vars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of total degree <= order, graded-lex ordered."""
    out = []
    for degree in range(order + 1):
        for combo in combinations_with_replacement(range(num_vars), degree):
            alpha = [0] * num_vars
            for v in combo:
                alpha[v] += 1
            out.append(tuple(alpha))
    return tuple(out)


@lru_cache(maxsize=None)
def _tables(num_vars: int, order: int):
    alphas = multi_indices(num_vars, order)
    index = {a: k for k, a in enumerate(alphas)}
    # truncated product: (i, j) -> k with alpha_i + alpha_j = alpha_k
    ii, jj, kk = [], [], []
    for i, a in enumerate(alphas):
        for j, b in enumerate(alphas):
            c = tuple(x + y for x, y in zip(a, b))
            k = index.get(c)
            if k is not None:
                ii.append(i)
                jj.append(j)
                kk.append(k)
    degree = np.array([sum(a) for a in alphas])
    return (
        index,
        np.array(ii, dtype=np.intp),
        np.array(jj, dtype=np.intp),
        np.array(kk, dtype=np.intp),
        degree,
    )


@lru_cache(maxsize=None)
def _partial_table(num_vars: int, order: int, var: int):
    """Source slots and factors so that d/dx_var maps order -> order-1."""
    index = _tables(num_vars, order)[0]
    src, fac = [], []
    for a in multi_indices(num_vars, order - 1):
        b = list(a)
        b[var] += 1
        src.append(index[tuple(b)])
        fac.append(float(b[var]))
    return np.array(src, dtype=np.intp), np.array(fac)


@lru_cache(maxsize=None)
def derivative_table(num_vars: int, order: int, degree: int):
    """Coefficient slots and alpha! factors for the full derivative tensor.

    Returns ``(slots, factors)`` both of shape ``(num_vars,) * degree``.
    """
    index = _tables(num_vars, order)[0]
    shape = (num_vars,) * degree
    slots = np.zeros(shape, dtype=np.intp)
    factors = np.zeros(shape)
    for pos in np.ndindex(*shape) if degree else [()]:
        alpha = [0] * num_vars
        for v in pos:
            alpha[v] += 1
        slots[pos] = index[tuple(alpha)]
        factors[pos] = math.prod(math.factorial(k) for k in alpha)
    return slots, factors


def _check_order(order: int) -> None:
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise JetError(f"jet order must be in 0..{MAX_ORDER}, got {order!r}")


class Jet:
    __slots__ = ("num_vars", "order", "coeffs")

    def __init__(self, coeffs, num_vars: int, order: int):
        _check_order(order)
        if num_vars < 1:
            raise JetError("num_vars must be positive")
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (len(multi_indices(num_vars, order)),):
            raise JetError(f"expected {len(multi_indices(num_vars, order))} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise JetDomainError("jet", float("nan"))
        self.num_vars = num_vars
        self.order = order
        self.coeffs = c
        c.flags.writeable = False

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, coeffs: np.ndarray, num_vars: int, order: int) -> "Jet":
        if not np.all(np.isfinite(coeffs)):
            raise JetDomainError("jet", float("nan"))
        obj = object.__new__(cls)
        obj.num_vars = num_vars
        obj.order = order
        coeffs.flags.writeable = False
        obj.coeffs = coeffs
        return obj

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def _like(self, v: float) -> "Jet":
        c = np.zeros_like(self.coeffs)
        c[0] = v
        return Jet._raw(c, self.num_vars, self.order)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.num_vars != self.num_vars or other.order != self.order:
                raise JetError(
                    f"jet mismatch: ({self.num_vars}, {self.order}) vs ({other.num_vars}, {other.order})"
                )
            return other
        return self._like(float(other))

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.coeffs.copy()
            c[0] += float(other)
            return Jet._raw(c, self.num_vars, self.order)
        return Jet._raw(self.coeffs + self._coerce(other).coeffs, self.num_vars, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet):
            c = self.coeffs.copy()
            c[0] -= float(other)
            return Jet._raw(c, self.num_vars, self.order)
        return Jet._raw(self.coeffs - self._coerce(other).coeffs, self.num_vars, self.order)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet._raw(-self.coeffs, self.num_vars, self.order)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet._raw(self.coeffs * float(other), self.num_vars, self.order)
        other = self._coerce(other)
        return Jet._raw(_mul(self.coeffs, other.coeffs, self.num_vars, self.order), self.num_vars, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = float(other)
            if other == 0.0:
                raise JetDomainError("div", other)
            return Jet._raw(self.coeffs / other, self.num_vars, self.order)
        return self * reciprocal(self._coerce(other))

    def __rtruediv__(self, other):
        return reciprocal(self) * float(other)

    def __pow__(self, p):
        return pow_const(self, p)

    # calculus -----------------------------------------------------------

    def partial(self, var: int) -> "Jet":
        """Jet of the partial derivative in ``var``; the order drops by one."""
        if not 0 <= var < self.num_vars:
            raise JetError(f"variable index {var} out of range")
        if self.order == 0:
            raise JetError("cannot differentiate an order-0 jet")
        src, fac = _partial_table(self.num_vars, self.order, var)
        return Jet._raw(self.coeffs[src] * fac, self.num_vars, self.order - 1)

    def truncate(self, order: int) -> "Jet":
        _check_order(order)
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        size = len(multi_indices(self.num_vars, order))
        return Jet._raw(self.coeffs[:size].copy(), self.num_vars, order)

    def derivative(self, degree: int) -> np.ndarray:
        """Full symmetric tensor of partial derivatives of the given degree."""
        if degree > self.order:
            raise JetError(f"derivative of degree {degree} requested from an order-{self.order} jet")
        if degree == 0:
            return np.array(self.value)
        slots, factors = derivative_table(self.num_vars, self.order, degree)
        return self.coeffs[slots] * factors

    def __repr__(self):
        return f"Jet(value={self.value!r}, num_vars={self.num_vars}, order={self.order})"


def _mul(a: np.ndarray, b: np.ndarray, num_vars: int, order: int) -> np.ndarray:
    if order == 0:
        return a * b
    _, ii, jj, kk, _ = _tables(num_vars, order)
    return np.bincount(kk, weights=a[ii] * b[jj], minlength=a.shape[0])


# public constructors --------------------------------------------------------


def jet_constant(v: float, num_vars: int, order: int) -> Jet:
    _check_order(order)
    c = np.zeros(len(multi_indices(num_vars, order)))
    c[0] = v
    return Jet(c, num_vars, order)


def jet_variable(index: int, value: float, num_vars: int, order: int) -> Jet:
    _check_order(order)
    if not 0 <= index < num_vars:
        raise JetError(f"variable index {index} out of range for {num_vars} variables")
    c = np.zeros(len(multi_indices(num_vars, order)))
    c[0] = value
    if order >= 1:
        c[1 + index] = 1.0
    return Jet(c, num_vars, order)


def seed(point, order: int) -> list[Jet]:
    """Independent variable jets at ``point``."""
    n = len(point)
    return [jet_variable(i, float(v), n, order) for i, v in enumerate(point)]


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise JetError(f"unknown operation {op!r}")


# composition ----------------------------------------------------------------


def compose(a: Jet, taylor: list[float]) -> Jet:
    """Compose a univariate Taylor polynomial ``sum taylor[k] d^k`` with ``a``.

    ``taylor[k]`` must be f^(k)(a.value)/k!; only ``a.order + 1`` terms are used.
    """
    nil = a.coeffs.copy()
    nil[0] = 0.0
    out = np.zeros_like(nil)
    out[0] = taylor[a.order] if a.order < len(taylor) else 0.0
    for k in range(a.order - 1, -1, -1):
        out = _mul(out, nil, a.num_vars, a.order)
        out[0] += taylor[k]
    return Jet._raw(out, a.num_vars, a.order)


def reciprocal(a: Jet) -> Jet:
    v = a.value
    if v == 0.0:
        raise JetDomainError("div", v)
    r = 1.0 / v
    return compose(a, [r, -r * r, r**3, -(r**4)])


def sin(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    return compose(a, [s, c, -s / 2.0, -c / 6.0])


def cos(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    return compose(a, [c, -s, -c / 2.0, s / 6.0])


def tan(a: Jet) -> Jet:
    v = a.value
    if abs(math.cos(v)) < 1e-12:
        raise JetDomainError("tan", v)
    t = math.tan(v)
    sec2 = 1.0 + t * t
    return compose(a, [t, sec2, t * sec2, sec2 * (1.0 + 3.0 * t * t) / 3.0])


def atan(a: Jet) -> Jet:
    v = a.value
    q = 1.0 / (1.0 + v * v)
    return compose(a, [math.atan(v), q, -v * q * q, (3.0 * v * v - 1.0) * q**3 / 3.0])


arctan = atan


def sqrt(a: Jet) -> Jet:
    v = a.value
    if not v > 0.0:
        raise JetDomainError("sqrt", v)
    r = math.sqrt(v)
    return compose(a, [r, 0.5 / r, -0.125 / (r * v), 0.0625 / (r * v * v)])


def exp(a: Jet) -> Jet:
    e = math.exp(a.value)
    return compose(a, [e, e, e / 2.0, e / 6.0])


def log(a: Jet) -> Jet:
    v = a.value
    if not v > 0.0:
        raise JetDomainError("log", v)
    return compose(a, [math.log(v), 1.0 / v, -0.5 / (v * v), 1.0 / (3.0 * v**3)])


def _int_pow(a: Jet, k: int) -> Jet:
    if k < 0:
        if a.value == 0.0:
            raise JetDomainError("pow", a.value)
        return reciprocal(_int_pow(a, -k))
    out = a._like(1.0)
    base = a
    while k:
        if k & 1:
            out = out * base
        k >>= 1
        if k:
            base = base * base
    return out


def pow_const(a: Jet, p: float) -> Jet:
    """``a ** p`` for a real constant ``p``.

    Integral exponents use exact repeated multiplication and accept any base
    (except zero for negative exponents); other exponents need a positive base.
    """
    p = float(p)
    if p.is_integer() and abs(p) <= 64:
        return _int_pow(a, int(p))
    v = a.value
    if not v > 0.0:
        raise JetDomainError("pow", v)
    f0 = v**p
    return compose(
        a,
        [
            f0,
            p * f0 / v,
            p * (p - 1.0) * f0 / (2.0 * v * v),
            p * (p - 1.0) * (p - 2.0) * f0 / (6.0 * v**3),
        ],
    )


ELEMENTARY = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "atan": atan,
    "arctan": atan,
    "sqrt": sqrt,
    "exp": exp,
    "log": log,
}


def jet_elementary(a: Jet, f: str, p: float | None = None) -> Jet:
    if f == "pow_const":
        if p is None:
            raise JetError("pow_const needs an exponent")
        return pow_const(a, p)
    try:
        return ELEMENTARY[f](a)
    except KeyError:
        raise JetError(f"unknown elementary function {f!r}") from None


def jet_extract(a: Jet, max_order: int | None = None) -> tuple:
    """(value, gradient, hessian, third) truncated to ``max_order`` entries.

    Partial derivatives are alpha! times the stored Taylor coefficients.
    """
    if max_order is None:
        max_order = a.order
    if max_order > a.order:
        raise JetError(f"derivatives up to order {max_order} requested from an order-{a.order} jet")
    return tuple([a.value] + [a.derivative(d) for d in range(1, max_order + 1)])


def stack_derivatives(jets: list[Jet], degree: int) -> np.ndarray:
    """Derivative tensors of a vector of jets, shape ``(n,)*degree + (m,)``."""
    first = jets[0]
    coeffs = np.stack([j.coeffs for j in jets], axis=-1)
    if degree == 0:
        return coeffs[0].copy()
    if degree > first.order:
        raise JetError(f"derivative of degree {degree} requested from an order-{first.order} jet")
    slots, factors = derivative_table(first.num_vars, first.order, degree)
    return coeffs[slots] * factors[..., None]


# small jet linear algebra ---------------------------------------------------


def dot(u: list[Jet], v: list[Jet]) -> Jet:
    out = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        out = out + a * b
    return out


def solve(matrix: list[list[Jet]], rhs: list[Jet]) -> list[Jet]:
    """Solve a small jet-valued linear system by partially pivoted elimination.

    Pivot choice uses the value parts only, so the result is the jet of the
    solution of the underlying smooth system.
    """
    n = len(rhs)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if a[piv][col].value == 0.0:
            raise JetError("singular jet system")
        a[col], a[piv] = a[piv], a[col]
        inv = reciprocal(a[col][col])
        for r in range(col + 1, n):
            f = a[r][col] * inv
            for k in range(col, n + 1):
                a[r][k] = a[r][k] - f * a[col][k]
    x = [None] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n]
        for k in range(r + 1, n):
            acc = acc - a[r][k] * x[k]
        x[r] = acc / a[r][r]
    return x
