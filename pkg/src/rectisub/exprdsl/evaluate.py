from __future__ import annotations

import math

from .. import jets
from ..jets import Jet, JetDomainError
from .nodes import Binary, Call, Expr, ImmersionSpec, Name, Num, Unary


class EvaluationError(ValueError):
    """Evaluation of an immersion component failed."""

    def __init__(self, message: str, component: int | None = None):
        self.message = message
        self.component = component
        where = f"component {component}: " if component is not None else ""
        super().__init__(where + message)

    def __reduce__(self):
        return type(self), (self.message, self.component)


class DomainViolation(EvaluationError):
    pass


def _float_pow(v: float, p: float) -> float:
    if float(p).is_integer():
        if v == 0.0 and p < 0:
            raise JetDomainError("pow", v)
        return v ** int(p)
    if not v > 0.0:
        raise JetDomainError("pow", v)
    return v**p


def _float_func(name: str, v: float) -> float:
    if name == "sqrt" and not v > 0.0:
        raise JetDomainError("sqrt", v)
    if name == "log" and not v > 0.0:
        raise JetDomainError("log", v)
    return getattr(math, name)(v)


def evaluate(node: Expr, env: dict):
    """Evaluate an AST with names bound to floats or jets."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        return env[node.name]
    if isinstance(node, Unary):
        return -evaluate(node.operand, env)
    if isinstance(node, Binary):
        if node.op == "^":
            return _pow(evaluate(node.left, env), eval_constant(node.right, env))
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if not isinstance(b, Jet) and b == 0.0:
            raise JetDomainError("div", 0.0)
        if isinstance(b, Jet) and b.value == 0.0:
            raise JetDomainError("div", 0.0)
        return a / b
    if node.func == "pow":
        return _pow(evaluate(node.args[0], env), eval_constant(node.args[1], env))
    arg = evaluate(node.args[0], env)
    if isinstance(arg, Jet):
        return jets.ELEMENTARY[node.func](arg)
    return _float_func(node.func, arg)


def _pow(base, p: float):
    if isinstance(base, Jet):
        return jets.pow_const(base, p)
    return _float_pow(base, p)


def eval_constant(node: Expr, env: dict) -> float:
    """Evaluate a name-free-or-constant expression to a float."""
    return float(evaluate(node, {k: v for k, v in env.items() if not isinstance(v, Jet)}))


def _env(spec: ImmersionSpec, coords) -> dict:
    from .parser import BUILTIN_CONSTANTS

    env = dict(BUILTIN_CONSTANTS)
    env.update(spec.constants)
    env.update(zip(spec.variables, coords))
    return env


def check_in_domain(spec: ImmersionSpec, point) -> None:
    if len(point) != spec.chart_dim:
        raise DomainViolation(f"expected {spec.chart_dim} coordinates, got {len(point)}")
    for name, v, (lo, hi) in zip(spec.variables, point, spec.domain):
        if not lo <= v <= hi:
            raise DomainViolation(f"{name}={v!r} outside [{lo!r}, {hi!r}]")


def eval_components(spec: ImmersionSpec, coords) -> list:
    """Evaluate every component with the chart variables bound to ``coords``.

    ``coords`` may be floats or jets (for composition with other maps).
    """
    env = _env(spec, coords)
    out = []
    for k, comp in enumerate(spec.components):
        try:
            v = evaluate(comp, env)
        except (JetDomainError, OverflowError, ZeroDivisionError, ValueError) as exc:
            raise EvaluationError(str(exc), component=k) from exc
        if isinstance(coords[0], Jet) and not isinstance(v, Jet):
            v = jets.jet_constant(v, coords[0].num_vars, coords[0].order)
        out.append(v)
    return out


def eval_spec(spec: ImmersionSpec, point, order: int) -> list[Jet]:
    """Jets of all components at a chart point inside the declared domain."""
    check_in_domain(spec, point)
    return eval_components(spec, jets.seed(point, order))
