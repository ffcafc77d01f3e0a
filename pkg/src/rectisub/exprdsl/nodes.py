"""AST node types and the parsed immersion description."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Span = tuple[int, int]

FUNCTIONS = {"sin": 1, "cos": 1, "tan": 1, "atan": 1, "sqrt": 1, "exp": 1, "log": 1, "pow": 2}


@dataclass(frozen=True)
class Num:
    value: float
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    name: str
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]
    span: Span = field(default=(0, 0), compare=False, repr=False)


Expr = Union[Num, Name, Unary, Binary, Call]


def names_in(node: Expr) -> set[str]:
    if isinstance(node, Name):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Unary):
        return names_in(node.operand)
    if isinstance(node, Binary):
        return names_in(node.left) | names_in(node.right)
    out: set[str] = set()
    for a in node.args:
        out |= names_in(a)
    return out


def substitute(node: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace ``Name`` nodes by the given expressions (spans are dropped)."""
    if isinstance(node, Name):
        return mapping.get(node.name, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, Unary):
        return Unary(node.op, substitute(node.operand, mapping))
    if isinstance(node, Binary):
        return Binary(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    return Call(node.func, tuple(substitute(a, mapping) for a in node.args))


@dataclass(frozen=True)
class ImmersionSpec:
    chart_dim: int
    ambient_dim: int
    variables: tuple[str, ...]
    components: tuple[Expr, ...]
    constants: dict[str, float]
    domain: tuple[tuple[float, float], ...]
    source: str = field(default="", compare=False, repr=False)

    def __hash__(self):
        return hash((self.chart_dim, self.ambient_dim, self.variables, self.components, self.domain))


def default_variables(n: int) -> tuple[str, ...]:
    return ("s",) + tuple(f"u{k}" for k in range(2, n + 1))
