from __future__ import annotations

from .nodes import Binary, Call, Expr, ImmersionSpec, Name, Num, Unary, default_variables

# binding strength: higher binds tighter
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY = 3
_POWER = 4
_ATOM = 5


def format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _POWER if node.op == "^" else _PREC[node.op]
    if isinstance(node, Unary):
        return _UNARY
    return _ATOM


def format_expr(node: Expr) -> str:
    """Print an expression so that parsing it back yields the same AST."""
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(format_expr(a) for a in node.args)})"
    if isinstance(node, Unary):
        inner = format_expr(node.operand)
        if _prec(node.operand) < _UNARY:
            inner = f"({inner})"
        return f"-{inner}"
    if node.op == "^":
        base = format_expr(node.left)
        if _prec(node.left) < _ATOM:
            base = f"({base})"
        return f"{base}^{_format_exponent(node.right)}"
    p = _PREC[node.op]
    left = format_expr(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = format_expr(node.right)
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _format_exponent(node: Expr) -> str:
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Unary):
        return "-" + _format_exponent(node.operand)
    return f"{format_number(node.left.value)}^{_format_exponent(node.right)}"


def format_spec(spec: ImmersionSpec, comment: str | None = None) -> str:
    """Render a complete ``.imm`` document."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    header = f"dim {spec.chart_dim} -> {spec.ambient_dim}"
    if spec.variables != default_variables(spec.chart_dim):
        header += " vars " + ", ".join(spec.variables)
    lines.append(header)
    for name, value in spec.constants.items():
        lines.append(f"const {name} = {format_number(value)}")
    comps = ",\n     ".join(format_expr(c) for c in spec.components)
    lines.append(f"x = [{comps}]")
    for name, (lo, hi) in zip(spec.variables, spec.domain):
        lines.append(f"{name} in [{format_number(lo)}, {format_number(hi)}]")
    return "\n".join(lines) + "\n"
