"""Text format for immersions: ``dim n -> m``, constants, components, domains."""

from .evaluate import DomainViolation, EvaluationError, eval_components, eval_spec, evaluate
from .lexer import ArityError, DslError, LexError, ParseError, SpecError, UnknownIdentifier
from .nodes import Binary, Call, Expr, ImmersionSpec, Name, Num, Unary, default_variables, substitute
from .parser import parse_expression, parse_immersion
from .printer import format_expr, format_spec

__all__ = [
    "ArityError",
    "Binary",
    "Call",
    "DomainViolation",
    "DslError",
    "EvaluationError",
    "Expr",
    "ImmersionSpec",
    "LexError",
    "Name",
    "Num",
    "ParseError",
    "SpecError",
    "Unary",
    "UnknownIdentifier",
    "default_variables",
    "eval_components",
    "eval_spec",
    "evaluate",
    "format_expr",
    "format_spec",
    "parse_expression",
    "parse_immersion",
    "substitute",
]
