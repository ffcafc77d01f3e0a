import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectisub.exprdsl import (
    ArityError,
    Binary,
    DslError,
    LexError,
    Name,
    Num,
    ParseError,
    SpecError,
    Unary,
    UnknownIdentifier,
    eval_spec,
    format_expr,
    format_spec,
    parse_expression,
    parse_immersion,
)
from rectisub.exprdsl.evaluate import DomainViolation, EvaluationError, eval_components

from oracles import ProgramGenerator

HELIX = "dim 1 -> 3; x = [3*cos(s), 3*sin(s), 4*s]; s in [0, 6.28]"


def test_helix_one_liner():
    spec = parse_immersion(HELIX)
    assert (spec.chart_dim, spec.ambient_dim) == (1, 3)
    assert spec.variables == ("s",)
    assert spec.domain == ((0.0, 6.28),)


def test_helix_values_at_zero():
    js = eval_spec(parse_immersion(HELIX), (0.0,), 1)
    assert [j.value for j in js] == pytest.approx([3.0, 0.0, 0.0], abs=1e-15)
    assert [j.coeffs[1] for j in js] == pytest.approx([0.0, 3.0, 4.0], abs=1e-15)


def test_square_component():
    (j,) = eval_spec(parse_immersion("dim 1 -> 1\nx = [s^2]\ns in [0, 3]"), (2.0,), 2)
    assert (j.value, j.coeffs[1], 2 * j.coeffs[2]) == (4.0, 4.0, 2.0)


def test_multiline_program_with_comments_and_constants():
    text = """
    # a torus
    dim 2 -> 3
    const R = 2
    const r = R / 2   # constants may use earlier ones
    x = [(R + r*cos(u2)) * cos(s),
         (R + r*cos(u2)) * sin(s),
         r * sin(u2)]
    s in [0, 2*pi]
    u2 in [0, 2*pi]
    """
    spec = parse_immersion(text)
    assert spec.constants == {"R": 2.0, "r": 1.0}
    assert spec.domain[0] == (0.0, pytest.approx(2 * math.pi))


def test_variable_aliases():
    spec = parse_immersion("dim 2 -> 3 vars t, phi\nx = [t, phi, t*phi]\nt in [0, 1]\nphi in [0, 1]")
    assert spec.variables == ("t", "phi")


def test_unclosed_bracket_span():
    text = "x = [cos(u2)"
    with pytest.raises(ParseError) as info:
        parse_immersion(text)
    err = info.value
    assert "unclosed '['" in str(err)
    assert err.span == (4, 5)
    assert (err.line, err.column) == (1, 5)


@pytest.mark.parametrize(
    "text, cls, fragment",
    [
        ("dim 1 -> 1\nx = [s $ 2]\ns in [0,1]", LexError, "$"),
        ("dim 1 -> 1\nx = [s +]\ns in [0,1]", ParseError, "x = [s +]"),
        ("dim 1 -> 1\nx = [foo(s)]\ns in [0,1]", UnknownIdentifier, "foo"),
        ("dim 1 -> 1\nx = [q]\ns in [0,1]", UnknownIdentifier, "q"),
        ("dim 1 -> 1\nx = [sin(s, s)]\ns in [0,1]", ArityError, "sin(s, s)"),
        ("dim 1 -> 1\nx = [pow(s)]\ns in [0,1]", ArityError, "pow(s)"),
        ("dim 2 -> 1\nx = [s]\ns in [0,1]\nu2 in [0,1]", SpecError, "dim"),
        ("dim 1 -> 2\nx = [s]\ns in [0,1]", SpecError, "x"),
        ("dim 1 -> 1\nx = [s]\ns in [1,1]", SpecError, "[1,1]"),
        ("dim 1 -> 1\nx = [s]", SpecError, ""),
        ("dim 1 -> 1\nx = [s^s]\ns in [0,1]", ParseError, "s"),
        ("dim 1 -> 1\nx = [pow(s, s)]\ns in [0,1]", SpecError, "s"),
    ],
)
def test_errors_carry_spans_inside_source(text, cls, fragment):
    with pytest.raises(cls) as info:
        parse_immersion(text)
    err = info.value
    lo, hi = err.span
    assert 0 <= lo <= hi <= len(text)
    assert err.line >= 1 and err.column >= 1
    assert f"line {err.line}, column {err.column}" in str(err)
    if fragment:
        assert fragment in text[lo:] or text[lo:hi] in fragment


def test_power_binds_tighter_than_unary_minus():
    node = parse_expression("-s^2")
    assert isinstance(node, Unary) and isinstance(node.operand, Binary) and node.operand.op == "^"


def test_power_is_right_associative():
    node = parse_expression("s^2^3")
    assert node.op == "^" and node.right.op == "^"
    assert node.right.left == Num(2.0)


def test_precedence_and_left_associativity():
    node = parse_expression("1 - 2 - 3 * 4 / 5")
    assert node.op == "-" and node.left.op == "-"
    assert node.right.op == "/" and node.right.left.op == "*"


def test_spans_cover_parentheses():
    text = "2 * (s + 1)"
    node = parse_expression(text)
    assert text[slice(*node.right.span)] == "(s + 1)"


def test_eval_domain_violation():
    spec = parse_immersion("dim 1 -> 1\nx = [s]\ns in [0, 1]")
    with pytest.raises(DomainViolation):
        eval_spec(spec, (2.0,), 1)


def test_jet_domain_error_reports_component():
    spec = parse_immersion("dim 1 -> 2\nx = [s, log(s - 1)]\ns in [0, 2]")
    with pytest.raises(EvaluationError) as info:
        eval_spec(spec, (0.5,), 1)
    assert info.value.component == 1
    assert "log" in str(info.value)


def test_closed_form_agreement_at_random_points():
    spec = parse_immersion(
        "dim 2 -> 3\nconst a = 1.5\nx = [a*cos(s)*sqrt(1 + u2^2), exp(-s/2)*atan(u2), log(2 + sin(s*u2))]\n"
        "s in [-1, 1]\nu2 in [-1, 1]"
    )
    rng = np.random.default_rng(7)
    for s, u in rng.uniform(-1, 1, size=(100, 2)):
        got = eval_components(spec, (s, u))
        want = [1.5 * math.cos(s) * math.sqrt(1 + u * u), math.exp(-s / 2) * math.atan(u), math.log(2 + math.sin(s * u))]
        assert got == pytest.approx(want, abs=1e-12)


def test_component_order_does_not_matter():
    a = parse_immersion("dim 1 -> 2\nx = [sin(s), s^3]\ns in [0, 1]")
    b = parse_immersion("dim 1 -> 2\nx = [s^3, sin(s)]\ns in [0, 1]")
    ja, jb = eval_spec(a, (0.4,), 3), eval_spec(b, (0.4,), 3)
    assert np.array_equal(ja[0].coeffs, jb[1].coeffs)
    assert np.array_equal(ja[1].coeffs, jb[0].coeffs)


def test_format_expr_minimal_parentheses():
    assert format_expr(parse_expression("(a + b) * c - (d - e)")) == "(a + b) * c - (d - e)"
    assert format_expr(parse_expression("-(s^2)")) == "-s^2"
    assert format_expr(parse_expression("(-s)^2")) == "(-s)^2"
    assert format_expr(parse_expression("a / (b * c)")) == "a / (b * c)"
    assert format_expr(parse_expression("s^-2")) == "s^-2"


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_print_parse_round_trip(seed_value):
    spec = ProgramGenerator(random.Random(seed_value), ()).program()
    text = format_spec(spec)
    again = parse_immersion(text)
    assert again == spec
    assert format_spec(again) == text


def test_dsl_errors_share_base_class():
    for cls in (LexError, ParseError, UnknownIdentifier, ArityError, SpecError):
        assert issubclass(cls, DslError)


def test_name_equality_ignores_span():
    assert Name("s", (0, 1)) == Name("s", (5, 6))
