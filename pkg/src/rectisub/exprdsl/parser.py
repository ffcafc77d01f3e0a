"""Recursive-descent parser for ``.imm`` immersion descriptions.

See ``docs/grammar.md`` for the grammar.
"""

from __future__ import annotations

import math

from .evaluate import eval_constant
from .lexer import ArityError, ParseError, SpecError, Token, UnknownIdentifier, tokenize
from .nodes import FUNCTIONS, Binary, Call, Expr, ImmersionSpec, Name, Num, Unary, default_variables, names_in

BUILTIN_CONSTANTS = {"pi": math.pi}
KEYWORDS = {"dim", "const", "in", "vars"}

_CLOSERS = {"(": ")", "[": "]"}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def error(self, message: str, tok: Token | None = None):
        t = tok or self.tok
        start = min(t.start, max(len(self.source) - 1, 0))
        return ParseError(message, self.source, (start, max(t.end, start + 1)))

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if not self.at(kind, text):
            found = "end of input" if self.tok.kind == "EOF" else repr(self.tok.text)
            raise self.error(f"expected {what or text or kind.lower()}, found {found}")
        return self.advance()

    def close(self, opener: Token) -> Token:
        closer = _CLOSERS[opener.text]
        if self.at("OP", closer):
            return self.advance()
        if self.tok.kind in ("EOF", "SEP"):
            raise self.error(f"unclosed {opener.text!r}", opener)
        raise self.error(f"expected {closer!r}, found {self.tok.text!r}")

    # expressions ----------------------------------------------------------

    def expr(self) -> Expr:
        node = self.term()
        while self.at("OP", "+") or self.at("OP", "-"):
            op = self.advance().text
            rhs = self.term()
            node = Binary(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at("OP", "*") or self.at("OP", "/"):
            op = self.advance().text
            rhs = self.unary()
            node = Binary(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def unary(self) -> Expr:
        if self.at("OP", "-"):
            t = self.advance()
            operand = self.unary()
            return Unary("-", operand, (t.start, operand.span[1]))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("OP", "^"):
            self.advance()
            exponent = self.exponent()
            return Binary("^", base, exponent, (base.span[0], exponent.span[1]))
        return base

    def exponent(self) -> Expr:
        # exponents are numeric literals, optionally negated, right-associative
        if self.at("OP", "-"):
            t = self.advance()
            operand = self.exponent()
            return Unary("-", operand, (t.start, operand.span[1]))
        if not self.at("NUMBER"):
            raise self.error("exponent must be a numeric literal")
        t = self.advance()
        node: Expr = Num(float(t.text), (t.start, t.end))
        if self.at("OP", "^"):
            self.advance()
            rhs = self.exponent()
            node = Binary("^", node, rhs, (t.start, rhs.span[1]))
        return node

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "NUMBER":
            self.advance()
            return Num(float(t.text), (t.start, t.end))
        if t.kind == "IDENT":
            self.advance()
            if self.at("OP", "("):
                return self.call(t)
            if t.text in KEYWORDS:
                raise self.error(f"keyword {t.text!r} cannot be used in an expression", t)
            return Name(t.text, (t.start, t.end))
        if self.at("OP", "("):
            opener = self.advance()
            inner = self.expr()
            closer = self.close(opener)
            # parentheses are not kept in the AST; widen the span to include them
            return _respan(inner, (opener.start, closer.end))
        if t.kind == "EOF":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {t.text!r}")

    def call(self, name: Token) -> Expr:
        if name.text not in FUNCTIONS:
            raise UnknownIdentifier(f"unknown function {name.text!r}", self.source, (name.start, name.end))
        opener = self.advance()
        args = [self.expr()]
        while self.at("OP", ","):
            self.advance()
            args.append(self.expr())
        closer = self.close(opener)
        span = (name.start, closer.end)
        if len(args) != FUNCTIONS[name.text]:
            raise ArityError(
                f"{name.text} takes {FUNCTIONS[name.text]} argument(s), got {len(args)}", self.source, span
            )
        return Call(name.text, tuple(args), span)

    # statements -----------------------------------------------------------

    def skip_separators(self):
        while self.at("SEP"):
            self.advance()

    def end_statement(self):
        if not (self.at("SEP") or self.at("EOF")):
            raise self.error(f"expected end of statement, found {self.tok.text!r}")

    def statement(self):
        t = self.tok
        if self.at("IDENT", "dim"):
            self.advance()
            n_tok = self.expect("NUMBER", what="chart dimension")
            self.expect("OP", "->")
            m_tok = self.expect("NUMBER", what="ambient dimension")
            names = []
            if self.at("IDENT", "vars"):
                self.advance()
                names.append(self.expect("IDENT", what="variable name"))
                while self.at("OP", ","):
                    self.advance()
                    names.append(self.expect("IDENT", what="variable name"))
            return ("dim", t, n_tok, m_tok, names)
        if self.at("IDENT", "const"):
            self.advance()
            name = self.expect("IDENT", what="constant name")
            self.expect("OP", "=")
            return ("const", name, self.expr())
        nxt = self.tokens[self.pos + 1]
        if t.kind == "IDENT" and nxt.text == "in":
            self.advance()
            self.advance()
            opener = self.expect("OP", "[")
            lo = self.expr()
            self.expect("OP", ",")
            hi = self.expr()
            closer = self.close(opener)
            return ("in", t, lo, hi, (opener.start, closer.end))
        if t.kind == "IDENT" and nxt.text == "=":
            self.advance()
            self.advance()
            opener = self.expect("OP", "[")
            comps = [self.expr()]
            while self.at("OP", ","):
                self.advance()
                comps.append(self.expr())
            closer = self.close(opener)
            return ("x", t, comps, (t.start, closer.end))
        raise self.error(f"unexpected {t.text!r} at start of statement" if t.text else "unexpected input")

    def program(self) -> ImmersionSpec:
        statements = []
        while True:
            self.skip_separators()
            if self.at("EOF"):
                break
            statements.append(self.statement())
            self.end_statement()
        return self.validate(statements)

    def validate(self, statements) -> ImmersionSpec:
        src = self.source
        if not statements or statements[0][0] != "dim":
            tok = statements[0][1] if statements else self.tok
            raise self.error("description must start with a 'dim n -> m' header", tok)
        _, header, n_tok, m_tok, names = statements[0]
        n, m = _as_int(self, n_tok), _as_int(self, m_tok)
        if not m >= n >= 1:
            raise SpecError("dimensions must satisfy m >= n >= 1", src, (header.start, m_tok.end))
        variables = default_variables(n)
        if names:
            span = (names[0].start, names[-1].end)
            if len(names) != n:
                raise SpecError(f"expected {n} variable names, got {len(names)}", src, span)
            variables = tuple(t.text for t in names)
            if len(set(variables)) != n:
                raise SpecError("duplicate variable name", src, span)
            for t in names:
                if t.text in KEYWORDS or t.text in BUILTIN_CONSTANTS:
                    raise SpecError(f"{t.text!r} is reserved", src, (t.start, t.end))

        constants: dict[str, float] = {}
        components = None
        domain: dict[str, tuple[float, float]] = {}
        env = dict(BUILTIN_CONSTANTS)
        x_span = (header.start, header.end)
        for st in statements[1:]:
            kind, tok = st[0], st[1]
            if kind == "dim":
                raise SpecError("duplicate 'dim' header", src, (tok.start, tok.end))
            if kind == "const":
                if tok.text in variables or tok.text in env or tok.text in KEYWORDS:
                    raise SpecError(f"name {tok.text!r} already defined", src, (tok.start, tok.end))
                self._check_names(st[2], set(env))
                constants[tok.text] = env[tok.text] = eval_constant(st[2], env)
            elif kind == "in":
                _, var, lo_expr, hi_expr, span = st
                if var.text not in variables:
                    raise UnknownIdentifier(f"{var.text!r} is not a chart variable", src, (var.start, var.end))
                if var.text in domain:
                    raise SpecError(f"domain of {var.text!r} given twice", src, (var.start, var.end))
                self._check_names(lo_expr, set(env))
                self._check_names(hi_expr, set(env))
                lo, hi = eval_constant(lo_expr, env), eval_constant(hi_expr, env)
                if not hi > lo:
                    raise SpecError("domain interval must have positive length", src, span)
                domain[var.text] = (lo, hi)
            else:
                if tok.text != "x":
                    raise UnknownIdentifier(f"unknown statement target {tok.text!r}; expected 'x'", src, (tok.start, tok.end))
                if components is not None:
                    raise SpecError("x defined twice", src, (tok.start, tok.end))
                components, x_span = st[2], st[3]

        if components is None:
            raise SpecError("missing 'x = [...]' definition", src, (header.start, header.end))
        if len(components) != m:
            raise SpecError(f"x has {len(components)} components but ambient dimension is {m}", src, x_span)
        allowed = set(variables) | set(env)
        for c in components:
            self._check_names(c, allowed, variables)
        for v in variables:
            if v not in domain:
                raise SpecError(f"missing domain for variable {v!r}", src, (header.start, header.end))
        return ImmersionSpec(
            chart_dim=n,
            ambient_dim=m,
            variables=variables,
            components=tuple(components),
            constants=constants,
            domain=tuple(domain[v] for v in variables),
            source=src,
        )

    def _check_names(self, node: Expr, allowed: set[str], variables: tuple[str, ...] = ()):
        for sub in _walk(node):
            if isinstance(sub, Name) and sub.name not in allowed:
                raise UnknownIdentifier(f"{sub.name!r} is not defined", self.source, sub.span)
            if isinstance(sub, Call) and sub.func == "pow" and names_in(sub.args[1]) & set(variables):
                raise SpecError("pow exponent must be constant", self.source, sub.args[1].span)


def _walk(node: Expr):
    yield node
    if isinstance(node, Unary):
        yield from _walk(node.operand)
    elif isinstance(node, Binary):
        yield from _walk(node.left)
        yield from _walk(node.right)
    elif isinstance(node, Call):
        for a in node.args:
            yield from _walk(a)


def _respan(node: Expr, span) -> Expr:
    return type(node)(*[getattr(node, f) for f in node.__dataclass_fields__ if f != "span"], span)


def _as_int(p: _Parser, tok: Token) -> int:
    try:
        return int(tok.text)
    except ValueError:
        raise p.error("dimension must be an integer", tok) from None


def parse_immersion(text: str) -> ImmersionSpec:
    """Parse a ``.imm`` description into an :class:`ImmersionSpec`."""
    return _Parser(text).program()


def parse_expression(text: str) -> Expr:
    """Parse a single expression (no name resolution)."""
    p = _Parser(text)
    node = p.expr()
    if not p.at("EOF"):
        raise p.error(f"unexpected {p.tok.text!r} after expression")
    return node
