"""Small expression language for real functions of one variable.

Node kinds: rational constants, the variable `x`, named parameters,
`+ - * / ^` with standard precedence (left-associative except `^`,
which is right-associative), unary minus, and the functions `exp(.)`
and `ln(.)`. There is no implicit multiplication; the grammar is
documented in docs/grammar.ebnf.

Powers with a non-integer exponent are evaluated as exp(v*ln(u)) and
require u > 0; integer exponents go through repeated multiplication so
that negative bases stay legal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from mpmath import mp

from .core import DEFAULT_PRECISION, Interval, Numeric, as_fraction, as_mpf, workprec
from .errors import (
    DivisionByZero,
    DomainError,
    InvalidParameter,
    ParseError,
    UnboundParameter,
)

_ARITY = {
    "const": 0,
    "var": 0,
    "param": 0,
    "add": 2,
    "sub": 2,
    "mul": 2,
    "div": 2,
    "pow": 2,
    "neg": 1,
    "exp": 1,
    "ln": 1,
}


@dataclass(frozen=True)
class Expr:
    """Immutable AST node; safe to share between concurrent evaluations."""

    kind: str
    children: tuple["Expr", ...] = ()
    value: Fraction | None = None
    name: str | None = None

    def __post_init__(self):
        arity = _ARITY.get(self.kind)
        if arity is None:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if len(self.children) != arity:
            raise ValueError(f"{self.kind} node needs {arity} children, got {len(self.children)}")
        if (self.kind == "const") != (self.value is not None):
            raise ValueError("value is set exactly on const nodes")
        if (self.kind == "param") != (self.name is not None):
            raise ValueError("name is set exactly on param nodes")

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(value) -> "Expr":
        return Expr("const", value=as_fraction(value))

    @staticmethod
    def signed_const(value) -> "Expr":
        """Constant that prints within the grammar: negatives become neg(|v|)."""
        q = as_fraction(value)
        return Expr.neg(Expr.const(-q)) if q < 0 else Expr.const(q)

    @staticmethod
    def var() -> "Expr":
        return Expr("var")

    @staticmethod
    def param(name: str) -> "Expr":
        return Expr("param", name=name)

    @staticmethod
    def add(a: "Expr", b: "Expr") -> "Expr":
        return Expr("add", (a, b))

    @staticmethod
    def sub(a: "Expr", b: "Expr") -> "Expr":
        return Expr("sub", (a, b))

    @staticmethod
    def mul(a: "Expr", b: "Expr") -> "Expr":
        return Expr("mul", (a, b))

    @staticmethod
    def div(a: "Expr", b: "Expr") -> "Expr":
        return Expr("div", (a, b))

    @staticmethod
    def pow(base: "Expr", exponent: "Expr") -> "Expr":
        return Expr("pow", (base, exponent))

    @staticmethod
    def neg(a: "Expr") -> "Expr":
        return Expr("neg", (a,))

    @staticmethod
    def exp(a: "Expr") -> "Expr":
        return Expr("exp", (a,))

    @staticmethod
    def ln(a: "Expr") -> "Expr":
        return Expr("ln", (a,))

    # -- queries -------------------------------------------------------

    def parameters(self) -> frozenset[str]:
        names: set[str] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == "param":
                names.add(node.name)
            stack.extend(node.children)
        return frozenset(names)

    def contains_var(self) -> bool:
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == "var":
                return True
            stack.extend(node.children)
        return False

    def __str__(self) -> str:
        return to_text(self)


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable with `replacement`."""
    if e.kind == "var":
        return replacement
    if not e.children:
        return e
    return Expr(e.kind, tuple(substitute(c, replacement) for c in e.children),
                value=e.value, name=e.name)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_OPS = frozenset(b"+-*/^()")
_FUNCTIONS = ("exp", "ln")


class _Token(NamedTuple):
    kind: str  # number | ident | op | eof
    text: str
    offset: int  # byte offset into the UTF-8 input


def _tokenize(data: bytes) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(data)
    while i < n:
        c = data[i]
        if c in b" \t\r\n":
            i += 1
            continue
        if c in _OPS:
            tokens.append(_Token("op", chr(c), i))
            i += 1
            continue
        if 0x30 <= c <= 0x39:  # digit
            j = i
            while j < n and 0x30 <= data[j] <= 0x39:
                j += 1
            if j < n and data[j] == 0x2E:  # '.'
                j += 1
                if j >= n or not (0x30 <= data[j] <= 0x39):
                    raise ParseError("digit must follow decimal point", j, ("number",))
                while j < n and 0x30 <= data[j] <= 0x39:
                    j += 1
            tokens.append(_Token("number", data[i:j].decode("ascii"), i))
            i = j
            continue
        if c == 0x5F or 0x41 <= c <= 0x5A or 0x61 <= c <= 0x7A:  # [A-Za-z_]
            j = i
            while j < n and (data[j] == 0x5F or 0x30 <= data[j] <= 0x39
                             or 0x41 <= data[j] <= 0x5A or 0x61 <= data[j] <= 0x7A):
                j += 1
            tokens.append(_Token("ident", data[i:j].decode("ascii"), i))
            i = j
            continue
        raise ParseError(f"unexpected byte {bytes([c])!r}", i,
                         ("number", "identifier", "operator"))
    tokens.append(_Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.advance()
        raise ParseError(f"got {tok.text or 'end of input'!r}", tok.offset, (f"'{op}'",))

    def expression(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = Expr.add(node, rhs) if op == "+" else Expr.sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.factor()
            node = Expr.mul(node, rhs) if op == "*" else Expr.div(node, rhs)
        return node

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Expr.neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return Expr.pow(base, self.factor())  # right-associative
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "number":
            return Expr.const(Fraction(tok.text))
        if tok.kind == "ident":
            if tok.text in _FUNCTIONS:
                self.expect_op("(")
                inner = self.expression()
                self.expect_op(")")
                return Expr.exp(inner) if tok.text == "exp" else Expr.ln(inner)
            if tok.text == "x":
                return Expr.var()
            return Expr.param(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        raise ParseError(f"got {tok.text or 'end of input'!r}", tok.offset,
                         ("number", "identifier", "'('", "'-'"))


def parse(text: str) -> Expr:
    """Parse expression text into its unique AST.

    Raises ParseError with a byte offset and the expected token set.
    """
    tokens = _tokenize(text.encode("utf-8"))
    parser = _Parser(tokens)
    node = parser.expression()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.offset, ("end of input",))
    return node


# ---------------------------------------------------------------------------
# Printing (inverse of parse on grammar-producible ASTs)
# ---------------------------------------------------------------------------

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 10, 20, 30, 40, 50


def _const_text(q: Fraction) -> str:
    # The grammar has integer and decimal literals only. Other denominators
    # print as a parenthesized quotient, which evaluates identically but
    # re-parses as a div node.
    if q < 0:
        return "-" + _const_text(-q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        k = max(twos, fives)
        digits = str(q.numerator * 10**k // q.denominator).rjust(k + 1, "0")
        return f"{digits[:-k]}.{digits[-k:]}"
    return f"({q.numerator}/{q.denominator})"


def _fmt(e: Expr) -> tuple[str, int]:
    kind = e.kind
    if kind == "const":
        text = _const_text(e.value)
        return text, (_LEVEL_NEG if text.startswith("-") else _LEVEL_ATOM)
    if kind == "var":
        return "x", _LEVEL_ATOM
    if kind == "param":
        return e.name, _LEVEL_ATOM
    if kind in ("exp", "ln"):
        inner, _ = _fmt(e.children[0])
        return f"{kind}({inner})", _LEVEL_ATOM
    if kind == "neg":
        text, level = _fmt(e.children[0])
        if level < _LEVEL_NEG:
            text = f"({text})"
        return "-" + text, _LEVEL_NEG
    if kind in ("add", "sub"):
        op = "+" if kind == "add" else "-"
        left, llev = _fmt(e.children[0])
        right, rlev = _fmt(e.children[1])
        if llev < _LEVEL_ADD:
            left = f"({left})"
        if rlev <= _LEVEL_ADD:  # left-associative: parenthesize equal level on the right
            right = f"({right})"
        return f"{left}{op}{right}", _LEVEL_ADD
    if kind in ("mul", "div"):
        op = "*" if kind == "mul" else "/"
        left, llev = _fmt(e.children[0])
        right, rlev = _fmt(e.children[1])
        if llev < _LEVEL_MUL:
            left = f"({left})"
        if rlev <= _LEVEL_MUL:
            right = f"({right})"
        return f"{left}{op}{right}", _LEVEL_MUL
    if kind == "pow":
        left, llev = _fmt(e.children[0])
        right, rlev = _fmt(e.children[1])
        if llev < _LEVEL_ATOM:  # base must be an atom
            left = f"({left})"
        if rlev < _LEVEL_NEG:  # exponent may be a sign, a power or an atom
            right = f"({right})"
        return f"{left}^{right}", _LEVEL_POW
    raise ValueError(f"unknown node kind {kind!r}")


def to_text(e: Expr) -> str:
    """Render an AST back to expression text; parse(to_text(e)) == e for
    ASTs whose constants are nonnegative decimal-representable rationals."""
    return _fmt(e)[0]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    """Parameter values plus the working precision used to realize them."""

    values: Mapping[str, Numeric] = field(default_factory=dict)
    precision: int = DEFAULT_PRECISION

    def get(self, name: str):
        if name not in self.values:
            raise UnboundParameter(f"parameter {name!r} has no bound value")
        return as_mpf(self.values[name])


_EMPTY_BINDING = Binding()

_MAX_INT_EXPONENT = 1 << 31


def _pow_scalar(base, exponent):
    if exponent == mp.floor(exponent) and abs(exponent) < _MAX_INT_EXPONENT:
        n = int(exponent)
        if base == 0 and n <= 0:
            raise DomainError(f"zero base with nonpositive exponent {n}")
        return base**n
    if base == 0:
        raise DomainError("zero base with non-integer exponent")
    if base < 0:
        raise DomainError("non-integer power of a negative base")
    return mp.exp(exponent * mp.ln(base))


def evaluate(e: Expr, x: Numeric, binding: Binding | None = None):
    """Evaluate at the point x under the binding's precision.

    ln and non-integer pow of a nonpositive argument raise DomainError
    instead of going complex; exact zero denominators raise DivisionByZero.
    """
    b = binding if binding is not None else _EMPTY_BINDING
    with workprec(b.precision):
        return _eval(e, as_mpf(x), b)


def _eval(e: Expr, x, b: Binding):
    kind = e.kind
    if kind == "const":
        return as_mpf(e.value)
    if kind == "var":
        return x
    if kind == "param":
        return b.get(e.name)
    if kind == "neg":
        return -_eval(e.children[0], x, b)
    if kind == "exp":
        return mp.exp(_eval(e.children[0], x, b))
    if kind == "ln":
        arg = _eval(e.children[0], x, b)
        if arg <= 0:
            raise DomainError(f"ln of nonpositive value {mp.nstr(arg, 8)}")
        return mp.ln(arg)
    left = _eval(e.children[0], x, b)
    right = _eval(e.children[1], x, b)
    if kind == "add":
        return left + right
    if kind == "sub":
        return left - right
    if kind == "mul":
        return left * right
    if kind == "div":
        if right == 0:
            raise DivisionByZero("division by exact zero")
        return left / right
    if kind == "pow":
        return _pow_scalar(left, right)
    raise ValueError(f"unknown node kind {kind!r}")


# ---------------------------------------------------------------------------
# The two-parameter power family (1 + a/x)^(x+b)
# ---------------------------------------------------------------------------

class PowerExpr(NamedTuple):
    """AST of (1+a/x)^(x+b) (or its reciprocal) with its admissible intervals."""

    expr: Expr
    upper_interval: Interval  # (max(0,-a), inf)
    lower_interval: Interval  # (-inf, min(0,-a))


def _shift_var(offset: Fraction) -> Expr:
    if offset == 0:
        return Expr.var()
    if offset > 0:
        return Expr.add(Expr.var(), Expr.const(offset))
    return Expr.sub(Expr.var(), Expr.const(-offset))


def make_power_expr(alpha: Numeric, beta: Numeric, reciprocal: bool = False) -> PowerExpr:
    """Build (1+alpha/x)^(x+beta), negating the exponent when `reciprocal`.

    Admissible domain: x > max(0,-alpha) or x < min(0,-alpha), returned as
    the two open intervals alongside the AST. Raises InvalidParameter when
    alpha = 0.
    """
    a = as_fraction(alpha)
    b = as_fraction(beta)
    if a == 0:
        raise InvalidParameter("alpha must be nonzero")
    if a > 0:
        base = Expr.add(Expr.const(1), Expr.div(Expr.const(a), Expr.var()))
    else:
        base = Expr.sub(Expr.const(1), Expr.div(Expr.const(-a), Expr.var()))
    exponent = _shift_var(b)
    if reciprocal:
        exponent = Expr.neg(exponent)
    return PowerExpr(
        expr=Expr.pow(base, exponent),
        upper_interval=Interval(max(Fraction(0), -a), None),
        lower_interval=Interval(None, min(Fraction(0), -a)),
    )
