"""Scalar expression trees for implicit device characteristics.

Expressions are parsed from a small infix grammar (precedence ``^`` >
unary ``-`` > ``* /`` > ``+ -``, left associative), evaluated against
name bindings and differentiated symbolically.  Numeric literals are
kept as exact fractions so downstream polynomial identities can be
checked with equality rather than tolerances; transcendental functions
fall back to floats at evaluation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

Number = Union[Fraction, int, float]

# Names treated as device variables by the parser; everything else is a
# parameter reference.
DEVICE_VARIABLES = frozenset({"i", "v", "sigma", "phi"})

FUNCTIONS = ("sin", "cos", "exp", "tanh", "ln")

_MATH_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "tanh": math.tanh,
    "ln": math.log,
}


class ExprError(ValueError):
    """Parse or evaluation failure, with a byte offset when available."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    is_param: bool


@dataclass(frozen=True)
class Unary:
    op: str  # neg | sin | cos | exp | tanh | ln
    arg: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Power:
    base: "Expression"
    exponent: int  # any nonzero integer, positive or negative


Expression = Union[Const, Name, Unary, Binary, Power]

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


# ---------------------------------------------------------------------------
# Tokenizer / parser


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            start = pos
            while pos < n and (text[pos].isdigit() or text[pos] == "."):
                pos += 1
            # optional exponent part: 1e-3
            if pos < n and text[pos] in "eE":
                look = pos + 1
                if look < n and text[look] in "+-":
                    look += 1
                if look < n and text[look].isdigit():
                    pos = look
                    while pos < n and text[pos].isdigit():
                        pos += 1
            tokens.append(_Token("num", text[start:pos], start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(_Token("name", text[start:pos], start))
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, pos))
            pos += 1
            continue
        raise ExprError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], variables: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprError(f"expected {text!r}", tok.offset)
        return self.advance()

    def parse_expr(self) -> Expression:
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.parse_term()
            node = _fold_binary("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term(self) -> Expression:
        node = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.parse_unary()
            node = _fold_binary("mul" if op == "*" else "div", node, rhs)
        return node

    def parse_unary(self) -> Expression:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            arg = self.parse_unary()
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Unary("neg", arg)
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            sign = 1
            tok = self.peek()
            if tok.kind == "op" and tok.text == "-":
                sign = -1
                self.advance()
                tok = self.peek()
            if tok.kind != "num" or not tok.text.isdigit():
                raise ExprError("exponent must be an integer literal", tok.offset)
            self.advance()
            exponent = sign * int(tok.text)
            if isinstance(base, Const):
                if base.value == 0 and exponent < 0:
                    raise ExprError("zero raised to a negative power", tok.offset)
                return Const(base.value ** exponent)
            return Power(base, exponent)
        return base

    def parse_atom(self) -> Expression:
        tok = self.advance()
        if tok.kind == "num":
            return Const(Fraction(tok.text))
        if tok.kind == "name":
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in _MATH_FUNCS:
                    raise ExprError(f"unknown function {tok.text!r}", tok.offset)
                self.advance()
                arg = self.parse_expr()
                self.expect(")")
                return Unary(tok.text, arg)
            return Name(tok.text, tok.text not in self.variables)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ExprError("unexpected end of expression" if tok.kind == "end"
                        else f"unexpected token {tok.text!r}", tok.offset)


def _fold_binary(op: str, left: Expression, right: Expression) -> Expression:
    # Constant subexpressions are folded so printed fractions like "1/2"
    # re-parse to the same node (round-trip property).
    if isinstance(left, Const) and isinstance(right, Const):
        if op == "add":
            return Const(left.value + right.value)
        if op == "sub":
            return Const(left.value - right.value)
        if op == "mul":
            return Const(left.value * right.value)
        if right.value == 0:
            raise ExprError("division by zero in constant expression")
        return Const(left.value / right.value)
    return Binary(op, left, right)


def parse_expr(text: str, variables: frozenset[str] = DEVICE_VARIABLES) -> Expression:
    """Parse an infix expression; names outside `variables` become parameters."""
    if not text or not text.strip():
        raise ExprError("empty expression", 0)
    parser = _Parser(_tokenize(text), variables)
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprError(f"trailing input {tok.text!r}", tok.offset)
    return node


# ---------------------------------------------------------------------------
# Evaluation


def free_names(e: Expression) -> frozenset[str]:
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Name):
        return frozenset({e.name})
    if isinstance(e, Unary):
        return free_names(e.arg)
    if isinstance(e, Power):
        return free_names(e.base)
    return free_names(e.left) | free_names(e.right)


def evaluate(e: Expression, bindings: Mapping[str, Number]) -> Number:
    """Evaluate `e` at the given bindings.

    Arithmetic stays exact (Fraction) when every binding is exact and no
    transcendental function occurs on the evaluation path.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Name):
        try:
            return bindings[e.name]
        except KeyError:
            raise ExprError(f"unbound name {e.name!r}") from None
    if isinstance(e, Unary):
        x = evaluate(e.arg, bindings)
        if e.op == "neg":
            return -x
        if e.op == "ln" and x <= 0:
            raise ExprError(f"ln of non-positive value {x}")
        return _MATH_FUNCS[e.op](float(x))
    if isinstance(e, Power):
        base = evaluate(e.base, bindings)
        if e.exponent < 0 and base == 0:
            raise ExprError("zero raised to a negative power")
        return base ** e.exponent
    left = evaluate(e.left, bindings)
    right = evaluate(e.right, bindings)
    if e.op == "add":
        return left + right
    if e.op == "sub":
        return left - right
    if e.op == "mul":
        return left * right
    if right == 0:
        raise ExprError("division by zero")
    if isinstance(left, int):
        left = Fraction(left)
    return left / right


# ---------------------------------------------------------------------------
# Differentiation


def _add(a: Expression, b: Expression) -> Expression:
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return _fold_binary("add", a, b)


def _sub(a: Expression, b: Expression) -> Expression:
    if b == ZERO:
        return a
    if a == ZERO:
        return Const(-b.value) if isinstance(b, Const) else Unary("neg", b)
    return _fold_binary("sub", a, b)


def _mul(a: Expression, b: Expression) -> Expression:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return _fold_binary("mul", a, b)


def _div(a: Expression, b: Expression) -> Expression:
    if a == ZERO:
        return ZERO
    if b == ONE:
        return a
    return _fold_binary("div", a, b)


def diff(e: Expression, name: str) -> Expression:
    """Exact symbolic partial derivative of `e` with respect to `name`."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Name):
        return ONE if e.name == name else ZERO
    if isinstance(e, Unary):
        darg = diff(e.arg, name)
        if e.op == "neg":
            return _sub(ZERO, darg)
        if e.op == "sin":
            return _mul(Unary("cos", e.arg), darg)
        if e.op == "cos":
            return _sub(ZERO, _mul(Unary("sin", e.arg), darg))
        if e.op == "exp":
            return _mul(Unary("exp", e.arg), darg)
        if e.op == "tanh":
            return _mul(_sub(ONE, Power(Unary("tanh", e.arg), 2)), darg)
        # ln
        return _div(darg, e.arg)
    if isinstance(e, Power):
        dbase = diff(e.base, name)
        if dbase == ZERO:
            return ZERO
        inner = e.base if e.exponent == 2 else Power(e.base, e.exponent - 1)
        if e.exponent == 1:
            inner = ONE
        return _mul(Const(Fraction(e.exponent)), _mul(inner, dbase))
    dl = diff(e.left, name)
    dr = diff(e.right, name)
    if e.op == "add":
        return _add(dl, dr)
    if e.op == "sub":
        return _sub(dl, dr)
    if e.op == "mul":
        return _add(_mul(dl, e.right), _mul(e.left, dr))
    # quotient rule
    num = _sub(_mul(dl, e.right), _mul(e.left, dr))
    return _div(num, Power(e.right, 2))


# ---------------------------------------------------------------------------
# Printing


def _const_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    # parenthesized so the literal survives re-parsing as one operand
    return f"({value.numerator}/{value.denominator})"


def to_text(e: Expression) -> str:
    """Fully parenthesized canonical form; re-parses to an equal tree."""
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, Power):
        return f"({to_text(e.base)}^{e.exponent})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[e.op]
    return f"({to_text(e.left)} {sym} {to_text(e.right)})"
