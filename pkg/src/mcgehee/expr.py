"""Tiny expression language for shape potentials V(theta).

Grammar (whitespace insignificant, ``^`` binds tightest and associates right):

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := "-" factor | primary ("^" factor)?
    primary := number | "pi" | "theta" | ident | ident "(" expr ")" | "(" expr ")"

``theta`` is the independent variable; any other bare identifier becomes a
named parameter that must be bound before evaluation.  Function calls are
restricted to the table in :data:`FUNCTIONS`.  Exponents may be arbitrary
subexpressions as long as they do not depend on ``theta`` (they are constant
by the time the jet arithmetic sees them).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from . import jets
from .errors import ParseError, UnboundParameterError, UnknownFunctionError
from .jets import Jet2

__all__ = ["parse", "free_parameters", "to_source", "compile_node", "FUNCTIONS"]

FUNCTIONS: dict[str, Callable] = {
    "cos": jets.cos,
    "sin": jets.sin,
    "tan": jets.tan,
    "sqrt": jets.sqrt,
    "exp": jets.exp,
    "log": jets.log,
    "abs": abs,
}


# ------------------------------------------------------------------- AST
@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Theta:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


@dataclass(frozen=True)
class Neg:
    child: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


Node = Union[Num, Pi, Theta, Param, Call, Neg, BinOp, Pow]


# ------------------------------------------------------------------- lexer
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", len(text) - len(stripped))
        if m.lastgroup is not None:
            tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected {value!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                node = BinOp(value, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                node = BinOp(value, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return Neg(self.factor())
        node = self.primary()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.next()
            return Pow(node, self.factor())
        return node

    def primary(self) -> Node:
        kind, value, pos = self.next()
        if kind == "num":
            return Num(float(value))
        if kind == "ident":
            if value == "pi":
                return Pi()
            if value == "theta":
                return Theta()
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "(":
                if value not in FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {value!r}", pos)
                self.next()
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            return Param(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, got {value!r}" if kind else "unexpected end of input", pos)


def parse(text: str) -> Node:
    """Parse expression source into an AST."""
    return _Parser(text).parse()


def free_parameters(node: Node) -> set[str]:
    """Names of all parameters referenced by the expression."""
    out: set[str] = set()
    _walk_params(node, out)
    return out


def _walk_params(node: Node, out: set[str]):
    if isinstance(node, Param):
        out.add(node.name)
    elif isinstance(node, Call):
        _walk_params(node.arg, out)
    elif isinstance(node, Neg):
        _walk_params(node.child, out)
    elif isinstance(node, BinOp):
        _walk_params(node.left, out)
        _walk_params(node.right, out)
    elif isinstance(node, Pow):
        _walk_params(node.base, out)
        _walk_params(node.exponent, out)


# ------------------------------------------------------------------- printer
_PREC_ATOM, _PREC_POW, _PREC_MULDIV, _PREC_ADDSUB = 9, 3, 2, 1


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC_MULDIV if node.op in "*/" else _PREC_ADDSUB
    if isinstance(node, Neg):
        return _PREC_MULDIV
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(node: Node, minimum: int) -> str:
    s = to_source(node)
    return f"({s})" if _prec(node) < minimum else s


def to_source(node: Node) -> str:
    """Render an AST back to parseable source.  Parenthesisation is chosen so
    that re-parsing reproduces the same evaluation order bit for bit."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Theta):
        return "theta"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.child, _PREC_POW)
    if isinstance(node, BinOp):
        p = _prec(node)
        return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _PREC_ATOM)}^{_wrap(node.exponent, _PREC_POW)}"
    raise TypeError(f"not an expression node: {node!r}")


# ------------------------------------------------------------------- compile
def compile_node(node: Node, params: dict[str, float]) -> Callable[[Jet2], Jet2]:
    """Bind parameters and build a jet-in, jet-out evaluator closure."""
    if isinstance(node, Num):
        c = node.value
        return lambda th, c=c: Jet2.constant(c)
    if isinstance(node, Pi):
        return lambda th: Jet2.constant(math.pi)
    if isinstance(node, Theta):
        return lambda th: th
    if isinstance(node, Param):
        if node.name not in params:
            raise UnboundParameterError(f"parameter {node.name!r} has no bound value")
        c = float(params[node.name])
        return lambda th, c=c: Jet2.constant(c)
    if isinstance(node, Call):
        f, g = FUNCTIONS[node.fn], compile_node(node.arg, params)
        return lambda th: f(g(th))
    if isinstance(node, Neg):
        g = compile_node(node.child, params)
        return lambda th: -g(th)
    if isinstance(node, BinOp):
        lf, rf = compile_node(node.left, params), compile_node(node.right, params)
        op = node.op
        if op == "+":
            return lambda th: lf(th) + rf(th)
        if op == "-":
            return lambda th: lf(th) - rf(th)
        if op == "*":
            return lambda th: lf(th) * rf(th)
        return lambda th: lf(th) / rf(th)
    if isinstance(node, Pow):
        bf, ef = compile_node(node.base, params), compile_node(node.exponent, params)
        return lambda th: bf(th) ** ef(th)
    raise TypeError(f"not an expression node: {node!r}")
