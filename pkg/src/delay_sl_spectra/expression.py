"""
Tiny arithmetic language for the coefficient functions q(x) and delay(x).

Grammar (whitespace is ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' factor)?          # right-associative
    atom   := number | 'x' | 'pi' | '-' atom
            | func '(' expr ')' | '(' expr ')'
    func   := 'sin' | 'cos' | 'abs'

Unary minus binds tighter than '^', so ``-x^2`` is ``(-x)^2``.

Trees are immutable and hashable; :func:`evaluate` works on floats and on
numpy arrays alike.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, MalformedExpression, UnknownIdentifier

__all__ = [
    "Num", "Var", "Pi", "Neg", "Call", "BinOp", "Node", "CoefficientExpr",
    "parse", "evaluate", "render", "depth", "numeric_derivative",
]

FUNCTIONS = ("sin", "cos", "abs")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Num, Var, Pi, Neg, Call, BinOp]


@dataclass(frozen=True)
class CoefficientExpr:
    """A parsed coefficient function together with its source text."""

    ast: Node
    text: str = ""

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return render(self.ast)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.ast, Num) and self.ast.value == 0.0


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()−])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise MalformedExpression(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if value == "−":
            value = "-"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            what = "end of input" if kind == "end" else repr(value)
            raise MalformedExpression(f"expected {op!r}, found {what}", pos)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise MalformedExpression(f"unexpected token {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = BinOp(value, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.factor())
            else:
                return node

    def factor(self):
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "name":
            self.advance()
            if value == "x":
                return Var()
            if value == "pi":
                return Pi()
            if value in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            raise UnknownIdentifier(value, pos)
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.atom())
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        what = "end of input" if kind == "end" else repr(value)
        raise MalformedExpression(f"expected operand, found {what}", pos)


def parse(text: str) -> CoefficientExpr:
    """Parse ``text`` into a :class:`CoefficientExpr`.

    Raises :class:`MalformedExpression` (with ``.position``) or
    :class:`UnknownIdentifier`.
    """
    return CoefficientExpr(_Parser(text).parse(), text)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render(node) -> str:
    """Canonical, fully parenthesized text; ``parse(render(t)).ast == t``."""
    if isinstance(node, CoefficientExpr):
        node = node.ast
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Neg):
        return f"(-{render(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({render(node.arg)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    raise TypeError(f"not an expression node: {node!r}")


def depth(node) -> int:
    """Longest root-to-leaf path, counted in edges (a leaf has depth 0)."""
    if isinstance(node, CoefficientExpr):
        node = node.ast
    if isinstance(node, Neg):
        return 1 + depth(node.operand)
    if isinstance(node, Call):
        return 1 + depth(node.arg)
    if isinstance(node, BinOp):
        return 1 + max(depth(node.left), depth(node.right))
    return 0


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

_UFUNCS = {"sin": np.sin, "cos": np.cos, "abs": np.abs}


def _power(a, b):
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    bad = (a_arr < 0) & (b_arr != np.round(b_arr))
    if np.any(bad):
        raise DomainError("negative base raised to a non-integer power")
    if np.any((a_arr == 0) & (b_arr < 0)):
        raise DomainError("division by zero (zero raised to a negative power)")
    return np.power(a_arr, b_arr)


def _eval(node, x):
    if isinstance(node, Num):
        return np.full_like(x, node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Pi):
        return np.full_like(x, math.pi)
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        return _UFUNCS[node.func](_eval(node.arg, x))
    op = node.op
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if np.any(b == 0):
            raise DomainError("division by zero")
        return a / b
    return _power(a, b)


def evaluate(e, x):
    """Evaluate ``e`` at ``x`` (scalar or array); scalars give a float."""
    if isinstance(e, str):
        e = parse(e)
    node = e.ast if isinstance(e, CoefficientExpr) else e
    xa = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(node, xa)
    if np.ndim(x) == 0:
        return float(out)
    return out


def numeric_derivative(e, x, order: int = 1, h: float = 1e-5):
    """Central difference of ``e`` at ``x`` of the given order (1 or 2)."""
    if isinstance(e, str):
        e = parse(e)
    x = np.asarray(x, dtype=float)
    if order == 1:
        out = (evaluate(e, x + h) - evaluate(e, x - h)) / (2.0 * h)
    elif order == 2:
        out = (evaluate(e, x + h) - 2.0 * evaluate(e, x) + evaluate(e, x - h)) / (h * h)
    else:
        raise ValueError("order must be 1 or 2")
    return float(out) if np.ndim(out) == 0 else out
