"""Parser and evaluator for the scalar expressions used as potentials and inputs.

The grammar covers real literals, the variable ``x``, the constant ``pi``,
unary minus, the binary operators ``+ - * / ^`` (``^`` right-associative,
binding above ``*``/``/`` and above unary minus) and the functions
``sin``, ``cos``, ``exp``, ``sqrt``, ``abs``, ``sign``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ExpressionSyntaxError

_FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs", "sign")

_SCALAR_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
    "sign": lambda v: float((v > 0) - (v < 0)),
}

_ARRAY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sign": np.sign,
}


@dataclass(frozen=True)
class Node:
    """AST node; ``start``/``end`` delimit the source slice for error reports."""

    start: int
    end: int


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class Bin(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


class Expression:
    """Immutable parsed expression in the single variable ``x``."""

    __slots__ = ("text", "root")

    def __init__(self, text: str, root: Node):
        object.__setattr__(self, "text", text)
        object.__setattr__(self, "root", root)

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    def __call__(self, x):
        return eval_expression(self, x)

    def __str__(self):
        return _unparse(self.root)

    def __repr__(self):
        return f"Expression({self.text!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and _strip_spans(self.root) == _strip_spans(other.root)

    def __hash__(self):
        return hash(_strip_spans(self.root))


def _strip_spans(node: Node):
    if isinstance(node, Num):
        return ("num", node.value)
    if isinstance(node, Var):
        return ("var",)
    if isinstance(node, Neg):
        return ("neg", _strip_spans(node.operand))
    if isinstance(node, Bin):
        return ("bin", node.op, _strip_spans(node.left), _strip_spans(node.right))
    return ("call", node.func, _strip_spans(node.arg))


# ---------------------------------------------------------------------------
# Tokenizer

def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", offset=i)
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ExpressionSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}" if tok[0] != "end" else f"expected {kind!r}, found end of input",
                offset=tok[2],
            )
        return self.advance()

    def parse(self) -> Node:
        node = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionSyntaxError(f"unexpected {tok[1]!r}", offset=tok[2])
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.product()
            node = Bin(node.start, rhs.end, op, node, rhs)
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            rhs = self.unary()
            node = Bin(node.start, rhs.end, op, node, rhs)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok[0] == "-":
            self.advance()
            operand = self.unary()
            return Neg(tok[2], operand.end, operand)
        if tok[0] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            # right-associative; exponent may carry its own unary minus
            exponent = self.unary()
            return Bin(base.start, exponent.end, "^", base, exponent)
        return base

    def atom(self) -> Node:
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            return Num(tok[2], tok[2] + len(tok[1]), float(tok[1]))
        if tok[0] == "ident":
            self.advance()
            name, start = tok[1], tok[2]
            if name == "x":
                return Var(start, start + 1)
            if name == "pi":
                return Num(start, start + 2, math.pi)
            if name in _FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                close = self.expect(")")
                return Call(start, close[2] + 1, name, arg)
            raise ExpressionSyntaxError(f"unknown identifier {name!r}", offset=start)
        if tok[0] == "(":
            self.advance()
            node = self.sum()
            self.expect(")")
            return node
        if tok[0] == "end":
            raise ExpressionSyntaxError("unexpected end of input", offset=tok[2])
        raise ExpressionSyntaxError(f"unexpected {tok[1]!r}", offset=tok[2])


def parse_expression(text: str) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    Raises :class:`~slt.errors.ExpressionSyntaxError` (with byte offset) on
    malformed input or unknown identifiers.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", offset=0)
    return Expression(text, _Parser(text).parse())


def as_expression(f) -> Expression:
    """Coerce a string or Expression to an Expression."""
    if isinstance(f, Expression):
        return f
    return parse_expression(f)


# ---------------------------------------------------------------------------
# Evaluation

def _fragment(text: str, node: Node) -> str:
    frag = text[node.start:node.end]
    return frag if frag else "<expression>"


def _eval_scalar(node: Node, x: float, text: str) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval_scalar(node.operand, x, text)
    if isinstance(node, Bin):
        a = _eval_scalar(node.left, x, text)
        b = _eval_scalar(node.right, x, text)
        try:
            if node.op == "+":
                v = a + b
            elif node.op == "-":
                v = a - b
            elif node.op == "*":
                v = a * b
            elif node.op == "/":
                if b == 0.0:
                    raise EvaluationError(
                        f"division by zero in {_fragment(text, node)!r} at x={x!r}")
                v = a / b
            else:
                v = a ** b
        except OverflowError:
            raise EvaluationError(
                f"overflow in {_fragment(text, node)!r} at x={x!r}") from None
        if isinstance(v, complex) or not math.isfinite(v):
            raise EvaluationError(
                f"non-finite result in {_fragment(text, node)!r} at x={x!r}")
        return v
    # Call
    a = _eval_scalar(node.arg, x, text)
    try:
        v = _SCALAR_FUNCS[node.func](a)
    except (ValueError, OverflowError):
        raise EvaluationError(
            f"domain error in {_fragment(text, node)!r} at x={x!r}") from None
    if not math.isfinite(v):
        raise EvaluationError(
            f"non-finite result in {_fragment(text, node)!r} at x={x!r}")
    return v


def _eval_array(node: Node, x: np.ndarray, text: str) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(x.shape, node.value)
    if isinstance(node, Var):
        return x.astype(float, copy=True)
    if isinstance(node, Neg):
        return -_eval_array(node.operand, x, text)
    if isinstance(node, Bin):
        a = _eval_array(node.left, x, text)
        b = _eval_array(node.right, x, text)
        if node.op == "/" and np.any(b == 0.0):
            bad = float(x[np.nonzero(b == 0.0)[0][0]])
            raise EvaluationError(
                f"division by zero in {_fragment(text, node)!r} at x={bad!r}")
        with np.errstate(all="ignore"):
            if node.op == "+":
                v = a + b
            elif node.op == "-":
                v = a - b
            elif node.op == "*":
                v = a * b
            elif node.op == "/":
                v = a / b
            else:
                v = np.power(a, b)
    else:
        a = _eval_array(node.arg, x, text)
        with np.errstate(all="ignore"):
            v = _ARRAY_FUNCS[node.func](a)
    finite = np.isfinite(v)
    if not finite.all():
        bad = float(x[np.nonzero(~finite)[0][0]])
        raise EvaluationError(
            f"non-finite result in {_fragment(text, node)!r} at x={bad!r}")
    return v


def eval_expression(e: Expression, x):
    """Evaluate ``e`` at ``x`` (a finite float, or a 1-d float array).

    Division by zero, domain errors and non-finite intermediate results raise
    :class:`~slt.errors.EvaluationError` naming the offending subexpression.
    """
    if isinstance(x, np.ndarray):
        return _eval_array(e.root, x, e.text)
    return _eval_scalar(e.root, float(x), e.text)


# ---------------------------------------------------------------------------
# Printing (precedence-aware; reparsing the output reproduces the tree)

_PREC_SUM, _PREC_PROD, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return {"+": _PREC_SUM, "-": _PREC_SUM, "*": _PREC_PROD,
                "/": _PREC_PROD, "^": _PREC_POW}[node.op]
    if isinstance(node, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _unparse(node: Node) -> str:
    if isinstance(node, Num):
        if node.value == math.pi:
            return "pi"
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        inner = _unparse(node.operand)
        if _prec(node.operand) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({_unparse(node.arg)})"
    left, right = _unparse(node.left), _unparse(node.right)
    p = _prec(node)
    if node.op == "^":
        # base must be an atom; exponent reparses via the unary rule
        if _prec(node.left) < _PREC_ATOM:
            left = f"({left})"
        if isinstance(node.right, Bin) and _prec(node.right) <= _PREC_PROD:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        # all four operators parse left-associatively, and floating point is
        # not associative, so equal-level right children keep their parens
        if _prec(node.right) <= p or right.startswith("-"):
            right = f"({right})"
    return f"{left}{node.op}{right}"


def shifted_by(e: Expression, offset: float) -> Expression:
    """Return the expression ``e - offset`` (used for spectral shifts)."""
    text = f"({e.text})-({offset!r})" if offset >= 0 else f"({e.text})+({-offset!r})"
    root = e.root
    off = Num(0, 0, float(offset))
    return Expression(text, Bin(root.start, root.end, "-", root, off))
