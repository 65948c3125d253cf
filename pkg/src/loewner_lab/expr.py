"""Scalar-function expressions: parsing, evaluation, transforms.

The accepted grammar (whitespace-insensitive, a public contract used
verbatim by the CLI ``--fn`` flag):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' factor)?
    base   := number | 't' | func '(' expr ')' | '(' expr ')'
    func   := 'log' | 'exp' | 'sqrt'

``^`` accepts any real exponent and binds tighter than unary minus, so
``-t^2`` means ``-(t^2)`` and ``t^-0.5`` means ``t^(-0.5)``.  ``log`` is
the natural logarithm.  Number literals may use scientific notation.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

from .precision import PrecisionCfg, as_cfg

_FUNCTIONS = ("log", "exp", "sqrt")


class ExpressionError(ValueError):
    """Syntax error or unknown identifier, with a character position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DomainError(ValueError):
    """Evaluation hit a singularity, a domain violation, or an overflow."""


# ---------------------------------------------------------------------------
# AST


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Node):
    text: str


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str  # log | exp | sqrt
    arg: Node


@dataclass(frozen=True)
class Interval:
    """Real interval with independently open/closed endpoints."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = True

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty interval: lo={self.lo} hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, t, closure: bool = False) -> bool:
        t = float(t)
        lo_ok = t >= self.lo if (closure or not self.lo_open) else t > self.lo
        hi_ok = t <= self.hi if (closure or not self.hi_open) else t < self.hi
        return lo_ok and hi_ok

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class FunctionSpec:
    """A parsed expression plus its interval of definition.

    ``deriv_shift = k`` means the represented function is the k-th
    derivative of the parsed expression; derivatives are realised through
    jet evaluation, never by symbolic differentiation.
    """

    ast: Node
    domain: Interval = Interval(0.0, 1.0)
    deriv_shift: int = 0
    source: str = ""

    def text(self) -> str:
        if self.source:
            base = self.source
        else:
            base = pretty(self.ast)
        if self.deriv_shift:
            return f"D^{self.deriv_shift}[{base}]"
        return base


# ---------------------------------------------------------------------------
# Tokenizer / parser

_NUMBER_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            m = _NUMBER_RE.match(text, i)
            if not m:
                raise ExpressionError(f"bad number starting with {ch!r}", i)
            tokens.append(("num", m.group(0), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, i)
            tokens.append(("ident", m.group(0), i))
            i = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


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

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ExpressionError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionError(f"trailing input {tok[1]!r}", tok[2])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.factor())
        node = self.base()
        if self.peek()[0] == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def base(self) -> Node:
        kind, value, pos = self.advance()
        if kind == "num":
            return Num(value)
        if kind == "ident":
            if value == "t":
                return Var()
            if value in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise ExpressionError(f"unknown identifier {value!r}", pos)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionError(f"expected a value, found {value!r}", pos)


def parse(text: str, domain: Interval | None = None) -> FunctionSpec:
    """Parse an expression into a FunctionSpec (default domain [0, 1))."""
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    ast = _Parser(text).parse()
    return FunctionSpec(ast=ast, domain=domain or Interval(0.0, 1.0), source=text.strip())


# ---------------------------------------------------------------------------
# Printing

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_UNARY, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(node: Node) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _LEVEL_ADD
        if node.op in "*/":
            return _LEVEL_MUL
        return _LEVEL_POW
    if isinstance(node, Neg):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def pretty(node: Node) -> str:
    """Print an AST so that it re-parses to an equivalent expression."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Call):
        return f"{node.func}({pretty(node.arg)})"
    if isinstance(node, Neg):
        inner = pretty(node.arg)
        if _level(node.arg) < _LEVEL_UNARY:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        lhs, rhs = pretty(node.left), pretty(node.right)
        own = _level(node)
        if _level(node.left) < own or (node.op == "^" and _level(node.left) <= own):
            lhs = f"({lhs})"
        if _level(node.right) < own or (node.op in "-/" and _level(node.right) <= own):
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}" if node.op in "+-*/" else f"{lhs}^{rhs}"
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Scalar evaluation


def _is_integral(x) -> bool:
    try:
        return x == int(x) and abs(float(x)) < 1e12
    except (OverflowError, ValueError):
        return False


def scalar_pow(a, b, cfg: PrecisionCfg):
    """Power with the usual real-analysis domain rules."""
    if _is_integral(b):
        m = int(b)
        if a == 0 and m <= 0:
            raise DomainError("zero base with non-positive integer exponent")
        try:
            return a ** m
        except OverflowError as exc:
            raise DomainError("overflow in power") from exc
    if a > 0:
        try:
            return cfg.power(a, b)
        except OverflowError as exc:
            raise DomainError("overflow in power") from exc
    if a == 0:
        if b > 0:
            return cfg.zero()
        raise DomainError("zero base with non-positive exponent")
    raise DomainError("negative base with non-integer exponent")


def eval_ast(node: Node, t, cfg: PrecisionCfg):
    """Evaluate an AST at scalar t (already a cfg scalar)."""
    if isinstance(node, Num):
        return cfg.from_literal(node.text)
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -eval_ast(node.arg, t, cfg)
    if isinstance(node, Call):
        v = eval_ast(node.arg, t, cfg)
        if node.func == "log":
            if v <= 0:
                raise DomainError(f"log of non-positive argument {float(v)!r}")
            return cfg.log(v)
        if node.func == "exp":
            try:
                return cfg.exp(v)
            except OverflowError as exc:
                raise DomainError("overflow in exp") from exc
        if node.func == "sqrt":
            if v < 0:
                raise DomainError(f"sqrt of negative argument {float(v)!r}")
            return cfg.sqrt(v)
        raise TypeError(f"unknown function {node.func!r}")
    if isinstance(node, BinOp):
        a = eval_ast(node.left, t, cfg)
        b = eval_ast(node.right, t, cfg)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0:
                raise DomainError("division by zero")
            return a / b
        if node.op == "^":
            return scalar_pow(a, b, cfg)
    raise TypeError(f"not an AST node: {node!r}")


def evaluate(fn: FunctionSpec, t, precision: PrecisionCfg | None = None):
    """Value of the represented function (including deriv_shift) at t."""
    cfg = as_cfg(precision)
    if not fn.domain.contains(t, closure=True):
        raise DomainError(f"t={float(t)!r} outside domain {fn.domain}")
    if fn.deriv_shift:
        from .jets import derivative

        return derivative(fn, t, 0, cfg)
    with cfg.context():
        return eval_ast(fn.ast, cfg.from_number(t), cfg)


# ---------------------------------------------------------------------------
# Transforms


def substitute(node: Node, replacement: Node) -> Node:
    """Replace the variable by another expression subtree."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacement))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, replacement),
                     substitute(node.right, replacement))
    return node


def _literal(value) -> Node:
    if isinstance(value, str):
        return Num(value)
    x = float(value)
    if x < 0:
        return Neg(Num(repr(-x)))
    return Num(repr(x))


def transform(fn: FunctionSpec, kind: str, *, alpha=None, beta=None, k: int = 1) -> FunctionSpec:
    """Function transforms used throughout the criteria.

    kind "divide_by_t"     : t |-> f(t)/t on the left-opened domain
    kind "shifted_divide"  : t |-> (f(t) - f(0))/t, f(0) kept as a subtree
    kind "rescale"         : f o h^{-1} with h(t) = (beta/alpha) t, onto [0, beta)
    kind "deriv_shift"     : bump deriv_shift by k
    """
    if kind == "deriv_shift":
        if k < 0 or fn.deriv_shift + k < 0:
            raise ValueError("deriv_shift must stay non-negative")
        return dataclasses.replace(fn, deriv_shift=fn.deriv_shift + k, source="")
    if fn.deriv_shift:
        raise ValueError(f"transform {kind!r} requires deriv_shift == 0")

    if kind in ("divide_by_t", "shifted_divide"):
        if fn.domain.lo != 0.0:
            raise DomainError(f"{kind} requires 0 as the left endpoint, domain is {fn.domain}")
        numerator = fn.ast
        if kind == "shifted_divide":
            numerator = BinOp("-", fn.ast, substitute(fn.ast, Num("0")))
        ast = BinOp("/", numerator, Var())
        domain = Interval(0.0, fn.domain.hi, lo_open=True, hi_open=fn.domain.hi_open)
        return FunctionSpec(ast=ast, domain=domain)

    if kind == "rescale":
        if alpha is None or beta is None or float(alpha) <= 0 or float(beta) <= 0:
            raise ValueError("rescale needs alpha > 0 and beta > 0")
        if fn.domain.lo != 0.0 or abs(fn.domain.hi - float(alpha)) > 1e-12 * max(1.0, float(alpha)):
            raise DomainError(f"rescale({alpha}, {beta}) expects domain [0, {alpha}), got {fn.domain}")
        ratio = BinOp("/", _literal(alpha), _literal(beta))
        ast = substitute(fn.ast, BinOp("*", ratio, Var()))
        domain = Interval(0.0, float(beta), lo_open=fn.domain.lo_open, hi_open=fn.domain.hi_open)
        return FunctionSpec(ast=ast, domain=domain)

    raise ValueError(f"unknown transform kind {kind!r}")
