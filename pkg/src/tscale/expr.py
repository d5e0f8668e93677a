"""A small expression language for functions on a time scale.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' number)?
    base   := number | 't' | 'i' | '(' expr ')'
            | exp(expr) | sin(expr) | cos(expr)
            | hk(int) | ets(complex) | etsinv(complex)
            | chi(number, number) | ind(number)

``hk(n)`` is the monomial h_n(t, s), ``ets(c)`` and ``etsinv(c)`` are
e_c(t, s) and e_{(-)c}(t, s), ``chi(a, b)`` is the indicator of [a, b) and
``ind(a)`` the indicator of the single point a.  Complex literals look like
``2``, ``-1.5``, ``3i`` or ``1-2i``.  Binding an expression to a time scale
and a start point s yields a :class:`~tscale.calculus.GridFunction`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .calculus import GridFunction
from .errors import ExprSyntaxError, UnknownFunction
from .exponential import exp_const_many, exp_ominus_many, monomial_many
from .timescale import TOL, TimeScale


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # 't' or 'i'


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: float


@dataclass(frozen=True)
class Call:
    """A builtin applied to an expression (exp, sin, cos)."""

    name: str
    arg: "Node"


@dataclass(frozen=True)
class Special:
    """A builtin whose arguments are literals (hk, ets, etsinv, chi, ind)."""

    name: str
    args: tuple[Union[int, float, complex], ...]


Node = Union[Num, Var, Neg, BinOp, Pow, Call, Special]

EXPR_FUNCS = ("exp", "sin", "cos")
LITERAL_FUNCS = {"hk": "int", "ets": "complex", "etsinv": "complex", "chi": "real2", "ind": "real"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Token | None = None) -> ExprSyntaxError:
        tok = tok or self.tok
        return ExprSyntaxError(message, _byte_offset(self.text, tok.pos))

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Node:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.factor())
        node = self.base()
        if self.accept("^"):
            node = Pow(node, self.real())
        return node

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "name":
            self.advance()
            if tok.text in ("t", "i"):
                return Var(tok.text)
            if tok.text in EXPR_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in LITERAL_FUNCS:
                return self.special(tok.text)
            raise UnknownFunction(f"unknown name {tok.text!r}", _byte_offset(self.text, tok.pos))
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def special(self, name: str) -> Special:
        self.expect("(")
        kind = LITERAL_FUNCS[name]
        if kind == "int":
            tok = self.tok
            value = self.real()
            if not value.is_integer() or value < 0:
                raise self.error("hk needs a nonnegative integer", tok)
            args: tuple = (int(value),)
        elif kind == "complex":
            args = (self.complex_literal(),)
        elif kind == "real2":
            a = self.real()
            self.expect(",")
            args = (a, self.real())
        else:
            args = (self.real(),)
        self.expect(")")
        return Special(name, args)

    def real(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        tok = self.tok
        if tok.kind != "num":
            raise self.error("expected a number")
        self.advance()
        return sign * float(tok.text)

    def _imag_unit(self) -> bool:
        if self.tok.kind == "name" and self.tok.text == "i":
            self.advance()
            return True
        return False

    def complex_literal(self) -> complex:
        """``a``, ``bi``, ``i``, ``a+bi`` or ``a-bi`` with optional leading sign."""
        sign = -1.0 if self.accept("-") else 1.0
        if self._imag_unit():
            return complex(0.0, sign)
        tok = self.tok
        if tok.kind != "num":
            raise self.error("expected a complex literal")
        self.advance()
        first = sign * float(tok.text)
        if self._imag_unit():
            return complex(0.0, first)
        if self.tok.kind == "op" and self.tok.text in "+-":
            isign = 1.0 if self.advance().text == "+" else -1.0
            if self._imag_unit():
                return complex(first, isign)
            tok = self.tok
            if tok.kind != "num":
                raise self.error("expected the imaginary part")
            self.advance()
            if not self._imag_unit():
                raise self.error("expected 'i' after the imaginary part")
            return complex(first, isign * float(tok.text))
        return complex(first, 0.0)


# ----------------------------------------------------------------------
# printing


def format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return format_real(c.real)
    im = ("" if abs(c.imag) == 1 else format_real(abs(c.imag))) + "i"
    if c.real == 0:
        return ("-" if c.imag < 0 else "") + im
    return format_real(c.real) + ("-" if c.imag < 0 else "+") + im


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node: Node) -> str:
    return _fmt(node, 0)


def _paren(s: str, needed: bool) -> str:
    return f"({s})" if needed else s


def _fmt(node: Node, ctx: int) -> str:
    if isinstance(node, Num):
        return _paren(format_real(node.value), node.value < 0)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return _paren("-" + _fmt(node.arg, 3), ctx > 3)
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        text = f"{_fmt(node.left, p)} {node.op} {_fmt(node.right, p + 1)}"
        return _paren(text, ctx > p)
    if isinstance(node, Pow):
        return _paren(f"{_fmt(node.base, 5)}^{format_real(node.exponent)}", ctx > 4)
    if isinstance(node, Call):
        return f"{node.name}({_fmt(node.arg, 0)})"
    if isinstance(node, Special):
        if node.name in ("ets", "etsinv"):
            return f"{node.name}({format_complex(node.args[0])})"
        return f"{node.name}({', '.join(format_real(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


# ----------------------------------------------------------------------
# evaluation


def _lift(fn, *parts: GridFunction) -> GridFunction:
    bps = tuple(b for p in parts for b in p.breakpoints)

    def quiet(*args):
        # overflow yields inf, which the integrators treat as divergence
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return fn(*args)
    return GridFunction(lambda ts: quiet(*(p.at(ts) for p in parts)),
                        lambda ts: quiet(*(p.on_dense(ts) for p in parts)), bps)


def _flat(fn):
    """Apply an array function of t to arrays of any shape."""
    def wrapped(ts):
        return np.asarray(fn(ts.ravel())).reshape(ts.shape)
    return wrapped


def compile_node(node: Node, T: TimeScale, s: float) -> GridFunction:
    if isinstance(node, Num):
        return GridFunction.constant(node.value)
    if isinstance(node, Var):
        if node.name == "t":
            return GridFunction(lambda ts: ts.astype(complex))
        return GridFunction.constant(1j)
    if isinstance(node, Neg):
        return -compile_node(node.arg, T, s)
    if isinstance(node, BinOp):
        a, b = compile_node(node.left, T, s), compile_node(node.right, T, s)
        op = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[node.op]
        return _lift(op, a, b)
    if isinstance(node, Pow):
        p = node.exponent
        return _lift(lambda x: x ** p, compile_node(node.base, T, s))
    if isinstance(node, Call):
        fn = {"exp": np.exp, "sin": np.sin, "cos": np.cos}[node.name]
        return _lift(fn, compile_node(node.arg, T, s))
    if isinstance(node, Special):
        name, args = node.name, node.args
        if name == "hk":
            n = args[0]
            return GridFunction(_flat(lambda ts: monomial_many(T, n, ts, s)))
        if name == "ets":
            c = args[0]
            return GridFunction(_flat(lambda ts: exp_const_many(T, c, ts, s)))
        if name == "etsinv":
            c = args[0]
            return GridFunction(_flat(lambda ts: exp_ominus_many(T, c, ts, s)))
        if name == "chi":
            a, b = args
            return GridFunction(lambda ts: ((ts >= a - TOL) & (ts < b - TOL)).astype(complex),
                                breakpoints=(a, b))
        if name == "ind":
            return GridFunction.point_mass(args[0])
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with its declared growth rate."""

    ast: Node
    growth: float = 0.0

    def bind(self, T: TimeScale, s: float) -> GridFunction:
        return compile_node(self.ast, T, T.snap(s))

    def __str__(self) -> str:
        return to_text(self.ast)


def parse_expr(text: str, growth: float = 0.0) -> Expression:
    if not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return Expression(_Parser(text).parse(), float(growth))
