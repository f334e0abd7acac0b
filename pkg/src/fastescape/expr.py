"""Expression language for entire functions of one complex variable ``z``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' uint)?
    base   := 'z' | number | '(' expr ')' | func '(' expr ')'
    func   := exp | sin | cos | sinh | cosh

A number is a decimal literal optionally suffixed with ``i`` (``1.5i``).  A
parenthesised pair such as ``(0.25-1.5i)`` is read as a single complex
constant.  Division is only accepted by a constant divisor, so every accepted
expression is entire.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import scaled
from .scaled import LogComplex

FUNCTIONS = ("exp", "sin", "cos", "sinh", "cosh")

OVERFLOW_CAP = 1e300


class ParseError(ValueError):
    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class ExprSyntaxError(ParseError):
    pass


class NotEntire(ParseError):
    pass


class UnknownFunction(ParseError):
    pass


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Constant:
    value: complex


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class DivByConst:
    node: "Node"
    divisor: complex

    def __post_init__(self):
        if self.divisor == 0:
            raise ValueError("divisor must be nonzero")


@dataclass(frozen=True)
class Pow:
    node: "Node"
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")


@dataclass(frozen=True)
class Apply:
    func: str
    arg: "Node"

    def __post_init__(self):
        if self.func not in FUNCTIONS:
            raise ValueError(f"unknown function {self.func!r}")


Node = Union[Variable, Constant, Add, Sub, Mul, DivByConst, Pow, Apply]


def depends_on_z(node: Node) -> bool:
    match node:
        case Variable():
            return True
        case Constant():
            return False
        case Add(a, b) | Sub(a, b) | Mul(a, b):
            return depends_on_z(a) or depends_on_z(b)
        case DivByConst(a, _) | Pow(a, _) | Apply(_, a):
            return depends_on_z(a)
    raise TypeError(f"not an expression node: {node!r}")


def _has_transcendental(node: Node) -> bool:
    match node:
        case Apply(_, arg):
            return depends_on_z(arg) or _has_transcendental(arg)
        case Add(a, b) | Sub(a, b) | Mul(a, b):
            return _has_transcendental(a) or _has_transcendental(b)
        case DivByConst(a, _) | Pow(a, _):
            return _has_transcendental(a)
    return False


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _number(tok: _Tok) -> complex:
    imag = tok.text.endswith("i")
    x = float(tok.text[:-1] if imag else tok.text)
    if not math.isfinite(x):
        raise ExprSyntaxError(f"number out of range: {tok.text}", tok.pos)
    return complex(0.0, x) if imag else complex(x, 0.0)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def is_op(self, tok: _Tok, *ops: str) -> bool:
        return tok.kind == "op" and tok.text in ops

    def expect(self, op: str) -> None:
        if not self.is_op(self.tok, op):
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {op!r}, found {found!r}", self.tok.pos)
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.is_op(self.tok, "+", "-"):
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.is_op(self.tok, "*", "/"):
            op = self.tok
            self.i += 1
            rhs = self.factor()
            if op.text == "*":
                node = Mul(node, rhs)
                continue
            if depends_on_z(rhs):
                raise NotEntire("division by an expression in z", op.pos)
            divisor = _plain_eval(rhs, 0j)
            if not isinstance(divisor, complex) or divisor == 0:
                raise NotEntire("division by zero" if divisor == 0 else "divisor overflows", op.pos)
            node = DivByConst(node, divisor)
        return node

    def factor(self) -> Node:
        if self.is_op(self.tok, "-"):
            self.i += 1
            nxt = self.peek()
            if self.tok.kind == "num" and not self.is_op(nxt, "^"):
                value = _number(self.tok)
                self.i += 1
                return Constant(-value)
            return Mul(Constant(complex(-1.0, 0.0)), self.factor())
        base = self.base()
        if self.is_op(self.tok, "^"):
            self.i += 1
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                raise ExprSyntaxError("exponent must be a nonnegative integer", tok.pos)
            self.i += 1
            return Pow(base, int(tok.text))
        return base

    def _complex_literal(self) -> Node | None:
        # '(' ['-'] real ('+'|'-') imag ')'
        k = 1
        sign = 1.0
        if self.is_op(self.peek(k), "-"):
            sign = -1.0
            k += 1
        re_tok, op, im_tok, close = (self.peek(k + j) for j in range(4))
        if (
            re_tok.kind == "num"
            and not re_tok.text.endswith("i")
            and self.is_op(op, "+", "-")
            and im_tok.kind == "num"
            and im_tok.text.endswith("i")
            and self.is_op(close, ")")
        ):
            re_part = sign * _number(re_tok).real
            im_part = _number(im_tok).imag
            if op.text == "-":
                im_part = -im_part
            self.i += k + 4
            return Constant(complex(re_part, im_part))
        return None

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Constant(_number(tok))
        if tok.kind == "name":
            if tok.text == "z":
                self.i += 1
                return Variable()
            if tok.text not in FUNCTIONS:
                raise UnknownFunction(f"unknown name {tok.text!r}", tok.pos)
            self.i += 1
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Apply(tok.text, arg)
        if self.is_op(tok, "("):
            lit = self._complex_literal()
            if lit is not None:
                return lit
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.pos)


# --- entire functions --------------------------------------------------------


@dataclass(frozen=True)
class Overflow:
    """Sentinel for an evaluation whose intermediate magnitude exceeded the cap.

    Signs are those of the real and imaginary parts of the first offending
    intermediate value (0 when that part was zero or undefined).
    """

    re_sign: int
    im_sign: int


def _sign(x: float) -> int:
    if math.isnan(x) or x == 0:
        return 0
    return 1 if x > 0 else -1


class _Overflowed(Exception):
    def __init__(self, value: complex):
        self.value = value


_CMATH = {"exp": cmath.exp, "sin": cmath.sin, "cos": cmath.cos, "sinh": cmath.sinh, "cosh": cmath.cosh}


def _checked(v: complex) -> complex:
    if not (cmath.isfinite(v) and abs(v) <= OVERFLOW_CAP):
        raise _Overflowed(v)
    return v


def _plain(node: Node, z: complex) -> complex:
    match node:
        case Variable():
            return z
        case Constant(c):
            return c
        case Add(a, b):
            return _checked(_plain(a, z) + _plain(b, z))
        case Sub(a, b):
            return _checked(_plain(a, z) - _plain(b, z))
        case Mul(a, b):
            return _checked(_plain(a, z) * _plain(b, z))
        case DivByConst(a, k):
            return _checked(_plain(a, z) / k)
        case Pow(a, n):
            return _checked(_plain(a, z) ** n) if n else complex(1.0, 0.0)
        case Apply(name, a):
            w = _plain(a, z)
            try:
                return _checked(_CMATH[name](w))
            except OverflowError:
                grow = w if name in ("exp", "sinh", "cosh") else w * 1j
                raise _Overflowed(complex(_sign(grow.real) or 0, _sign(grow.imag) or 0))
    raise TypeError(f"not an expression node: {node!r}")


def _plain_eval(node: Node, z: complex) -> complex | Overflow:
    try:
        return complex(_plain(node, complex(z)))
    except (_Overflowed, OverflowError) as exc:
        v = getattr(exc, "value", complex(math.nan, math.nan))
        return Overflow(_sign(v.real), _sign(v.imag))


def eval_scaled(node: Node, x: LogComplex) -> LogComplex:
    match node:
        case Variable():
            return x
        case Constant(c):
            return scaled.lift(c)
        case Add(a, b):
            return scaled.add(eval_scaled(a, x), eval_scaled(b, x))
        case Sub(a, b):
            return scaled.sub(eval_scaled(a, x), eval_scaled(b, x))
        case Mul(a, b):
            return scaled.mul(eval_scaled(a, x), eval_scaled(b, x))
        case DivByConst(a, k):
            return scaled.div_const(eval_scaled(a, x), k)
        case Pow(a, n):
            return scaled.power(eval_scaled(a, x), n) if n else scaled.lift(np.ones(len(x)))
        case Apply(name, a):
            return getattr(scaled, name)(eval_scaled(a, x))
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class EntireFunction:
    ast: Node
    source_text: str
    is_transcendental: bool

    @classmethod
    def from_ast(cls, ast: Node) -> EntireFunction:
        return cls(ast, pretty_ast(ast), _has_transcendental(ast))

    def __str__(self) -> str:
        return pretty_ast(self.ast)

    def apply(self, x: LogComplex) -> LogComplex:
        """Vectorised overflow-safe evaluation."""
        out = eval_scaled(self.ast, x)
        if len(out) != len(x):
            out = LogComplex(np.repeat(out.c, len(x)), np.repeat(out.s, len(x)))
        return out

    def evaluate(self, z: complex) -> complex | Overflow:
        return _plain_eval(self.ast, z)


def parse_function(text: str) -> EntireFunction:
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    ast = _Parser(text).parse()
    return EntireFunction(ast, text, _has_transcendental(ast))


def evaluate(f: EntireFunction, z: complex) -> complex | Overflow:
    """Value of ``f`` at ``z``; an :class:`Overflow` once any intermediate exceeds 1e300."""
    return f.evaluate(z)


def log_magnitude(f: EntireFunction, z: complex) -> float:
    """``log|f(z)|`` computed with rescaling; ``-inf`` when ``f(z) == 0`` exactly."""
    return float(f.apply(scaled.lift(z)).log_abs[0])


# --- printing ----------------------------------------------------------------


def _const_text(c: complex) -> str:
    re_part, im_part = c.real, c.imag
    if im_part == 0:
        if math.copysign(1.0, re_part) > 0:
            return repr(re_part)
        return f"({re_part!r})"
    if re_part == 0:
        return f"({im_part!r}i)"
    sign = "+" if math.copysign(1.0, im_part) > 0 else "-"
    return f"({re_part!r}{sign}{abs(im_part)!r}i)"


def _child(node: Node) -> str:
    if isinstance(node, (Variable, Constant, Apply)):
        return pretty_ast(node)
    return f"({pretty_ast(node)})"


def pretty_ast(node: Node) -> str:
    match node:
        case Variable():
            return "z"
        case Constant(c):
            return _const_text(c)
        case Add(a, b):
            return f"{_child(a)}+{_child(b)}"
        case Sub(a, b):
            return f"{_child(a)}-{_child(b)}"
        case Mul(a, b):
            return f"{_child(a)}*{_child(b)}"
        case DivByConst(a, k):
            return f"{_child(a)}/{_const_text(k)}"
        case Pow(a, n):
            return f"{_child(a)}^{n}"
        case Apply(name, a):
            return f"{name}({pretty_ast(a)})"
    raise TypeError(f"not an expression node: {node!r}")


def pretty(f: EntireFunction) -> str:
    return pretty_ast(f.ast)
