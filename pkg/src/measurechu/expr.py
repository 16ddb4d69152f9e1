"""A closed expression language for test functions and curve components.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" nonneg-int)?
    atom   := rational | "pi" | var | func "(" expr ")" | "(" expr ")"
    var    := "x" positive-int
    func   := "sin" | "cos" | "exp"
    rational := int ("/" positive-int)?

``^`` binds tighter than unary minus, so ``-x1^2`` is ``-(x1^2)``.  An
integer immediately followed by ``/`` and a positive integer is read as a
single rational literal.  Positions in error messages are 0-based character
offsets.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import (
    BackendMismatch,
    DimensionMismatch,
    ExprSyntaxError,
    UnknownIdentifier,
    ValidationError,
    VariableOutOfRange,
)
from .scalar import EXACT, FLOAT, Scalar

FUNCTIONS = ("sin", "cos", "exp")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


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
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Pi, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Expr:
    root: Node
    dim: int
    source: str = ""

    def __call__(self, coords: Sequence, backend: str | None = None) -> Scalar:
        return eval_expr(self, coords, backend)

    @property
    def transcendental(self) -> bool:
        return _has_transcendental(self.root)

    def __str__(self):
        return to_text(self)


# tokenizer ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            toks.append(_Tok("end", "", len(text)))
            return toks
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(_Tok("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(_Tok("op", ch, m.start(3)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, dim: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.dim = dim

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.tok
        if t.kind != "op" or t.text != text:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", t.pos)
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
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
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            t = self.tok
            if t.kind != "int":
                found = "end of input" if t.kind == "end" else repr(t.text)
                raise ExprSyntaxError(f"exponent must be a non-negative integer, found {found}", t.pos)
            self.advance()
            node = Pow(node, int(t.text))
            if self.tok.kind == "op" and self.tok.text == "^":
                raise ExprSyntaxError("chained exponents are not allowed; parenthesize", self.tok.pos)
        return node

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "int":
            self.advance()
            value = Fraction(int(t.text))
            nxt, after = self.tok, self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
            if (
                nxt.kind == "op" and nxt.text == "/" and after is not None
                and after.kind == "int" and int(after.text) > 0
            ):
                self.i += 2
                value = Fraction(int(t.text), int(after.text))
            return Num(value)
        if t.kind == "name":
            self.advance()
            name = t.text
            if name == "pi":
                return Pi()
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            m = re.fullmatch(r"x(\d+)", name)
            if m:
                k = int(m.group(1))
                if k < 1 or k > self.dim:
                    raise VariableOutOfRange(
                        f"variable {name} outside x1..x{self.dim}" if self.dim else
                        f"variable {name} used but dimension is 0", t.pos)
                return Var(k)
            raise UnknownIdentifier(f"unknown identifier {name!r}", t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"expected an operand, found {found}", t.pos)


def parse_expr(text: str, dim: int) -> Expr:
    if not isinstance(dim, int) or dim < 0:
        raise ValidationError(f"dimension must be a non-negative integer, got {dim!r}")
    return Expr(_Parser(text, dim).parse(), dim, text)


# evaluation -------------------------------------------------------------------


def _has_transcendental(node: Node) -> bool:
    if isinstance(node, (Pi, Call)):
        return True
    if isinstance(node, Neg):
        return _has_transcendental(node.arg)
    if isinstance(node, BinOp):
        return _has_transcendental(node.left) or _has_transcendental(node.right)
    if isinstance(node, Pow):
        return _has_transcendental(node.base)
    return False


def eval_expr(e: Expr, coords: Sequence, backend: str | None = None) -> Scalar:
    """Evaluate ``e`` at ``coords``.

    The backend comes from the coordinates; ``backend`` is needed only when
    there are none (dimension 0).  Requesting ``float`` converts exact
    coordinates; requesting ``exact`` with float coordinates is an error.
    """
    if len(coords) != e.dim:
        raise DimensionMismatch(f"expression expects {e.dim} coordinates, got {len(coords)}")
    if coords:
        values = [c if isinstance(c, Scalar) else Scalar.coerce(c, backend or _guess(c)) for c in coords]
        if backend == FLOAT:
            # exact coordinates widen losslessly enough to binary64; the reverse is refused
            values = [Scalar(float(v.re), float(v.im), FLOAT) if v.backend == EXACT else v for v in values]
        seen = {v.backend for v in values}
        if len(seen) > 1 or (backend is not None and backend not in seen):
            raise BackendMismatch("coordinates and requested backend disagree")
        backend = values[0].backend
    else:
        values = []
        backend = backend or EXACT
    if backend == EXACT and _has_transcendental(e.root):
        raise BackendMismatch("sin, cos, exp and pi need the float backend")
    return _eval(e.root, values, backend)


def _guess(value) -> str:
    return FLOAT if isinstance(value, (float, complex)) else EXACT


def _eval(node: Node, xs: list[Scalar], backend: str) -> Scalar:
    if isinstance(node, Num):
        return Scalar(node.value, 0, backend)
    if isinstance(node, Var):
        return xs[node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.arg, xs, backend)
    if isinstance(node, BinOp):
        a = _eval(node.left, xs, backend)
        b = _eval(node.right, xs, backend)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        return _eval(node.base, xs, backend) ** node.exponent
    if isinstance(node, Pi):
        return Scalar(math.pi, 0.0, FLOAT)
    if isinstance(node, Call):
        z = _eval(node.arg, xs, backend).to_complex()
        f = {"sin": cmath.sin, "cos": cmath.cos, "exp": cmath.exp}[node.func]
        if z.imag == 0.0:
            r = {"sin": math.sin, "cos": math.cos, "exp": math.exp}[node.func](z.real)
            return Scalar(r, 0.0, FLOAT)
        w = f(z)
        return Scalar(w.real, w.imag, FLOAT)
    raise TypeError(f"not an expression node: {node!r}")


# printing -------------------------------------------------------------------


def to_text(e: Expr | Node) -> str:
    """Render an expression so that reparsing yields the same tree.

    Every compound subterm is parenthesized, so the output does not rely on
    precedence rules.
    """
    node = e.root if isinstance(e, Expr) else e
    return _show(node, top=True)


def _show(node: Node, top: bool = False) -> str:
    if isinstance(node, Num):
        v = node.value
        if v.denominator == 1:
            return str(v.numerator)
        text = f"{v.numerator}/{v.denominator}"
        return text if top else f"({text})"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Call):
        return f"{node.func}({_show(node.arg, top=True)})"
    if isinstance(node, Neg):
        s = f"-{_show(node.arg)}"
    elif isinstance(node, Pow):
        s = f"{_show(node.base)}^{node.exponent}"
    elif isinstance(node, BinOp):
        s = f"{_show(node.left)} {node.op} {_show(node.right)}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    return s if top else f"({s})"
