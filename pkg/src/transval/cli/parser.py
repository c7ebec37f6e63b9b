"""Recursive-descent parser for the ``tvf`` expression language.

Grammar (whitespace is free)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | factor
    factor  := atom ['^' power]
    atom    := 'x' | 't' | 'g' | integer | '(' expr ')' | 'O' '(' 't' ['^' power] ')'
    power   := integer | 's' | 'p' | '(' sexpr ')'
    sexpr   := polynomial in 's' and 'p' with rational coefficients;
               division and integer powers (also negative) are allowed

``s`` stands for sigma and ``p`` for the session characteristic, which is
substituted at parse time.  ``g`` is the generator of the coefficient field.
Exponent positions hold sigma-expressions; ``s`` anywhere else is a type
error.  Column numbers are 0-based offsets into the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from ..diffpoly import DiffPoly
from ..errors import ExprTypeError, ParseError
from ..fields import QQ
from ..hahn import HahnRing, HahnSeries
from ..sigma import SigmaExponent, SigmaRational, as_rational

# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

_SYMBOLS = set("+-*/^()")
_NAMES = set("xtgspO")


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'name', 'sym', 'end'
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out: List[Token] = []
    line, col0, i = 1, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            col0 = i
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - col0
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(Token("int", text[i:j], line, col))
            i = j
            continue
        if ch in _SYMBOLS:
            out.append(Token("sym", ch, line, col))
        elif ch in _NAMES:
            if i + 1 < len(text) and (text[i + 1].isalnum() or text[i + 1] == "_"):
                raise ParseError(f"unknown identifier starting at {ch!r}", line, col)
            out.append(Token("name", ch, line, col))
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        i += 1
    out.append(Token("end", "", line, len(text) - col0))
    return out


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str  # 'x', 't' or 'g'


@dataclass(frozen=True)
class BigO:
    exponent: SigmaRational


@dataclass(frozen=True)
class Neg:
    arg: "Ast"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Ast"
    right: "Ast"
    line: int = 1
    col: int = 0


@dataclass(frozen=True)
class Pow:
    base: "Ast"
    exponent: SigmaRational
    line: int = 1
    col: int = 0


Ast = Union[Num, Var, BigO, Neg, BinOp, Pow]


class _Parser:
    def __init__(self, text: str, p: int):
        self.toks = tokenize(text)
        self.i = 0
        self.p = p

    # -- helpers ----------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def accept(self, text) -> Optional[Token]:
        t = self.tok
        if t.kind in ("sym", "name") and t.text == text:
            self.i += 1
            return t
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return t

    def done(self):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- coefficient/polynomial grammar ---------------------------------------------
    def expr(self) -> Ast:
        node = self.term()
        while True:
            t = self.accept("+") or self.accept("-")
            if t is None:
                return node
            node = BinOp(t.text, node, self.term(), t.line, t.col)

    def term(self) -> Ast:
        node = self.unary()
        while True:
            t = self.accept("*") or self.accept("/")
            if t is None:
                return node
            node = BinOp(t.text, node, self.unary(), t.line, t.col)

    def unary(self) -> Ast:
        if self.accept("-"):
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Ast:
        base = self.atom()
        t = self.accept("^")
        if t is None:
            return base
        return Pow(base, self.power(), t.line, t.col)

    def atom(self) -> Ast:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Num(Fraction(int(t.text)))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            if t.text in ("x", "t", "g"):
                self.i += 1
                return Var(t.text)
            if t.text == "O":
                self.i += 1
                self.expect("(")
                self.expect("t")
                e = self.power() if self.accept("^") else as_rational(1)
                self.expect(")")
                return BigO(e)
            if t.text in ("s", "p"):
                raise self.error(f"sigma-expression {t.text!r} in coefficient position", t, ExprTypeError)
        if t.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {t.text!r}")

    # -- sigma-expressions ------------------------------------------------------------
    def power(self) -> SigmaRational:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return as_rational(int(t.text))
        if t.kind == "name" and t.text in ("s", "p"):
            return self.s_atom()
        if self.accept("("):
            v = self.sexpr()
            self.expect(")")
            return v
        if self.accept("-"):
            nt = self.tok
            if nt.kind == "int":
                self.i += 1
                return as_rational(-int(nt.text))
        raise self.error("expected an exponent")

    def sexpr(self) -> SigmaRational:
        v = self.s_term()
        while True:
            if self.accept("+"):
                v = v + self.s_term()
            elif self.accept("-"):
                v = v - self.s_term()
            else:
                return v

    def s_term(self) -> SigmaRational:
        v = self.s_unary()
        while True:
            if self.accept("*"):
                v = v * self.s_unary()
            elif self.tok.kind == "sym" and self.tok.text == "/":
                t = self.tok
                self.i += 1
                d = self.s_unary()
                if d.is_zero():
                    raise self.error("division by zero in a sigma-expression", t)
                v = v / d
            else:
                return v

    def s_unary(self) -> SigmaRational:
        if self.accept("-"):
            return -self.s_unary()
        return self.s_factor()

    def s_factor(self) -> SigmaRational:
        base = self.s_atom()
        if self.accept("^"):
            t = self.tok
            neg = bool(self.accept("-"))
            paren = bool(self.accept("("))
            if paren and not neg:
                neg = bool(self.accept("-"))
            n_tok = self.tok
            if n_tok.kind != "int":
                raise self.error("sigma-powers take integer exponents")
            self.i += 1
            if paren:
                self.expect(")")
            n = int(n_tok.text)
            if neg:
                if base.is_zero():
                    raise self.error("negative power of zero", t)
                n = -n
            base = base ** n
        return base

    def s_atom(self) -> SigmaRational:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return as_rational(int(t.text))
        if self.accept("s"):
            return SigmaRational.sigma(1)
        if t.kind == "name" and t.text == "p":
            if self.p == 1:
                raise self.error("'p' is unavailable in characteristic exponent 1", t, ExprTypeError)
            self.i += 1
            return as_rational(self.p)
        if self.accept("("):
            v = self.sexpr()
            self.expect(")")
            return v
        if t.kind == "name" and t.text in ("x", "t", "g", "O"):
            raise self.error(f"{t.text!r} is not allowed in an exponent", t, ExprTypeError)
        if t.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {t.text!r} in an exponent")


def parse(text: str, p: int = 1) -> Ast:
    """Parse a polynomial or series expression into an AST."""
    ps = _Parser(text, p)
    node = ps.expr()
    ps.done()
    return node


def parse_sigma_rational(text: str, p: int = 1) -> SigmaRational:
    ps = _Parser(text, p)
    v = ps.sexpr()
    ps.done()
    return v


def to_exponent(r: SigmaRational, p: int = 1) -> SigmaExponent:
    """Read a sigma-expression as an element of N[sigma] with p-power denominators."""
    if r.den.degree != 0:
        raise ValueError(f"{r} is not a polynomial in sigma")
    d = r.den.coeffs[0]
    coeffs = {i: Fraction(c, d) for i, c in enumerate(r.num.coeffs) if c}
    for c in coeffs.values():
        if c < 0:
            raise ValueError(f"{r} has a negative coefficient")
        k = c.denominator
        if p == 1 and k != 1:
            raise ValueError(f"{r} needs denominators, unavailable with p = 1")
        while p > 1 and k % p == 0:
            k //= p
        if k != 1:
            raise ValueError(f"{r} has a denominator that is not a power of {p}")
    return SigmaExponent(coeffs)


def parse_exponent(text: str, p: int = 1) -> SigmaExponent:
    return to_exponent(parse_sigma_rational(text, p), p)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

class _Eval:
    def __init__(self, field, p):
        self.field = field
        self.p = p
        self.ring = HahnRing.of(field)

    def const(self, c) -> DiffPoly:
        return DiffPoly.const(self.ring, c)

    def __call__(self, node: Ast) -> DiffPoly:
        F = self.field
        if isinstance(node, Num):
            if F is not QQ and node.value.denominator % F.p == 0:
                raise ExprTypeError(f"{node.value} is not defined in characteristic {F.p}")
            return self.const(HahnSeries.const(F, F.coerce(node.value)))
        if isinstance(node, Var):
            if node.name == "x":
                return DiffPoly.x(self.ring)
            if node.name == "t":
                return self.const(HahnSeries.t(F))
            if F is QQ:
                raise ExprTypeError("the generator 'g' needs a finite coefficient field")
            return self.const(HahnSeries.const(F, F.gen))
        if isinstance(node, BigO):
            return self.const(HahnSeries.zero(F, node.exponent))
        if isinstance(node, Neg):
            return -self(node.arg)
        if isinstance(node, BinOp):
            a, b = self(node.left), self(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return self.divide(a, b, node)
        if isinstance(node, Pow):
            return self.power(node)
        raise TypeError(f"unknown node {node!r}")  # pragma: no cover

    def divide(self, a: DiffPoly, b: DiffPoly, node) -> DiffPoly:
        if not b.is_constant() or b.is_zero():
            raise ExprTypeError("can only divide by a nonzero constant", node.line, node.col)
        c = b.constant_term
        if len(c.terms) != 1 or c.prec is not None:
            raise ExprTypeError("can only divide by a monomial", node.line, node.col)
        inv = c.inverse()
        return a * self.const(inv)

    def power(self, node: Pow) -> DiffPoly:
        e = node.exponent
        base = node.base
        if isinstance(base, Var) and base.name == "t":
            return self.const(HahnSeries.monomial(self.field, e))
        if isinstance(base, Var) and base.name == "g":
            if not e.is_rational() or e.to_fraction().denominator != 1:
                raise ExprTypeError("field elements take integer powers", node.line, node.col)
            if self.field is QQ:
                raise ExprTypeError("the generator 'g' needs a finite coefficient field", node.line, node.col)
            return self.const(HahnSeries.const(self.field, self.field.gen ** int(e.to_fraction())))
        b = self(base)
        if e.is_rational() and e.to_fraction().denominator == 1:
            n = int(e.to_fraction())
            if n >= 0:
                return b ** n
            if b.is_constant() and b.constant_term.terms and len(b.constant_term.terms) == 1:
                return self.const(b.constant_term.inverse() ** (-n))
            raise ExprTypeError("negative powers need a monomial base", node.line, node.col)
        try:
            nu = to_exponent(e, self.p)
        except ValueError as exc:
            raise ExprTypeError(str(exc), node.line, node.col) from None
        if isinstance(base, Var) and base.name == "x":
            return DiffPoly.monomial(self.ring, nu)
        if b.is_constant():
            c = b.constant_term
            if len(c.terms) == 1 and c.prec is None and c.terms[0][1] == self.field.one:
                return self.const(HahnSeries.monomial(self.field, c.terms[0][0] * e))
            return self.const(c.power_exp(nu))
        return b.pow_exp(nu)


def evaluate(node: Ast, field, p: Optional[int] = None) -> DiffPoly:
    """Turn an AST into a difference polynomial over Hahn series on ``field``."""
    return _Eval(field, field.p if p is None else p)(node)


def parse_poly(text: str, field, p: Optional[int] = None) -> DiffPoly:
    p = field.p if p is None else p
    return evaluate(parse(text, p), field, p)


def parse_series(text: str, field, p: Optional[int] = None) -> HahnSeries:
    f = parse_poly(text, field, p)
    if not f.is_constant():
        raise ExprTypeError("expected a series, found an expression in x")
    return f.constant_term if not f.is_zero() else HahnSeries.zero(field)
