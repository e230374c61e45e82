"""Expression trees for model right-hand sides, with a tokenizer and parser.

Expressions are built from exact rational constants, symbols, ``+ - * /``,
unary minus and nonnegative integer powers.  Division of two constants and
negation of a constant are folded at parse time so that printing and
re-parsing is a fixed point.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import gcd
from typing import Iterator, Mapping

from .algebra import MultiPoly, Ring


class ExprError(ValueError):
    """Syntax or semantic error, with an optional 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class Expr:
    __slots__ = ()

    def symbols(self) -> set[str]:
        out: set[str] = set()
        self._collect(out)
        return out

    def _collect(self, out):
        for child in self.children():
            child._collect(out)

    def children(self) -> tuple["Expr", ...]:
        return ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True, slots=True)
class Sym(Expr):
    name: str

    def _collect(self, out):
        out.add(self.name)


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def children(self):
        return (self.base,)


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


# ---------------------------------------------------------------------------
# tokenizer

_PUNCT = {"+", "-", "*", "/", "^", "(", ")", "'", "=", ",", ":"}


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "number", "op", "end"
    text: str
    line: int
    col: int


def _is_name_start(ch: str) -> bool:
    return ch == "_" or ch.isalpha()


def _is_name_char(ch: str) -> bool:
    return ch == "_" or ch.isalnum()


def tokenize(text: str, line: int = 1) -> Iterator[Token]:
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == "#":
            break
        start = i
        if _is_name_start(ch):
            while i < n and _is_name_char(text[i]):
                i += 1
            yield Token("name", text[start:i], line, start + 1)
        elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            while i < n and (text[i].isdigit() or text[i] == "."):
                i += 1
            if i < n and text[i] in "eE" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] in "+-"):
                i += 2
                while i < n and text[i].isdigit():
                    i += 1
            yield Token("number", text[start:i], line, start + 1)
        elif text.startswith("**", i):
            i += 2
            yield Token("op", "^", line, start + 1)
        elif ch in _PUNCT:
            i += 1
            yield Token("op", ch, line, start + 1)
        else:
            raise ExprError(f"unexpected character {ch!r}", line, start + 1)
    yield Token("end", "", line, n + 1)


def parse_number(text: str, line: int | None = None, col: int | None = None) -> Fraction:
    try:
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        raise ExprError(f"malformed number {text!r}", line, col) from None


class ExprParser:
    """Recursive-descent parser over a token list.

    Grammar::

        expr   := term (('+' | '-') term)*
        term   := unary (('*' | '/') unary)*
        unary  := '-' unary | '+' unary | power
        power  := atom ('^' ['-'] NUMBER)?
        atom   := NUMBER | NAME | '(' expr ')'
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "end":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.kind != "op" or t.text != text:
            found = t.text or "end of line"
            raise ExprError(f"expected {text!r}, found {found!r}", t.line, t.col)
        return self.advance()

    def at(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.at("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.at("*", "/"):
            t = self.advance()
            right = self.parse_unary()
            if t.text == "/":
                if isinstance(right, Const) and right.value == 0:
                    raise ExprError("division by zero", t.line, t.col)
                if isinstance(left, Const) and isinstance(right, Const):
                    left = Const(left.value / right.value)
                    continue
            left = BinOp(t.text, left, right)
        return left

    def parse_unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            inner = self.parse_unary()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        if self.at("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.at("^"):
            t = self.advance()
            neg = False
            if self.at("-"):
                self.advance()
                neg = True
            num = self.tok
            if num.kind != "number":
                raise ExprError("exponent must be a nonnegative integer literal", t.line, t.col)
            self.advance()
            value = parse_number(num.text, num.line, num.col)
            if neg or value.denominator != 1 or value < 0:
                raise ExprError("exponent must be a nonnegative integer literal", num.line, num.col)
            return Pow(base, int(value))
        return base

    def parse_atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(parse_number(t.text, t.line, t.col))
        if t.kind == "name":
            self.advance()
            return Sym(t.text)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        found = t.text or "end of line"
        raise ExprError(f"expected an expression, found {found!r}", t.line, t.col)


def parse_expr(text: str, line: int = 1) -> Expr:
    parser = ExprParser(list(tokenize(text, line)))
    expr = parser.parse_expr()
    if parser.tok.kind != "end":
        t = parser.tok
        raise ExprError(f"unexpected {t.text!r}", t.line, t.col)
    return expr


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _const_text(v: Fraction) -> str:
    if v.denominator == 1:
        s = str(v.numerator)
    else:
        s = f"{abs(v.numerator)}/{v.denominator}"
        if v < 0:
            s = "-" + s
    return s


def to_text(e: Expr, rename: Mapping[str, str] | None = None) -> str:
    """Canonical infix text.  Parsing the result gives back an equal tree."""
    return _emit(e, 0, rename or {})


def _emit(e: Expr, ctx: int, rename) -> str:
    if isinstance(e, Const):
        s = _const_text(e.value)
        # fractions and negatives are atoms only when parenthesised
        if (e.value.denominator != 1 or e.value < 0) and ctx > 0:
            return f"({s})"
        return s
    if isinstance(e, Sym):
        return rename.get(e.name, e.name)
    if isinstance(e, Neg):
        s = "-" + _emit(e.operand, 3, rename)
        return f"({s})" if ctx > 0 else s
    if isinstance(e, Pow):
        return f"{_emit(e.base, 4, rename)}^{e.exponent}"
    assert isinstance(e, BinOp)
    prec = _PREC[e.op]
    left = _emit(e.left, prec, rename)
    # right operand of a left-associative operator needs a tighter context
    right = _emit(e.right, prec + 1, rename)
    s = f"{left} {e.op} {right}"
    return f"({s})" if ctx > prec else s


# ---------------------------------------------------------------------------
# unicode aliases

# unicode spells lambda as "lamda"
_GREEK_FIX = {"lamda": "lambda"}


def ascii_alias(name: str) -> str:
    """Replace Greek letters by their names, e.g. ``β`` -> ``beta``."""
    out = []
    for ch in name:
        if ord(ch) < 128:
            out.append(ch)
            continue
        uname = unicodedata.name(ch, "")
        if uname.startswith("GREEK SMALL LETTER "):
            word = uname[len("GREEK SMALL LETTER "):].split()[0].lower()
            out.append(_GREEK_FIX.get(word, word))
        elif uname.startswith("GREEK CAPITAL LETTER "):
            word = uname[len("GREEK CAPITAL LETTER "):].split()[0].lower()
            out.append(_GREEK_FIX.get(word, word).capitalize())
        else:
            decomposed = unicodedata.normalize("NFKD", ch).encode("ascii", "ignore").decode()
            out.append(decomposed or f"u{ord(ch):04x}")
    return "".join(out)


# ---------------------------------------------------------------------------
# conversion to rational functions

class RationalFunction:
    """A numerator polynomial over a list of denominator factors.

    Keeping the denominator factored lets sums over common denominators and
    simple cancellations happen without multivariate gcds.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: MultiPoly, factors: tuple[MultiPoly, ...] = ()):
        self.num = num
        self.factors = factors

    @property
    def ring(self) -> Ring:
        return self.num.ring

    def denominator(self) -> MultiPoly:
        d = self.ring.one()
        for f in self.factors:
            d = d * f
        return d

    def _merge(self, other: "RationalFunction"):
        # lcm of the two factor multisets, and the cofactors of each side
        remaining = list(other.factors)
        common = []
        mine_extra = []
        for f in self.factors:
            if f in remaining:
                remaining.remove(f)
                common.append(f)
            else:
                mine_extra.append(f)
        lcm = tuple(common + mine_extra + remaining)
        return lcm, tuple(remaining), tuple(mine_extra)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        lcm, co_self, co_other = self._merge(other)
        a = self.num
        for f in co_self:
            a = a * f
        b = other.num
        for f in co_other:
            b = b * f
        return RationalFunction(a + b, lcm).cancel()

    def __neg__(self):
        return RationalFunction(-self.num, self.factors)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.factors + other.factors).cancel()

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("division by a zero expression")
        return RationalFunction(self.denominator(), _factor_split(self.num)).cancel()

    def cancel(self) -> "RationalFunction":
        num = self.num
        kept = []
        for f in self.factors:
            q = num.exact_div(f) if num else num
            if q is not None:
                num = q
            else:
                kept.append(f)
        return RationalFunction(num, tuple(kept))


def _factor_split(p: MultiPoly) -> tuple[MultiPoly, ...]:
    """Split off the constant and monomial content so factors are normalized."""
    if p.is_constant():
        return (p,)
    # normalize: leading coefficient one, constant pulled out separately
    lc = p.leading_coefficient()
    monic = p.scale(Fraction(1) / Fraction(lc)) if p.ring.modulus is None else p.monic()
    if lc == 1:
        return (monic,)
    return (p.ring.constant(lc), monic)


def to_rational(e: Expr, ring: Ring, rename: Mapping[str, str] | None = None) -> RationalFunction:
    """Convert an expression tree to a rational function over ``ring`` (exact coefficients)."""
    rename = rename or {}
    if isinstance(e, Const):
        return RationalFunction(ring.constant(e.value))
    if isinstance(e, Sym):
        return RationalFunction(ring.var(rename.get(e.name, e.name)))
    if isinstance(e, Neg):
        return -to_rational(e.operand, ring, rename)
    if isinstance(e, Pow):
        base = to_rational(e.base, ring, rename)
        out = RationalFunction(ring.one())
        for _ in range(e.exponent):
            out = out * base
        return out
    assert isinstance(e, BinOp)
    a = to_rational(e.left, ring, rename)
    b = to_rational(e.right, ring, rename)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if not b.num:
        raise ExprError("division by an expression that is identically zero")
    return a * b.inverse()


def integer_fraction(rf: RationalFunction) -> tuple[MultiPoly, MultiPoly]:
    """Numerator and denominator with coprime integer coefficients.

    The denominator's leading coefficient is made positive.
    """
    num = rf.num
    den = rf.denominator()
    scale = 1
    for c in list(num.terms.values()) + list(den.terms.values()):
        if isinstance(c, Fraction):
            scale = scale * c.denominator // gcd(scale, c.denominator)
    num, den = num.scale(scale), den.scale(scale)
    g = gcd(num.content(), den.content()) if num else den.content()
    if g > 1:
        num = num.scale(Fraction(1, g))
        den = den.scale(Fraction(1, g))
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    return num, den
