"""Exact arithmetic: prime-field scalars, monomial orders and sparse polynomials.

Polynomials are stored in distributed form, as a dict mapping exponent tuples
(one entry per ring variable) to nonzero coefficients.  Coefficients are plain
Python ints reduced to ``[0, p)`` when the ring has a modulus, and ints or
:class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

DEFAULT_PRIME = 11863279


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, probabilistic beyond."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def inv_mod(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p`` by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse modulo {p}")
    r0, r1, s0, s1 = p, a, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


@dataclass(frozen=True)
class FpScalar:
    """An element of the prime field F_p."""

    value: int
    modulus: int = DEFAULT_PRIME

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.modulus != self.modulus:
                raise ValueError("scalars live in different prime fields")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.modulus)

    def inverse(self) -> "FpScalar":
        return FpScalar(inv_mod(self.value, self.modulus), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpScalar(self.value * inv_mod(o, self.modulus), self.modulus)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FpScalar({self.value}, {self.modulus})"


@dataclass(frozen=True)
class MonomialOrder:
    """Graded reverse lexicographic order, optionally with integer weights.

    With weights ``w`` the grading is ``sum(w_i * e_i)``; ties are broken by
    plain reverse lexicographic comparison of the exponents.
    """

    kind: str = "degrevlex"
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("degrevlex", "weighted-degrevlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
            if any(w <= 0 for w in self.weights):
                raise ValueError("monomial weights must be strictly positive")
        elif self.kind == "weighted-degrevlex":
            raise ValueError("weighted-degrevlex needs a weight vector")

    @classmethod
    def weighted(cls, weights: Sequence[int]) -> "MonomialOrder":
        return cls("weighted-degrevlex", tuple(weights))

    def degree(self, exps: Sequence[int]) -> int:
        if self.weights is None:
            return sum(exps)
        return sum(w * e for w, e in zip(self.weights, exps))

    def key(self, exps: tuple[int, ...]):
        """Sort key: larger key means larger monomial."""
        return (self.degree(exps), tuple(-e for e in reversed(exps)))


class Ring:
    """An ordered list of variables with a coefficient domain and a monomial order.

    ``modulus=None`` means exact integer/rational coefficients.
    """

    __slots__ = ("names", "modulus", "order", "index", "_hash")

    def __init__(self, names: Iterable[str], modulus: int | None = None,
                 order: MonomialOrder | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("ring variable names must be distinct")
        self.modulus = modulus
        self.order = order or MonomialOrder()
        if self.order.weights is not None and len(self.order.weights) != len(self.names):
            raise ValueError("weight vector length differs from the number of variables")
        self.index = {n: i for i, n in enumerate(self.names)}
        self._hash = hash((self.names, self.modulus, self.order))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return (isinstance(other, Ring) and self.names == other.names
                and self.modulus == other.modulus and self.order == other.order)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        dom = "ZZ" if self.modulus is None else f"GF({self.modulus})"
        return f"Ring({len(self.names)} vars over {dom}, {self.order.kind})"

    def with_modulus(self, modulus: int | None) -> "Ring":
        return Ring(self.names, modulus, self.order)

    def with_order(self, order: MonomialOrder) -> "Ring":
        return Ring(self.names, self.modulus, order)

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return self.constant(1)

    def constant(self, c) -> "MultiPoly":
        return MultiPoly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "MultiPoly":
        exps = [0] * self.nvars
        exps[self.index[name]] = 1
        return MultiPoly(self, {tuple(exps): 1})

    def gens(self) -> list["MultiPoly"]:
        return [self.var(n) for n in self.names]

    def normalize_coeff(self, c):
        if self.modulus is not None:
            if isinstance(c, Fraction):
                return c.numerator * inv_mod(c.denominator, self.modulus) % self.modulus
            return int(c) % self.modulus
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        return c


class MultiPoly:
    """Sparse multivariate polynomial over a :class:`Ring`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], object] | None = None,
                 *, _clean: bool = False):
        self.ring = ring
        if _clean:
            self.terms = terms
            return
        clean = {}
        n = ring.nvars
        for exps, c in (terms or {}).items():
            if len(exps) != n:
                raise ValueError("exponent vector length differs from the ring size")
            c = ring.normalize_coeff(c)
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    # construction helpers -------------------------------------------------
    @classmethod
    def from_terms(cls, ring: Ring, pairs: Iterable[tuple[tuple[int, ...], object]]) -> "MultiPoly":
        acc: dict = {}
        for e, c in pairs:
            acc[e] = acc.get(e, 0) + c
        return cls(ring, acc)

    def _new(self, terms: dict) -> "MultiPoly":
        return MultiPoly(self.ring, terms, _clean=True)

    # basic queries ---------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        zero = (0,) * self.ring.nvars
        return not self.terms or (len(self.terms) == 1 and zero in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.ring.nvars, 0)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other) if other else not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def support(self) -> set[str]:
        """Names of variables that occur in some term."""
        used = [False] * self.ring.nvars
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used[i] = True
        return {self.ring.names[i] for i, u in enumerate(used) if u}

    def degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        return max((e[i] for e in self.terms), default=-1)

    # arithmetic ---------------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if self.ring != other.ring:
            raise ValueError("polynomials belong to different rings")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, FpScalar)):
            return self.ring.constant(int(other) if isinstance(other, FpScalar) else other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        p = self.ring.modulus
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if p is not None:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.modulus
        if p is None:
            return self._new({e: -c for e, c in self.terms.items()})
        return self._new({e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "MultiPoly":
        c = self.ring.normalize_coeff(c)
        if not c:
            return self.ring.zero()
        p = self.ring.modulus
        if p is None:
            return self._new({e: v * c for e, v in self.terms.items()})
        return self._new({e: v * c % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, FpScalar):
            return self.scale(int(other))
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        p = self.ring.modulus
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                out[e] = out.get(e, 0) + ca * cb
        if p is None:
            return self._new({e: c for e, c in out.items() if c})
        return self._new({e: c % p for e, c in out.items() if c % p})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, exps: tuple[int, ...], c) -> "MultiPoly":
        p = self.ring.modulus
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if p is not None:
                w %= p
            if w:
                out[tuple([x + y for x, y in zip(e, exps)])] = w
        return self._new(out)

    def divmod_by(self, g: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single polynomial.

        The remainder is zero exactly when ``g`` divides ``self``.
        """
        self._check(g)
        if not g.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        order = self.ring.order
        lm = max(g.terms, key=order.key)
        lc = g.terms[lm]
        p = self.ring.modulus
        inv = inv_mod(lc, p) if p is not None else None
        rem = dict(self.terms)
        quo: dict = {}
        out_rem: dict = {}
        while rem:
            m = max(rem, key=order.key)
            c = rem[m]
            if all(a >= b for a, b in zip(m, lm)):
                qe = tuple(a - b for a, b in zip(m, lm))
                qc = c * inv % p if p is not None else Fraction(c) / lc
                if isinstance(qc, Fraction) and qc.denominator == 1:
                    qc = qc.numerator
                quo[qe] = qc
                for e, v in g.terms.items():
                    t = tuple(a + b for a, b in zip(e, qe))
                    w = rem.get(t, 0) - qc * v
                    if p is not None:
                        w %= p
                    if w:
                        rem[t] = w
                    else:
                        rem.pop(t, None)
            else:
                out_rem[m] = rem.pop(m)
        return MultiPoly(self.ring, quo), MultiPoly(self.ring, out_rem)

    def exact_div(self, g: "MultiPoly") -> "MultiPoly | None":
        q, r = self.divmod_by(g)
        return None if r else q

    # calculus and evaluation -------------------------------------------------
    def total_degree(self) -> int:
        """Maximum total degree of a term; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def diff(self, name: str) -> "MultiPoly":
        """Formal partial derivative with respect to ``name``."""
        i = self.ring.index[name]
        p = self.ring.modulus
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                w = c * k
                if p is not None:
                    w %= p
                if w:
                    ne = list(e)
                    ne[i] = k - 1
                    out[tuple(ne)] = w
        return self._new(out)

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a full assignment of the ring variables."""
        names = self.ring.names
        vals = [point[n] for n in names]
        p = self.ring.modulus
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * (pow(v, k, p) if p is not None else v ** k)
                    if p is not None:
                        t %= p
            total += t
        return total % p if p is not None else total

    def subs(self, values: Mapping[str, object], ring: Ring | None = None) -> "MultiPoly":
        """Substitute constants for some variables.

        The result lives in ``ring`` (which must contain every surviving
        variable), or in the current ring with the substituted variables kept
        at exponent zero.
        """
        src = self.ring
        target = ring or src
        p = target.modulus
        used = self.support()
        fixed = [(i, values[n]) for i, n in enumerate(src.names) if n in values and n in used]
        keep = []
        for i, n in enumerate(src.names):
            if n in used and n not in values:
                if n not in target.index:
                    raise ValueError(f"target ring lacks variable {n!r}")
                keep.append((i, target.index[n]))
        nt = target.nvars
        out: dict = {}
        for e, c in self.terms.items():
            for i, v in fixed:
                k = e[i]
                if k:
                    c = c * (pow(v, k, p) if p is not None else v ** k)
            ne = [0] * nt
            for i, j in keep:
                ne[j] = e[i]
            t = tuple(ne)
            out[t] = out.get(t, 0) + c
        return MultiPoly(target, out)

    def change_ring(self, ring: Ring) -> "MultiPoly":
        """Re-express the polynomial in a ring holding all of its variables."""
        idx = []
        for name in self.support():
            if name not in ring.index:
                raise ValueError(f"variable {name!r} missing from target ring")
        for i, n in enumerate(self.ring.names):
            idx.append(ring.index.get(n))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    ne[idx[i]] = k
            out[tuple(ne)] = c
        return MultiPoly(ring, out)

    # ordering -------------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        key = self.ring.order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_monomial(self) -> tuple[int, ...]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.order.key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if self.ring.modulus is None:
            return self.scale(Fraction(1) / lc)
        return self.scale(inv_mod(lc, self.ring.modulus))

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c))
        return g

    # text -----------------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r})"


def format_monomial(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_poly(f: MultiPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text: terms in decreasing monomial order, explicit ``*`` and ``^``.

    Coefficients over F_p are printed as their representative in ``[0, p)``.
    """
    names = names or f.ring.names
    if not f.terms:
        return "0"
    out = []
    for exps, c in f.sorted_terms():
        mono = format_monomial(names, exps)
        neg = c < 0
        a = -c if neg else c
        if isinstance(a, Fraction):
            cstr = f"{a.numerator}/{a.denominator}"
        else:
            cstr = str(a)
        if not mono:
            body = cstr
        elif a == 1:
            body = mono
        else:
            body = f"{cstr}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def total_degree(f: MultiPoly) -> int:
    return f.total_degree()


def partial_derivative(f: MultiPoly, name: str) -> MultiPoly:
    return f.diff(name)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.ring != b.ring:
        raise ValueError("polynomials belong to different rings")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")
