"""Buchberger's algorithm over F_p and the identifiability classifier.

Monomials are packed into single Python integers whose natural order is the
(weighted) degree reverse lexicographic order::

    key = wdeg << (16 n)  |  sum_i (MAX - e_i) << (16 i)

The last variable sits in the most significant exponent field, so among
monomials of equal weighted degree the one with the smaller last exponent
compares larger.  Multiplying monomials is ``ka + kb - one`` and
divisibility is a single mask test on guard bits.
"""

from __future__ import annotations

import heapq
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import MonomialOrder, MultiPoly, Ring
from .basis import JacobianData
from .prolongation import PolySystem

log = logging.getLogger(__name__)

FIELD_BITS = 16
MAX_EXP = (1 << (FIELD_BITS - 1)) - 1
DEFAULT_MAX_PAIRS = 10**6
DEFAULT_MAX_SECONDS = 600.0
BUDGET_ENV = "IDENTFORGE_BUDGET_SECS"
STRATEGIES = ("normal", "sugar")


def default_time_budget() -> float:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return float(raw)
        except ValueError:
            log.warning("ignoring malformed %s=%r", BUDGET_ENV, raw)
    return DEFAULT_MAX_SECONDS


class IncompleteBasisError(RuntimeError):
    """Classification was requested on a budget-truncated basis."""


class InconsistentSystemError(RuntimeError):
    """The ideal is the whole ring: the system has no solution."""


class _Deadline(Exception):
    pass


class _Packer:
    def __init__(self, weights: Sequence[int]):
        self.n = n = len(weights)
        self.weights = tuple(weights)
        self.dshift = FIELD_BITS * n
        self.one = sum(MAX_EXP << (FIELD_BITS * i) for i in range(n))
        self.guard = sum((1 << (FIELD_BITS - 1)) << (FIELD_BITS * i) for i in range(n))
        self.emask = (1 << self.dshift) - 1

    def pack(self, exps: Sequence[int]) -> int:
        if any(e > MAX_EXP for e in exps):
            raise OverflowError("exponent too large for the packed representation")
        w = sum(a * b for a, b in zip(exps, self.weights))
        k = w << self.dshift
        for i, e in enumerate(exps):
            k |= (MAX_EXP - e) << (FIELD_BITS * i)
        return k

    def unpack(self, key: int) -> tuple[int, ...]:
        mask = (1 << FIELD_BITS) - 1
        return tuple(MAX_EXP - ((key >> (FIELD_BITS * i)) & mask) for i in range(self.n))

    def divides(self, a: int, b: int) -> bool:
        return not ((b - a + self.one) & self.guard)

    def lcm(self, ea: tuple[int, ...], eb: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(x if x > y else y for x, y in zip(ea, eb))


@dataclass
class _Poly:
    """Monic polynomial: descending keys and matching coefficients."""

    keys: list[int]
    coeffs: list[int]
    exps: tuple[int, ...]
    support: int  # bitmask of variables in the leading monomial

    @property
    def lead(self) -> int:
        return self.keys[0]


def _make(packer: _Packer, terms: dict[int, int], p: int) -> _Poly | None:
    if not terms:
        return None
    keys = sorted(terms, reverse=True)
    inv = pow(terms[keys[0]], p - 2, p)
    coeffs = [terms[k] * inv % p for k in keys]
    exps = packer.unpack(keys[0])
    mask = 0
    for i, e in enumerate(exps):
        if e:
            mask |= 1 << i
    return _Poly(keys, coeffs, exps, mask)


def _reduce(terms: dict[int, int], basis: Sequence[_Poly], packer: _Packer, p: int,
            full: bool = True, deadline: float | None = None) -> dict[int, int]:
    """Remainder of ``terms`` modulo polys in ``basis`` (all monic)."""
    one, guard = packer.one, packer.guard
    steps = 0
    h = {k: c for k, c in terms.items() if c % p}
    heap = [-k for k in h]
    heapq.heapify(heap)
    out: dict[int, int] = {}
    leads = [(g.lead, g) for g in basis]
    while heap:
        k = -heapq.heappop(heap)
        c = h.pop(k, 0)
        if not c:
            continue
        div = None
        for lk, g in leads:
            if not ((k - lk + one) & guard):
                div = g
                break
        if div is None:
            out[k] = c
            if not full:
                out.update({kk: v for kk, v in h.items() if v})
                return out
            continue
        if deadline is not None:
            steps += 1
            if not steps & 1023 and time.perf_counter() > deadline:
                raise _Deadline
        shift = k - div.lead
        gk, gc = div.keys, div.coeffs
        for idx in range(1, len(gk)):
            nk = gk[idx] + shift
            old = h.get(nk)
            if old is None:
                v = (-c * gc[idx]) % p
                h[nk] = v
                heapq.heappush(heap, -nk)
            else:
                v = (old - c * gc[idx]) % p
                if v:
                    h[nk] = v
                else:
                    del h[nk]
    return out


@dataclass
class GBStats:
    pairs: int = 0
    zero_reductions: int = 0
    product_skips: int = 0
    chain_skips: int = 0
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class GroebnerBasis:
    generators: list[MultiPoly]
    order: MonomialOrder
    ring: Ring
    stats: GBStats = field(default_factory=GBStats)
    complete: bool = True
    _packer: _Packer | None = field(default=None, repr=False)
    _polys: list[_Poly] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [g.exps for g in self._polys]


def _to_terms(f: MultiPoly, packer: _Packer, p: int) -> dict[int, int]:
    return {packer.pack(e): int(c) % p for e, c in f.terms.items() if int(c) % p}


def _from_terms(terms: Mapping[int, int], packer: _Packer, ring: Ring) -> MultiPoly:
    return MultiPoly(ring, {packer.unpack(k): c for k, c in terms.items() if c}, _clean=True)


def _packer_for(ring: Ring) -> _Packer:
    w = ring.order.weights or (1,) * ring.nvars
    return _Packer(w)


def _prime_of(ring: Ring) -> int:
    if ring.modulus is None:
        raise ValueError("Groebner bases are computed over F_p; the ring has no modulus")
    return ring.modulus


def _spoly(f: _Poly, g: _Poly, lcm_key: int, p: int) -> dict[int, int]:
    out: dict[int, int] = {}
    sf = lcm_key - f.lead
    for k, c in zip(f.keys[1:], f.coeffs[1:]):
        out[k + sf] = c
    sg = lcm_key - g.lead
    for k, c in zip(g.keys[1:], g.coeffs[1:]):
        nk = k + sg
        v = (out.get(nk, 0) - c) % p
        if v:
            out[nk] = v
        else:
            out.pop(nk, None)
    return out


def buchberger(sys: PolySystem | Sequence[MultiPoly], order: MonomialOrder | None = None, *,
               max_pairs: int = DEFAULT_MAX_PAIRS, max_seconds: float | None = None,
               strategy: str = "normal") -> GroebnerBasis:
    """Reduced Groebner basis.

    ``strategy="normal"`` treats the pair with the smallest lcm first;
    ``"sugar"`` orders pairs by their sugar degree, then by lcm.  Pairs are pruned with the Gebauer-Moeller installation of Buchberger's
    product and chain criteria.  When the pair or time budget runs out the
    partial basis is returned with ``complete=False``.
    """
    polys = list(sys.polys if isinstance(sys, PolySystem) else sys)
    if isinstance(sys, PolySystem):
        ring = sys.ring
    elif polys:
        ring = polys[0].ring
    else:
        raise ValueError("cannot infer the ring of an empty generator list")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        polys = [MultiPoly(ring, dict(f.terms), _clean=True) for f in polys]
    order = ring.order
    p = _prime_of(ring)
    packer = _packer_for(ring)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown selection strategy {strategy!r}")
    use_sugar = strategy == "sugar"
    budget = default_time_budget() if max_seconds is None else max_seconds
    start = time.perf_counter()
    stats = GBStats()

    G: list[_Poly] = []
    active: list[bool] = []
    sugar: list[int] = []
    pairs: list[tuple[int, int, int, int, int]] = []  # (sugar, lcm key, counter, i, j)
    dshift = packer.dshift

    def pair_sugar(i: int, j: int, l: int) -> int:
        if not use_sugar:
            return 0
        d = l >> dshift
        return max(sugar[i] + d - (G[i].lead >> dshift), sugar[j] + d - (G[j].lead >> dshift))
    counter = 0
    complete = True

    def lcm_of(i: int, j: int) -> int:
        return packer.pack(packer.lcm(G[i].exps, G[j].exps))

    def insert(h: _Poly, s: int) -> None:
        nonlocal counter, pairs
        t = len(G)
        G.append(h)
        sugar.append(s)
        active.append(True)
        # Gebauer-Moeller update.  M: drop (i, t) when another new pair has
        # an lcm strictly dividing its lcm.  F: keep one pair per lcm, and
        # none when some pair with that lcm is coprime (product criterion).
        cand = [(i, lcm_of(i, t), not (G[i].support & h.support)) for i in range(t) if active[i]]
        groups: dict[int, list] = {}
        lcms = [c[1] for c in cand]
        for i, l_i, coprime in cand:
            if any(l_j != l_i and packer.divides(l_j, l_i) for l_j in lcms):
                stats.chain_skips += 1
                continue
            groups.setdefault(l_i, []).append((i, coprime))
        new_pairs = []
        for l_i, members in groups.items():
            stats.chain_skips += len(members) - 1
            if any(c for _, c in members):
                stats.product_skips += 1
                continue
            counter += 1
            i0 = members[0][0]
            new_pairs.append((pair_sugar(i0, t, l_i), l_i, counter, i0, t))
        lead = h.lead
        survivors = []
        for pr in pairs:
            _, l_ij, _, i, j = pr
            if (packer.divides(lead, l_ij) and lcm_of(i, t) != l_ij and lcm_of(j, t) != l_ij):
                stats.chain_skips += 1
                continue
            survivors.append(pr)
        pairs = survivors + new_pairs
        heapq.heapify(pairs)
        for i in range(t):
            if active[i] and packer.divides(lead, G[i].lead):
                active[i] = False

    initial = []
    for f in polys:
        made = _make(packer, _to_terms(f, packer, p), p)
        if made is not None:
            initial.append(made)
    initial.sort(key=lambda g: g.lead)
    for f in initial:
        basis = [g for g, a in zip(G, active) if a]
        r = _reduce(dict(zip(f.keys, f.coeffs)), basis, packer, p)
        h = _make(packer, r, p)
        if h is None:
            continue
        insert(h, h.lead >> dshift)
        if h.lead == packer.one:
            break

    unit = any(a and g.lead == packer.one for g, a in zip(G, active))
    while pairs and not unit:
        if stats.pairs >= max_pairs or time.perf_counter() - start > budget:
            complete = False
            break
        s_ij, l_ij, _, i, j = heapq.heappop(pairs)
        stats.pairs += 1
        s = _spoly(G[i], G[j], l_ij, p)
        basis = [g for g, a in zip(G, active) if a]
        try:
            r = _reduce(s, basis, packer, p, deadline=start + budget)
        except _Deadline:
            complete = False
            break
        h = _make(packer, r, p)
        if h is None:
            stats.zero_reductions += 1
            continue
        insert(h, s_ij if use_sugar else h.lead >> dshift)
        if h.lead == packer.one:
            unit = True

    if unit:
        final = [_make(packer, {packer.one: 1}, p)]
    elif not complete:
        final = sorted((g for g, a in zip(G, active) if a), key=lambda g: g.lead)
    else:
        final = _interreduce([g for g, a in zip(G, active) if a], packer, p)
    stats.seconds = time.perf_counter() - start
    gens = [_from_terms(dict(zip(g.keys, g.coeffs)), packer, ring) for g in final]
    return GroebnerBasis(gens, order, ring, stats, complete, packer, final)


def _interreduce(polys: list[_Poly], packer: _Packer, p: int) -> list[_Poly]:
    # minimal basis: drop elements whose lead is divisible by another lead
    polys = sorted(polys, key=lambda g: g.lead)
    minimal: list[_Poly] = []
    for g in polys:
        if not any(packer.divides(m.lead, g.lead) for m in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        tail = dict(zip(g.keys[1:], g.coeffs[1:]))
        r = _reduce(tail, others, packer, p)
        r[g.lead] = 1
        out.append(_make(packer, r, p))
    out.sort(key=lambda g: g.lead)
    return out


def normal_form(f: MultiPoly, G: GroebnerBasis) -> MultiPoly:
    """Fully reduced remainder of ``f`` modulo ``G``."""
    ring = G.ring
    if f.ring.names != ring.names:
        raise ValueError("polynomial and basis live in different rings")
    f = MultiPoly(ring, dict(f.terms), _clean=True) if f.ring != ring else f
    p = _prime_of(ring)
    r = _reduce(_to_terms(f, G._packer, p), G._polys, G._packer, p)
    return _from_terms(r, G._packer, ring)


def s_polynomial(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """S-polynomial of two nonzero polynomials over F_p (monic scaling)."""
    ring = f.ring
    p = _prime_of(ring)
    packer = _packer_for(ring)
    a = _make(packer, _to_terms(f, packer, p), p)
    b = _make(packer, _to_terms(g, packer, p), p)
    if a is None or b is None:
        raise ValueError("S-polynomial of the zero polynomial")
    l = packer.pack(packer.lcm(a.exps, b.exps))
    return _from_terms(_spoly(a, b, l, p), packer, ring)


def reduces_to_zero(f: MultiPoly, G: GroebnerBasis) -> bool:
    return not normal_form(f, G)


# ---------------------------------------------------------------------------
# identifiability classification

GLOBAL, LOCAL, NONID, SUBSTITUTED = "globally identifiable", "locally identifiable", "non-identifiable", "substituted"


@dataclass
class IdentReport:
    """Per-unknown classification, keyed by display label."""

    classes: dict[str, str]
    witness: dict[str, int]
    substitution: dict | None = None
    model: str = ""

    def of(self, label: str) -> str:
        return self.classes[label]

    def with_class(self, cls: str) -> list[str]:
        return [k for k, v in self.classes.items() if v == cls]

    def to_json(self) -> str:
        return json.dumps({"model": self.model, "classes": self.classes, "witness": self.witness,
                           "substitution": self.substitution}, ensure_ascii=False, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IdentReport":
        d = json.loads(text)
        return cls(d["classes"], d["witness"], d.get("substitution"), d.get("model", ""))


def classify(G: GroebnerBasis, sys: PolySystem, *, local: JacobianData | None = None,
             substitution=None) -> IdentReport:
    """Classify parameters and initial conditions.

    Global: the normal form of the variable is its witness value.  Local:
    the variable is fixed by the Jacobian of the unsubstituted system but
    its normal form is not that constant.  Otherwise non-identifiable.
    """
    if not G.complete:
        raise IncompleteBasisError("the Groebner basis was truncated by the budget")
    if G.is_unit:
        raise InconsistentSystemError("the system has no solutions")
    root = sys.root
    local = local or JacobianData(root)
    p = sys.prime
    classes: dict[str, str] = {}
    witness: dict[str, int] = {}
    for name in root.ring.names:
        info = root.vars[name]
        if not info.eligible:
            continue
        label = info.label
        if name in sys.substituted:
            classes[label] = SUBSTITUTED
            witness[label] = sys.substituted[name]
            continue
        value = root.witness[name] % p
        witness[label] = value
        if not local.identifiable_locally(name):
            classes[label] = NONID
            continue
        nf = normal_form(sys.ring.var(name), G)
        if nf.is_constant() and int(nf.constant_value() or 0) % p == value:
            classes[label] = GLOBAL
        else:
            classes[label] = LOCAL
    sub = substitution.__dict__ if substitution is not None and hasattr(substitution, "__dict__") else substitution
    return IdentReport(classes, witness, sub, sys.model_name)


# ---------------------------------------------------------------------------
# export to external engines

_RESERVED = {
    "maple": {"D", "I", "Pi", "gamma", "lambda", "beta", "sigma", "delta", "Digits", "E", "O", "Order",
              "and", "or", "not", "in", "do", "od", "if", "fi", "then", "else", "end", "for", "from",
              "to", "by", "while", "proc", "local", "global", "option", "mod", "union", "minus",
              "intersect", "subset", "xor", "implies", "use", "module", "description", "error",
              "return", "break", "next", "try", "catch", "finally", "quit", "done", "stop"},
    "magma": {"and", "or", "not", "in", "do", "end", "if", "then", "else", "elif", "for", "while",
              "function", "procedure", "return", "select", "by", "to", "is", "cat", "div", "mod",
              "eq", "ne", "lt", "gt", "le", "ge", "where", "case", "when", "true", "false", "time",
              "assert", "error", "print", "quit", "load", "forward", "local", "exists", "forall",
              "random", "repeat", "until", "break", "continue", "delete", "diff", "join", "meet",
              "sdiff", "subset", "notin", "notsubset", "adj", "xor", "cmpeq", "cmpne", "eval"},
    "generic": set(),
}

FORMATS = ("maple", "magma", "generic")


def _rename_table(names: Sequence[str], fmt: str) -> dict[str, str]:
    reserved = _RESERVED[fmt]
    out, used = {}, set(names)
    for n in names:
        if n in reserved:
            m = n + "_"
            while m in used:
                m += "_"
            used.add(m)
            out[n] = m
        else:
            out[n] = n
    return out


def _poly_text(f: MultiPoly, rename: Mapping[str, str]) -> str:
    if not f:
        return "0"
    parts = []
    for exps, c in f.sorted_terms():
        mono = [rename[n] + (f"^{e}" if e > 1 else "") for n, e in zip(f.ring.names, exps) if e]
        c = int(c)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(mono))
        else:
            parts.append(f"{c}*" + "*".join(mono))
    return " + ".join(parts)


def export_system(sys: PolySystem, fmt: str = "generic", order: MonomialOrder | None = None) -> str:
    """Input script for an external Groebner engine over F_p."""
    if fmt not in FORMATS:
        raise ValueError(f"unsupported export format {fmt!r}; choose from {', '.join(FORMATS)}")
    if order is not None and order != sys.ring.order:
        sys = sys.with_order(order)
    order = sys.ring.order
    names = list(sys.ring.names)
    ren = _rename_table(names, fmt)
    vars_ = [ren[n] for n in names]
    polys = [_poly_text(f, ren) for f in sys.polys if f]
    weights = list(order.weights) if order.weights is not None else None
    p = sys.prime
    lines = []
    if not polys:
        warn = "warning: empty system"
    else:
        warn = None
    if fmt == "maple":
        lines.append(f"# identforge export: {len(names)} variables, {len(polys)} polynomials")
        if warn:
            lines.append(f"# {warn}")
        lines.append("with(Groebner):")
        lines.append(f"vars := [{', '.join(vars_)}]:")
        if weights:
            lines.append(f"weights := [{', '.join(map(str, weights))}]:")
            lines.append("ord := wdeg(weights, vars):")
        else:
            lines.append("ord := tdeg(op(vars)):")
        lines.append("sys := [" + ",\n  ".join(polys) + "]:")
        lines.append(f"GB := Groebner:-Basis(sys, ord, characteristic = {p}, method = fgb):")
    elif fmt == "magma":
        lines.append(f"// identforge export: {len(names)} variables, {len(polys)} polynomials")
        if warn:
            lines.append(f"// {warn}")
        lines.append(f"F := GF({p});")
        if weights:
            lines.append(f"P<{', '.join(vars_)}> := PolynomialRing(F, {len(names)}, \"grevlexw\", "
                         f"[{', '.join(map(str, weights))}]);")
        else:
            lines.append(f"P<{', '.join(vars_)}> := PolynomialRing(F, {len(names)}, \"grevlex\");")
        lines.append("I := ideal<P | " + ",\n  ".join(polys) + ">;")
        lines.append("time GB := GroebnerBasis(I);")
    else:
        lines.append(f"# identforge export: {len(names)} variables, {len(polys)} polynomials")
        if warn:
            lines.append(f"# {warn}")
        lines.append(f"characteristic {p}")
        lines.append("variables " + " ".join(vars_))
        lines.append("order " + ("weighted-degrevlex" if weights else "degrevlex"))
        if weights:
            lines.append("weights " + " ".join(map(str, weights)))
        lines.extend("poly " + t for t in polys)
        lines.append("groebner")
    return "\n".join(lines) + "\n"


@dataclass
class ExportedSystem:
    prime: int
    variables: list[str]
    weights: list[int] | None
    polys: list[MultiPoly]


def read_export(text: str, fmt: str = "generic") -> ExportedSystem:
    """Parse a script written by :func:`export_system` (all three formats)."""
    import re

    from .prolongation import parse_poly

    if fmt not in FORMATS:
        raise ValueError(f"unsupported export format {fmt!r}")
    body = "\n".join(l for l in text.splitlines() if not l.lstrip().startswith(("#", "//")))
    weights = None
    if fmt == "generic":
        prime, names, polys_txt = 0, [], []
        for line in body.splitlines():
            key, _, rest = line.partition(" ")
            if key == "characteristic":
                prime = int(rest)
            elif key == "variables":
                names = rest.split()
            elif key == "weights":
                weights = [int(w) for w in rest.split()]
            elif key == "poly":
                polys_txt.append(rest)
    elif fmt == "maple":
        prime = int(re.search(r"characteristic\s*=\s*(\d+)", body).group(1))
        names = [v.strip() for v in re.search(r"vars := \[(.*?)\]:", body, re.S).group(1).split(",") if v.strip()]
        m = re.search(r"weights := \[(.*?)\]:", body, re.S)
        if m:
            weights = [int(w) for w in m.group(1).split(",")]
        inner = re.search(r"sys := \[(.*?)\]:", body, re.S).group(1)
        polys_txt = [t.strip() for t in inner.split(",\n") if t.strip()]
    else:
        prime = int(re.search(r"GF\((\d+)\)", body).group(1))
        names = [v.strip() for v in re.search(r"P<(.*?)>", body, re.S).group(1).split(",") if v.strip()]
        m = re.search(r"\"grevlexw\",\s*\[(.*?)\]", body, re.S)
        if m:
            weights = [int(w) for w in m.group(1).split(",")]
        inner = re.search(r"ideal<P \|(.*?)>;", body, re.S).group(1)
        polys_txt = [t.strip() for t in inner.split(",\n") if t.strip()]
    order = MonomialOrder.weighted(weights) if weights else MonomialOrder()
    ring = Ring(names, prime, order)
    polys = [parse_poly(t, ring) for t in polys_txt]
    return ExportedSystem(prime, names, weights, polys)
