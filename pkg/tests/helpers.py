"""Small hand-built polynomial systems and Groebner-basis checks for the tests."""

import itertools

from identforge.algebra import Ring
from identforge.groebner import s_polynomial
from identforge.prolongation import PARAM, PolySystem, VarInfo


def tiny_system(names, build, witness, prime=101):
    """``build`` maps the ring generators to a list of polynomials."""
    ring = Ring(names, prime)
    polys = build(*ring.gens())
    table = {n: VarInfo(n, PARAM, n) for n in names}
    return PolySystem(ring=ring, polys=polys, vars=table, prime=prime, witness=dict(witness))


def naive_reduce(f, G):
    """Textbook multivariate division; independent of the packed engine."""
    one = f.ring.one()
    rem, p = f.ring.zero(), f
    while p:
        lm = p.leading_monomial()
        lc = int(p.terms[lm])
        for g in G:
            gm = g.leading_monomial()
            if all(a >= b for a, b in zip(lm, gm)):
                q = tuple(a - b for a, b in zip(lm, gm))
                p = p - g.mul_term(q, lc * pow(int(g.terms[gm]), -1, f.ring.modulus))
                break
        else:
            rem = rem + one.mul_term(lm, lc)
            p = p - one.mul_term(lm, lc)
    return rem


def random_poly(ring, rnd, terms=4, deg=3):
    f = ring.zero()
    for _ in range(terms):
        e = tuple(rnd.randint(0, deg) for _ in ring.names)
        while sum(e) > deg:
            e = tuple(max(0, x - 1) for x in e)
        f = f + ring.one().mul_term(e, rnd.randint(1, ring.modulus - 1))
    return f


def check_groebner(G, F):
    gens = G.generators
    for f in F:
        assert not naive_reduce(f, gens)
    for g, h in itertools.combinations(gens, 2):
        assert not naive_reduce(s_polynomial(g, h), gens)
    leads = [g.leading_monomial() for g in gens]
    for g in gens:
        assert int(g.leading_coefficient()) == 1
        for e in g.terms:
            for lm in leads:
                if lm != g.leading_monomial():
                    assert not all(a >= b for a, b in zip(e, lm))
