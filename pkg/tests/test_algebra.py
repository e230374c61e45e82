import pytest
from hypothesis import given, settings, strategies as st

from identforge.algebra import (FpScalar, MonomialOrder, MultiPoly, Ring, format_poly, inv_mod,
                                is_prime, partial_derivative, poly_arith, total_degree)

P = 11863279


def test_prime_checks():
    assert is_prime(P)
    assert is_prime(101) and not is_prime(100) and not is_prime(1)
    assert inv_mod(3, 7) == 5


def test_fp_scalar():
    a, b = FpScalar(3, 7), FpScalar(5, 7)
    assert (a * b).value == 1
    assert (a - b).value == 5
    assert (a / b).value == (3 * 3) % 7
    with pytest.raises(ValueError):
        a + FpScalar(1, 11)


def test_difference_of_squares():
    R = Ring(["x", "y"])
    x, y = R.gens()
    assert poly_arith(x + y, x - y, "mul") == x**2 - y**2


def test_additive_identity():
    R = Ring(["a"])
    a = R.var("a")
    assert poly_arith(a, R.zero(), "add") == a


def test_modular_product():
    R = Ring(["x"], 7)
    x = R.var("x")
    assert (x.scale(3) * x.scale(5)) == x**2
    assert format_poly(x.scale(3) * x.scale(5)) == "x^2"


def test_ring_mismatch():
    with pytest.raises(ValueError):
        poly_arith(Ring(["x"]).var("x"), Ring(["y"]).var("y"), "add")
    with pytest.raises(ValueError):
        poly_arith(Ring(["x"]).var("x"), Ring(["x"]).var("x"), "pow")


def test_total_degree_examples():
    R = Ring(["p1", "x1", "x2", "y", "z", "x"])
    p1, x1, x2, y, z, x = R.gens()
    assert total_degree(p1**10 * x1**5 * x2**5) == 20
    assert total_degree(R.constant(5)) == 0
    assert total_degree(x * y * z + x**4) == 4
    assert total_degree(R.zero()) == -1


def test_partial_derivative_examples():
    R = Ring(["x", "y", "c"])
    x, y, c = R.gens()
    assert partial_derivative(x**2 * y, "x") == (x * y).scale(2)
    assert partial_derivative(c, "x") == R.zero()
    assert partial_derivative(x**3 + x, "x") == (x**2).scale(3) + 1


def test_order_keys():
    o = MonomialOrder()
    # degree first, then the smaller last exponent wins
    assert o.key((2, 0, 0)) > o.key((0, 0, 1))
    assert o.key((1, 1, 0)) > o.key((1, 0, 1))
    w = MonomialOrder.weighted([1, 5])
    assert w.key((0, 1)) > w.key((3, 0))
    with pytest.raises(ValueError):
        MonomialOrder.weighted([1, 0])


def test_canonical_text():
    R = Ring(["x", "y"])
    x, y = R.gens()
    assert format_poly(x**2 * y - y.scale(3) + 1) == "x^2*y - 3*y + 1"


def test_subs_and_evaluate():
    R = Ring(["x", "y"], 101)
    x, y = R.gens()
    f = x**2 + x * y
    assert f.evaluate({"x": 3, "y": 4}) == 21
    S = Ring(["y"], 101)
    assert f.subs({"x": 2}, ring=S) == S.var("y").scale(2) + 4


# --- properties ---------------------------------------------------------------

NAMES = ["a", "b", "c"]


def polys(modulus):
    ring = Ring(NAMES, modulus)
    exps = st.tuples(*[st.integers(0, 3)] * len(NAMES))
    coeff = st.integers(-50, 50)
    return st.dictionaries(exps, coeff, max_size=5).map(lambda d: MultiPoly(ring, d))


@pytest.mark.parametrize("modulus", [None, 101])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_ring_axioms(modulus, data):
    f, g, h = (data.draw(polys(modulus)) for _ in range(3))
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f and f + g == g + f
    assert f - f == f.ring.zero()


@pytest.mark.parametrize("modulus", [None, 101])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_leibniz(modulus, data):
    f, g = data.draw(polys(modulus)), data.draw(polys(modulus))
    for v in NAMES:
        assert (f * g).diff(v) == f * g.diff(v) + g * f.diff(v)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_degree_additive_over_field(data):
    f, g = data.draw(polys(101)), data.draw(polys(101))
    if f and g:
        assert total_degree(f * g) == total_degree(f) + total_degree(g)
