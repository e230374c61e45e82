import random

import pytest

from conftest import bundled_system
from helpers import check_groebner, random_poly, tiny_system
from identforge.algebra import MonomialOrder, Ring
from identforge.groebner import (BUDGET_ENV, GLOBAL, LOCAL, NONID, IdentReport, IncompleteBasisError,
                                 InconsistentSystemError, buchberger, classify, default_time_budget,
                                 export_system, normal_form, read_export, reduces_to_zero)
from identforge.substitution import substitute_basis


def test_linear_and_unit_examples():
    R = Ring(["x", "y"], 101)
    x, y = R.gens()
    G = buchberger([x * y - 3 * y, y - 1])
    assert sorted(str(g) for g in G.generators) == ["x + 98", "y + 100"]
    assert normal_form(x**2, G) == R.constant(9)
    U = buchberger([x - 1, x - 2])
    assert U.is_unit and U.generators == [R.one()]


def test_two_point_ideal():
    # {x^2 - 1, y^2 - y, x*y - y}: the points (1, 1), (1, 0), (-1, 0)
    R = Ring(["x", "y"], 101)
    x, y = R.gens()
    F = [x**2 - 1, y**2 - y, x * y - y]
    G = buchberger(F)
    check_groebner(G, F)
    pts = {(a, b) for a in range(101) for b in range(101)
           if all(f.evaluate({"x": a, "y": b}) == 0 for f in G.generators)}
    assert pts == {(1, 1), (1, 0), (100, 0)}


@pytest.mark.parametrize("seed", range(220))
def test_random_ideals(seed):
    rnd = random.Random(seed)
    n = rnd.randint(2, 3)
    R = Ring(["a", "b", "c"][:n], 101)
    F = [random_poly(R, rnd, terms=rnd.randint(2, 4), deg=rnd.randint(1, 3)) for _ in range(rnd.randint(1, 3))]
    F = [f for f in F if f] or [R.var("a")]
    G = buchberger(F)
    assert G.complete
    if not G.is_unit:
        check_groebner(G, F)
    shuffled = list(F)
    rnd.shuffle(shuffled)
    shuffled = [f.scale(rnd.randint(1, 100)) for f in shuffled]
    assert buchberger(shuffled).generators == G.generators
    assert buchberger(F, strategy="sugar").generators == G.generators


def test_normal_form_properties():
    rnd = random.Random(5)
    R = Ring(["x", "y", "z"], 101)
    F = [random_poly(R, rnd) for _ in range(3)]
    G = buchberger(F)
    for _ in range(20):
        f, g = random_poly(R, rnd), random_poly(R, rnd)
        nf = normal_form(f, G)
        assert normal_form(nf, G) == nf
        assert normal_form(f + g, G) == nf + normal_form(g, G)
        assert normal_form(f.scale(7), G) == nf.scale(7)
        assert reduces_to_zero(f - nf, G)


def test_weighted_order_is_a_groebner_basis():
    R = Ring(["x", "y", "z"], 101)
    x, y, z = R.gens()
    F = [x**2 + y * z - 2, y**2 - x * z + 1, z**2 - x - y]
    w = MonomialOrder.weighted([3, 1, 2])
    G = buchberger(F, w)
    assert G.order == w
    Rw = R.with_order(w)
    check_groebner(G, [f.__class__(Rw, dict(f.terms)) for f in F])


def test_classification_examples():
    s = tiny_system(["t"], lambda t: [t - 5], {"t": 5})
    assert classify(buchberger(s), s).classes == {"t": GLOBAL}
    s = tiny_system(["t"], lambda t: [t**2 - 25], {"t": 5})
    assert classify(buchberger(s), s).classes == {"t": LOCAL}
    s = tiny_system(["x", "t"], lambda x, t: [x - 5], {"x": 5, "t": 3})
    assert classify(buchberger(s), s).classes == {"x": GLOBAL, "t": NONID}


def test_classify_refuses_bad_bases():
    s = tiny_system(["x", "y"], lambda x, y: [x - 1, x - 2], {"x": 1, "y": 0})
    with pytest.raises(InconsistentSystemError):
        classify(buchberger(s), s)
    s = _goodwin_zero_dim()
    G = buchberger(s, max_pairs=1)
    assert not G.complete
    with pytest.raises(IncompleteBasisError):
        classify(G, s)


def test_report_json_round_trip():
    s = tiny_system(["t"], lambda t: [t - 5], {"t": 5})
    rep = classify(buchberger(s), s)
    assert IdentReport.from_json(rep.to_json()) == rep


def test_time_budget(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "0.25")
    assert default_time_budget() == 0.25
    monkeypatch.delenv(BUDGET_ENV)
    assert default_time_budget() == 600.0
    s = bundled_system("goodwin")
    G = buchberger(s, max_seconds=0.0)
    assert not G.complete


def test_bad_strategy():
    R = Ring(["x"], 101)
    with pytest.raises(ValueError):
        buchberger([R.var("x")], strategy="fastest")


def _goodwin_zero_dim():
    s = bundled_system("goodwin")
    child, _ = substitute_basis(s, [s.resolve("x3(0)"), s.resolve("γ")], seed=0)
    return child


@pytest.mark.parametrize("fmt", ["maple", "magma", "generic"])
def test_export_round_trip(fmt):
    s = _goodwin_zero_dim()
    text = export_system(s, fmt)
    back = read_export(text, fmt)
    assert back.prime == s.prime == 11863279
    assert len(back.variables) == 41
    assert len(back.polys) == s.n_polys
    renamed = dict(zip(back.variables, s.ring.names))
    for f, g in zip(back.polys, s.polys):
        assert {(renamed[n], e) for n, e in zip(back.variables, f.leading_monomial()) if e} == \
            {(n, e) for n, e in zip(s.ring.names, g.leading_monomial()) if e}
    if fmt == "magma":
        assert "GF(11863279)" in text
        assert "PolynomialRing(F, 41" in text


def test_export_renames_reserved_names():
    s = _goodwin_zero_dim()
    text = export_system(s, "maple")
    assert "beta_" in text and "sigma_" in text
    back = read_export(text, "maple")
    assert len(set(back.variables)) == len(back.variables)


def test_export_weights_round_trip():
    s = tiny_system(["x", "y"], lambda x, y: [x**2 - y], {"x": 1, "y": 1})
    w = MonomialOrder.weighted([1, 2])
    for fmt in ("maple", "magma", "generic"):
        back = read_export(export_system(s, fmt, w), fmt)
        assert back.weights == [1, 2]


def test_export_empty_and_unknown():
    s = tiny_system(["x"], lambda x: [], {"x": 0})
    assert "warning: empty system" in export_system(s, "generic")
    with pytest.raises(ValueError):
        export_system(s, "singular")
