"""Prolongation of an ODE model into the polynomial system used for identifiability.

The outputs are differentiated level by level; each new output derivative
is kept only while it raises the rank of the Jacobian with respect to the
unknowns (parameters, initial conditions and the state derivatives
introduced so far).  State derivatives appearing in kept equations are
defined by adding the matching derivative of the state equation.  Output and
input derivatives are then replaced by their values at a random point, and
a Rabinowitsch equation ``z_aux*Q - 1`` keeps the denominators nonzero.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .algebra import DEFAULT_PRIME, MonomialOrder, MultiPoly, Ring, format_poly, inv_mod
from .expr import ExprError, ascii_alias, parse_expr, to_rational
from .linalg import matrix_rank
from .model import AUX_NAME, OdeModel

log = logging.getLogger(__name__)

PARAM, INITIAL, DERIVATIVE, AUX = "param", "initial", "derivative", "aux"


@dataclass(frozen=True)
class VarInfo:
    """Classification of a ring variable."""

    name: str
    kind: str
    base: str = ""
    order: int = 0

    @property
    def label(self) -> str:
        if self.kind == PARAM:
            return self.base
        if self.kind == INITIAL:
            return f"{self.base}(0)"
        if self.kind == DERIVATIVE:
            return f"{self.base}^({self.order})"
        return self.name

    @property
    def eligible(self) -> bool:
        return self.kind in (PARAM, INITIAL)


@dataclass(frozen=True)
class SpecializationConfig:
    """Random specialization settings.

    ``bound=None`` derives the sampling range from the system degree and the
    probability target (see :func:`witness_bound`).
    """

    seed: int = 0
    bound: int | None = None
    prob: Fraction | float = Fraction(99, 100)
    prime: int = DEFAULT_PRIME

    def __post_init__(self):
        prob = Fraction(self.prob).limit_denominator(10**12) if isinstance(self.prob, float) else Fraction(self.prob)
        object.__setattr__(self, "prob", prob)
        if not 0 < prob < 1:
            raise ValueError("probability target must lie strictly between 0 and 1")
        if self.bound is not None and self.bound < 1:
            raise ValueError("sampling bound must be at least 1")


@dataclass
class PolySystem:
    """A specialized polynomial system over F_p with a classified variable table."""

    ring: Ring
    polys: list[MultiPoly]
    vars: dict[str, VarInfo]
    prime: int
    witness: dict[str, int] = field(default_factory=dict)
    seed: int = 0
    bound: int = 0
    prob: Fraction = Fraction(99, 100)
    output_values: dict[str, int] = field(default_factory=dict)
    input_values: dict[str, int] = field(default_factory=dict)
    substituted: dict[str, int] = field(default_factory=dict)
    model_name: str = ""
    parent: "PolySystem | None" = field(default=None, repr=False, compare=False)
    source: "Prolongation | None" = field(default=None, repr=False, compare=False)

    @property
    def n_polys(self) -> int:
        return len(self.polys)

    @property
    def n_vars(self) -> int:
        return self.ring.nvars

    @property
    def root(self) -> "PolySystem":
        s = self
        while s.parent is not None:
            s = s.parent
        return s

    def eligible(self) -> list[str]:
        """Parameters and initial conditions, in ring order."""
        return [n for n in self.ring.names if self.vars[n].eligible]

    def label(self, name: str) -> str:
        info = self.vars.get(name) or self.root.vars.get(name)
        return info.label if info else name

    def resolve(self, label: str) -> str:
        """Map a display label (``x3(0)``, ``γ``) or ring name to the ring name."""
        table = self.root.vars
        if label in table:
            return label
        for name, info in table.items():
            if label in (info.label, ascii_alias(info.label)):
                return name
        raise KeyError(f"no variable labelled {label!r}")

    def with_order(self, order: MonomialOrder) -> "PolySystem":
        ring = self.ring.with_order(order)
        polys = [MultiPoly(ring, dict(f.terms), _clean=True) for f in self.polys]
        clone = PolySystem(**{**self.__dict__, "ring": ring, "polys": polys})
        return clone

    def jacobian_rank_elsewhere(self, rng: random.Random) -> int | None:
        """Jacobian rank at an independent random point, if the generator is known."""
        if self.source is None or self.parent is not None:
            return None
        return self.source.rank_at_fresh_point(self.ring.names, rng)


def system_degree(sys: PolySystem | Iterable[MultiPoly]) -> int:
    """Bezout bound: product of the total degrees of the polynomials (1 if empty)."""
    polys = sys.polys if isinstance(sys, PolySystem) else list(sys)
    out = 1
    for f in polys:
        if f:
            out *= max(f.total_degree(), 0) or 1
    return out


def d2_value(degree: int, prob: Fraction) -> int:
    """``ceil(6 * degree / (1 - p))`` in exact arithmetic."""
    prob = Fraction(prob)
    return math.ceil(Fraction(6 * degree) / (1 - prob))


def witness_bound(degree: int, prob: Fraction) -> int:
    return d2_value(degree, prob)


# ---------------------------------------------------------------------------
# power series over F_p, used to compute consistent jets at a sample point

def _series_mul(a: list[int], b: list[int], n: int, p: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(min(len(b), n - i)):
                out[i + j] += x * b[j]
    return [v % p for v in out]


def _series_inv(a: list[int], n: int, p: int) -> list[int]:
    inv0 = inv_mod(a[0], p)
    out = [inv0] + [0] * (n - 1)
    for k in range(1, n):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s += a[j] * out[k - j]
        out[k] = -s * inv0 % p
    return out


class _SparsePoly:
    """A polynomial as a list of (coefficient, [(var index, exponent)]) for fast evaluation."""

    __slots__ = ("terms",)

    def __init__(self, f: MultiPoly):
        self.terms = [(c, [(i, e) for i, e in enumerate(exps) if e]) for exps, c in f.terms.items()]

    def series(self, env: list, n: int, p: int) -> list[int]:
        total = [0] * n
        for c, mono in self.terms:
            acc = [c % p] + [0] * (n - 1)
            for i, e in mono:
                s = env[i]
                for _ in range(e):
                    acc = _series_mul(acc, s, n, p)
            for k in range(n):
                total[k] += acc[k]
        return [v % p for v in total]

    def gradient(self, vals: list[int], p: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for c, mono in self.terms:
            base = c % p
            powers = [pow(vals[i], e, p) for i, e in mono]
            for k, (i, e) in enumerate(mono):
                t = base * e * (pow(vals[i], e - 1, p) if e > 1 else 1)
                for j, pw in enumerate(powers):
                    if j != k:
                        t = t * pw % p
                out[i] = (out.get(i, 0) + t) % p
        return out

    def value(self, vals: list[int], p: int) -> int:
        total = 0
        for c, mono in self.terms:
            t = c
            for i, e in mono:
                t = t * pow(vals[i], e, p) % p
            total += t
        return total % p


class SamplingError(RuntimeError):
    """A sampled point hit a denominator zero too many times."""


class Prolongation:
    """Symbolic data for one model: jet ring, state/output equations and derivatives."""

    def __init__(self, model: OdeModel, prime: int = DEFAULT_PRIME):
        self.model = model
        self.prime = prime
        alias = {n: ascii_alias(n) for n in
                 list(model.states) + list(model.params) + list(model.inputs) + list(model.output_names)}
        self.alias = alias
        n, lam = len(model.states), len(model.params)
        # highest derivative order the construction may reach
        self.max_order = lam + n + 2
        L = self.max_order
        names = [alias[p] for p in model.params]
        self.jet_of: dict[tuple[str, int], str] = {}
        for group in (model.states, model.output_names, model.inputs):
            for s in group:
                for k in range(L + 1):
                    nm = f"{alias[s]}_{k}"
                    self.jet_of[(s, k)] = nm
                    names.append(nm)
        self.ring = Ring(names)
        self.kind: dict[str, tuple[str, str, int]] = {}
        for p_ in model.params:
            self.kind[alias[p_]] = (PARAM, p_, 0)
        for s in model.states:
            for k in range(L + 1):
                self.kind[self.jet_of[(s, k)]] = ("state", s, k)
        for y in model.output_names:
            for k in range(L + 1):
                self.kind[self.jet_of[(y, k)]] = ("output", y, k)
        for u in model.inputs:
            for k in range(L + 1):
                self.kind[self.jet_of[(u, k)]] = ("input", u, k)
        nxt = [-1] * self.ring.nvars
        for (s, k), nm in self.jet_of.items():
            if k < L:
                nxt[self.ring.index[nm]] = self.ring.index[self.jet_of[(s, k + 1)]]
        self._next = nxt

        order0 = {s: self.jet_of[(s, 0)] for s in list(model.states) + list(model.inputs)}
        order0.update({p_: alias[p_] for p_ in model.params})
        self.x_num: list[MultiPoly] = []
        self.x_den: list[MultiPoly] = []
        self.x_eqs: list[MultiPoly] = []
        den_factors: list[MultiPoly] = []
        for s, e in model.equations:
            rf = to_rational(e, self.ring, order0)
            num, den = _integer_parts(rf)
            self.x_num.append(num)
            self.x_den.append(den)
            self.x_eqs.append(self.ring.var(self.jet_of[(s, 1)]) * den - num)
            den_factors = _lcm_factors(den_factors, rf.factors)
        self.y_num: list[MultiPoly] = []
        self.y_den: list[MultiPoly] = []
        self.y_eqs: list[MultiPoly] = []
        for y, e in model.outputs:
            rf = to_rational(e, self.ring, order0)
            num, den = _integer_parts(rf)
            self.y_num.append(num)
            self.y_den.append(den)
            self.y_eqs.append(self.ring.var(self.jet_of[(y, 0)]) * den - num)
            den_factors = _lcm_factors(den_factors, rf.factors)
        q = self.ring.one()
        for f in den_factors:
            q = q * f
        self.Q = _primitive(q)
        self._X: dict[tuple[int, int], MultiPoly] = {}
        self._Y: dict[tuple[int, int], MultiPoly] = {}
        self._sparse: dict[int, _SparsePoly] = {}
        self._jets_cache: dict = {}

    # symbolic derivatives -----------------------------------------------------
    def derivative(self, f: MultiPoly) -> MultiPoly:
        """Total time derivative in the jet ring (parameters are constant)."""
        nxt = self._next
        out: dict = {}
        for exps, c in f.terms.items():
            for i, e in enumerate(exps):
                if e and nxt[i] >= 0:
                    ne = list(exps)
                    ne[i] -= 1
                    ne[nxt[i]] += 1
                    t = tuple(ne)
                    out[t] = out.get(t, 0) + c * e
        if any(not c for c in out.values()):
            out = {k: v for k, v in out.items() if v}
        return MultiPoly(self.ring, out, _clean=True)

    def X(self, i: int, k: int) -> MultiPoly:
        """Derivative of order ``k-1`` of state equation ``i`` (leader: order-k jet)."""
        key = (i, k)
        if key not in self._X:
            self._X[key] = self.x_eqs[i] if k == 1 else self.derivative(self.X(i, k - 1))
        return self._X[key]

    def Y(self, j: int, k: int) -> MultiPoly:
        """Derivative of order ``k`` of output equation ``j``."""
        key = (j, k)
        if key not in self._Y:
            self._Y[key] = self.y_eqs[j] if k == 0 else self.derivative(self.Y(j, k - 1))
        return self._Y[key]

    def sparse(self, f: MultiPoly) -> _SparsePoly:
        sp = self._sparse.get(id(f))
        if sp is None:
            sp = self._sparse[id(f)] = _SparsePoly(f)
            # keep f alive so its id stays unique
            self._jets_cache.setdefault("_keep", []).append(f)
        return sp

    # numeric jets -------------------------------------------------------------
    def sample_theta(self, rng: random.Random, bound: int) -> dict[str, int]:
        """Random values for parameters, initial conditions and input jets."""
        p = self.prime
        hi = max(1, min(bound, p - 1))
        vals = {}
        for par in self.model.params:
            vals[self.alias[par]] = rng.randint(1, hi)
        for s in self.model.states:
            vals[self.jet_of[(s, 0)]] = rng.randint(1, hi)
        for u in self.model.inputs:
            for k in range(self.max_order + 1):
                vals[self.jet_of[(u, k)]] = rng.randint(1, hi)
        return vals

    def jets(self, theta: Mapping[str, int], order: int) -> dict[str, int]:
        """Values of every jet variable up to ``order`` consistent with the ODE, mod p.

        Computed from the Taylor expansion of the solution, independently of
        the symbolic derivatives.  Raises ZeroDivisionError when a denominator
        vanishes at the point.
        """
        p = self.prime
        n = order + 1
        m = self.model
        idx = self.ring.index
        env: list = [None] * self.ring.nvars
        for par in m.params:
            v = theta[self.alias[par]] % p
            env[idx[self.alias[par]]] = [v] + [0] * (n - 1)
        fact = [1] * (n + 1)
        for k in range(1, n + 1):
            fact[k] = fact[k - 1] * k % p
        for u in m.inputs:
            coeffs = [theta[self.jet_of[(u, k)]] * inv_mod(fact[k], p) % p for k in range(n)]
            env[idx[self.jet_of[(u, 0)]]] = coeffs
        xs = [[theta[self.jet_of[(s, 0)]] % p] + [0] * (n - 1) for s in m.states]
        for i, s in enumerate(m.states):
            env[idx[self.jet_of[(s, 0)]]] = xs[i]
        nums = [self.sparse(f) for f in self.x_num]
        dens = [self.sparse(f) for f in self.x_den]
        for k in range(n - 1):
            # coefficients up to t^k of f(x(t)) are exact once x is known to t^k
            width = k + 1
            new = []
            for i in range(len(m.states)):
                num = nums[i].series(env, width, p)
                den = dens[i].series(env, width, p)
                f = _series_mul(num, _series_inv(den, width, p), width, p)
                new.append(f[k] * inv_mod(k + 1, p) % p)
            for i in range(len(m.states)):
                xs[i][k + 1] = new[i]
        out = {}
        for i, s in enumerate(m.states):
            for k in range(n):
                out[self.jet_of[(s, k)]] = xs[i][k] * fact[k] % p
        for j, y in enumerate(m.output_names):
            num = self.sparse(self.y_num[j]).series(env, n, p)
            den = self.sparse(self.y_den[j]).series(env, n, p)
            ys = _series_mul(num, _series_inv(den, n, p), n, p)
            for k in range(n):
                out[self.jet_of[(y, k)]] = ys[k] * fact[k] % p
        for u in m.inputs:
            for k in range(n):
                out[self.jet_of[(u, k)]] = theta[self.jet_of[(u, k)]] % p
        for par in m.params:
            out[self.alias[par]] = theta[self.alias[par]] % p
        return out

    def sample_point(self, rng: random.Random, bound: int, order: int,
                     retries: int = 20) -> dict[str, int]:
        for _ in range(retries):
            theta = self.sample_theta(rng, bound)
            try:
                point = self.jets(theta, order)
            except ZeroDivisionError:
                continue
            if self._q_value(point) == 0:
                continue
            return point
        raise SamplingError("sampled points keep hitting zeros of the denominators")

    def _q_value(self, point: Mapping[str, int]) -> int:
        vals = self._vals(point)
        return self.sparse(self.Q).value(vals, self.prime)

    def _vals(self, point: Mapping[str, int]) -> list[int]:
        return [point.get(nm, 0) for nm in self.ring.names]

    # jacobians ------------------------------------------------------------------
    def gradient(self, f: MultiPoly, vals: list[int]) -> dict[int, int]:
        return self.sparse(f).gradient(vals, self.prime)

    def rank_at_fresh_point(self, columns: Iterable[str], rng: random.Random) -> int:
        """Rank of the generated system's Jacobian at a new random point."""
        cols = [c for c in columns if c != AUX_NAME]
        point = self.sample_point(rng, self.prime - 1, self._built_order)
        vals = self._vals(point)
        colidx = [self.ring.index[c] for c in cols]
        rows = []
        for f in self._built:
            g = self.gradient(f, vals)
            rows.append([g.get(c, 0) for c in colidx])
        # the Rabinowitsch row only adds a pivot in its own column
        extra = 1 if AUX_NAME in columns else 0
        return matrix_rank(np.array(rows, dtype=np.int64).reshape(len(rows), len(cols)), self.prime) + extra


def _integer_parts(rf) -> tuple[MultiPoly, MultiPoly]:
    from .expr import integer_fraction

    return integer_fraction(rf)


def _primitive(f: MultiPoly) -> MultiPoly:
    scale = 1
    for c in f.terms.values():
        if isinstance(c, Fraction):
            scale = scale * c.denominator // math.gcd(scale, c.denominator)
    f = f.scale(scale)
    g = f.content()
    if g > 1:
        f = f.scale(Fraction(1, g))
    if f.leading_coefficient() < 0:
        f = -f
    return f


def _lcm_factors(acc: list[MultiPoly], new: Iterable[MultiPoly]) -> list[MultiPoly]:
    pool = list(acc)
    out = list(acc)
    for f in new:
        if f.is_constant():
            continue
        if f in pool:
            pool.remove(f)
        else:
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# system generation

def _state_jets(f: MultiPoly, kinds: Mapping[str, tuple[str, str, int]]) -> set[str]:
    return {v for v in f.support() if kinds[v][0] == "state"}


def generate_Et(model: OdeModel, cfg: SpecializationConfig | None = None) -> PolySystem:
    """Build the prolonged system and specialize it at a random witness point."""
    cfg = cfg or SpecializationConfig()
    pro = Prolongation(model, cfg.prime)
    rng = random.Random(cfg.seed)
    p = cfg.prime
    kinds = pro.kind
    m = model
    L = pro.max_order

    # structural decisions use a point sampled from the whole field
    struct_point = pro.sample_point(rng, p - 1, L)
    vals = pro._vals(struct_point)
    grad_cache: dict[int, dict[int, int]] = {}

    def grad(f: MultiPoly) -> dict[int, int]:
        g = grad_cache.get(id(f))
        if g is None:
            g = grad_cache[id(f)] = pro.gradient(f, vals)
        return g

    x_theta: list[str] = [pro.alias[par] for par in m.params] + [pro.jet_of[(s, 0)] for s in m.states]
    in_theta = set(x_theta)
    Et: list[MultiPoly] = []
    beta = [0] * len(m.outputs)
    possible = [True] * len(m.outputs)

    def full_rank(eqs: list[MultiPoly]) -> bool:
        colidx = [pro.ring.index[c] for c in x_theta]
        rows = [[grad(f).get(c, 0) for c in colidx] for f in eqs]
        return matrix_rank(np.array(rows, dtype=np.int64), p) == len(eqs)

    state_index = {s: i for i, s in enumerate(m.states)}
    while any(possible):
        for i in range(len(m.outputs)):
            if not possible[i]:
                continue
            if beta[i] > L - 1:
                possible[i] = False
                continue
            cand = pro.Y(i, beta[i])
            if full_rank(Et + [cand]):
                Et.append(cand)
                beta[i] += 1
                to_process = Et + [pro.Y(k, beta[k]) for k in range(len(m.outputs)) if beta[k] <= L - 1]
                while to_process:
                    found: set[str] = set()
                    for f in to_process:
                        found |= _state_jets(f, kinds)
                    new_vars = sorted(found - in_theta,
                                      key=lambda v: (state_index[kinds[v][1]], kinds[v][2]))
                    to_process = []
                    for v in new_vars:
                        _, s, k = kinds[v]
                        x_theta.append(v)
                        in_theta.add(v)
                        poly = pro.X(state_index[s], k)
                        Et.append(poly)
                        to_process.append(poly)
            else:
                possible[i] = False

    # append further output derivatives whose state jets are all known already
    top = {}
    for v in x_theta:
        if kinds[v][0] == "state":
            _, s, k = kinds[v]
            top[s] = max(top.get(s, 0), k)
    for i in range(len(m.outputs)):
        for k in range(beta[i], L):
            cand = pro.Y(i, k)
            jets = _state_jets(cand, kinds)
            if jets <= in_theta:
                Et.append(cand)
                beta[i] += 1
                continue
            if any(kinds[v][2] > top.get(kinds[v][1], 0) for v in jets):
                break

    log.debug("prolongation orders %s, %d equations", beta, len(Et))
    pro._built = Et
    used_orders = [kinds[v][2] for f in Et for v in f.support() if kinds[v][0] != PARAM]
    pro._built_order = max(used_orders, default=0) + 1

    degree = system_degree(Et + [pro.Q])
    bound = cfg.bound if cfg.bound is not None else witness_bound(degree + 0, cfg.prob)
    witness_full = pro.sample_point(rng, bound, pro._built_order)
    return _specialize(pro, Et, x_theta, witness_full, cfg, bound)


def _sort_key_factory(model: OdeModel, kinds):
    state_index = {s: i for i, s in enumerate(model.states)}

    def key(v):
        _, s, k = kinds[v]
        return (-k, state_index[s])
    return key


def _specialize(pro: Prolongation, Et: list[MultiPoly], x_theta: list[str],
                point: dict[str, int], cfg: SpecializationConfig, bound: int) -> PolySystem:
    m = pro.model
    p = cfg.prime
    kinds = pro.kind
    known = {nm: point[nm] for nm, (kind, _, _) in kinds.items()
             if kind in ("output", "input") and nm in point}
    # every parameter and initial condition is an unknown, even when it
    # occurs in no equation (it is then trivially algebraically independent)
    state_vars = sorted((v for v in x_theta if kinds[v][0] == "state"), key=_sort_key_factory(m, kinds))
    params = [pro.alias[par] for par in m.params]
    names = state_vars + [AUX_NAME] + params
    ring = Ring(names, p)
    polys = []
    for f in Et:
        g = f.subs({k: v for k, v in known.items() if k in f.support()}, ring=ring)
        polys.append(g)
    q = pro.Q.subs({k: v for k, v in known.items()}, ring=ring)
    polys.append(ring.var(AUX_NAME) * q - 1)

    table: dict[str, VarInfo] = {}
    for v in state_vars:
        _, s, k = kinds[v]
        table[v] = VarInfo(v, INITIAL if k == 0 else DERIVATIVE, s, k)
    table[AUX_NAME] = VarInfo(AUX_NAME, AUX)
    for par in m.params:
        a = pro.alias[par]
        table[a] = VarInfo(a, PARAM, par)
    qv = pro._q_value(point)
    witness = {v: point[v] for v in names if v != AUX_NAME}
    witness[AUX_NAME] = inv_mod(qv, p)
    outputs = {k: v for k, v in known.items() if kinds[k][0] == "output"}
    inputs = {k: v for k, v in known.items() if kinds[k][0] == "input"}
    return PolySystem(ring=ring, polys=polys, vars=table, prime=p, witness=witness,
                      seed=cfg.seed, bound=bound, prob=cfg.prob,
                      output_values=outputs, input_values=inputs,
                      model_name=m.name, source=pro)


# ---------------------------------------------------------------------------
# text format

def dump_psys(sys: PolySystem) -> str:
    """Serialize to the ``.psys`` text format."""
    out = ["# identforge polynomial system"]
    if sys.model_name:
        out.append(f"model {sys.model_name}")
    out.append(f"prime {sys.prime}")
    out.append(f"seed {sys.seed}")
    out.append(f"bound {sys.bound}")
    out.append(f"prob {sys.prob}")
    order = sys.ring.order
    if order.weights is not None:
        out.append("weights " + " ".join(map(str, order.weights)))
    for name in sys.ring.names:
        info = sys.vars[name]
        out.append(f"var {name} {info.kind} {info.base or '-'} {info.order}")
    for name in sys.ring.names:
        if name in sys.witness:
            out.append(f"witness {name} {sys.witness[name]}")
    for name, val in sys.substituted.items():
        out.append(f"subst {name} {val}")
    for name, val in sorted(sys.output_values.items()):
        out.append(f"output {name} {val}")
    for name, val in sorted(sys.input_values.items()):
        out.append(f"input {name} {val}")
    for f in sys.polys:
        out.append("poly " + format_poly(f))
    return "\n".join(out) + "\n"


def parse_poly(text: str, ring: Ring) -> MultiPoly:
    """Parse canonical polynomial text into ``ring``."""
    rf = to_rational(parse_expr(text), ring)
    if rf.factors and not all(f.is_constant() for f in rf.factors):
        raise ExprError("polynomial text contains a non-constant denominator")
    f = rf.num
    for d in rf.factors:
        f = f.scale(Fraction(1) / Fraction(d.constant_value()))
    return f


def load_psys(text: str) -> PolySystem:
    header: dict[str, str] = {}
    var_rows = []
    witness, subst, outputs, inputs = {}, {}, {}, {}
    poly_lines = []
    weights = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key == "var":
            var_rows.append(rest.split())
        elif key == "witness":
            n, v = rest.split()
            witness[n] = int(v)
        elif key == "subst":
            n, v = rest.split()
            subst[n] = int(v)
        elif key == "output":
            n, v = rest.split()
            outputs[n] = int(v)
        elif key == "input":
            n, v = rest.split()
            inputs[n] = int(v)
        elif key == "poly":
            poly_lines.append(rest)
        elif key == "weights":
            weights = tuple(int(w) for w in rest.split())
        else:
            header[key] = rest.strip()
    prime = int(header["prime"])
    order = MonomialOrder.weighted(weights) if weights else MonomialOrder()
    names = [r[0] for r in var_rows]
    ring = Ring(names, prime, order)
    table = {r[0]: VarInfo(r[0], r[1], "" if r[2] == "-" else r[2], int(r[3])) for r in var_rows}
    polys = [parse_poly(t, ring) for t in poly_lines]
    return PolySystem(ring=ring, polys=polys, vars=table, prime=prime, witness=witness,
                      seed=int(header.get("seed", 0)), bound=int(header.get("bound", 0)),
                      prob=Fraction(header.get("prob", "99/100")),
                      output_values=outputs, input_values=inputs, substituted=subst,
                      model_name=header.get("model", ""))
