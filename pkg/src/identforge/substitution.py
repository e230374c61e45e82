"""Eliminating a transcendence basis by substituting random integers."""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import MonomialOrder, Ring
from .basis import BasisCandidate, JacobianData
from .linalg import jacobian_at
from .prolongation import PolySystem, d2_value, system_degree


class SubstitutionError(RuntimeError):
    pass


def sampling_bound(sys_or_degree: PolySystem | int, prob: Fraction | float = Fraction(99, 100)) -> int:
    """``ceil(4/3 * D2)`` with ``D2 = ceil(6 * deg / (1 - p))``.

    ``deg`` is the Bezout product of the system (or the integer given).
    """
    prob = Fraction(prob).limit_denominator(10**12) if isinstance(prob, float) else Fraction(prob)
    if not 0 < prob < 1:
        raise ValueError("probability must lie strictly between 0 and 1")
    deg = sys_or_degree if isinstance(sys_or_degree, int) else system_degree(sys_or_degree)
    return math.ceil(Fraction(4, 3) * d2_value(deg, prob))


@dataclass
class SubstitutionRecord:
    """Sampled values for the eliminated variables (keyed by display label)."""

    values: dict[str, int]
    bound: int
    effective_bound: int
    seed: int
    prob: str = "99/100"
    names: dict[str, str] = field(default_factory=dict)

    @property
    def clamped(self) -> bool:
        return self.effective_bound < self.bound

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SubstitutionRecord":
        return cls(**json.loads(text))


def substitute_values(sys: PolySystem, values: Mapping[str, int]) -> PolySystem:
    """Replace variables by constants mod p; the result has a smaller ring."""
    p = sys.prime
    values = {k: int(v) % p for k, v in values.items()}
    missing = set(values) - set(sys.ring.names)
    if missing:
        raise KeyError(f"not variables of the system: {sorted(missing)}")
    keep = [n for n in sys.ring.names if n not in values]
    order = sys.ring.order
    if order.weights is not None:
        w = dict(zip(sys.ring.names, order.weights))
        order = MonomialOrder.weighted([w[n] for n in keep])
    ring = Ring(keep, p, order)
    polys = [f.subs({k: v for k, v in values.items() if k in f.support()}, ring=ring) for f in sys.polys]
    return PolySystem(
        ring=ring, polys=polys, vars={n: sys.vars[n] for n in keep}, prime=p,
        witness={n: v for n, v in sys.witness.items() if n in keep},
        seed=sys.seed, bound=sys.bound, prob=sys.prob,
        output_values=dict(sys.output_values), input_values=dict(sys.input_values),
        substituted={**sys.substituted, **values}, model_name=sys.model_name,
        parent=sys, source=sys.source,
    )


def substitute_basis(sys: PolySystem, basis: BasisCandidate | Sequence[str], seed: int = 0, *,
                     prob: Fraction | None = None, bound: int | None = None,
                     retries: int = 20, data: JacobianData | None = None
                     ) -> tuple[PolySystem, SubstitutionRecord]:
    """Substitute values drawn from ``[1, min(bound, p-1)]`` for the basis members.

    The basis must be valid for ``sys``.  A draw is rejected when a
    polynomial collapses to zero or when the Jacobian of the result at the
    remaining witness coordinates loses column rank.
    """
    members = tuple(basis.members if isinstance(basis, BasisCandidate) else basis)
    prob = Fraction(prob if prob is not None else sys.prob)
    full_bound = bound if bound is not None else sampling_bound(sys, prob)
    hi = max(1, min(full_bound, sys.prime - 1))
    record = SubstitutionRecord({}, full_bound, hi, seed, str(prob),
                                {sys.label(m): m for m in members})
    if not members:
        return sys, record
    data = data or JacobianData(sys)
    if not data.is_basis(list(members)):
        raise SubstitutionError("the given variables are not a transcendence basis of the system")
    rng = random.Random(seed)
    for _ in range(retries):
        values = {m: rng.randint(1, hi) for m in members}
        child = substitute_values(sys, values)
        if any(not f for f, g in zip(child.polys, sys.polys) if g):
            continue
        if child.ring.nvars:
            J = jacobian_at(child, child.ring.names, child.witness)
            if J.rank() != child.ring.nvars:
                continue
        record.values = {sys.label(m): v for m, v in values.items()}
        return child, record
    raise SubstitutionError(f"no acceptable values after {retries} draws")
