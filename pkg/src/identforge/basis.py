"""Transcendence bases of a specialized system via sampled Jacobians.

A set ``S`` of ``d = n - rank`` variables is a transcendence basis exactly
when the Jacobian columns outside ``S`` keep the full rank.  With ``N`` the
``n x d`` kernel basis of the Jacobian this is ``det N[S, :] != 0``, so one
decomposition answers every candidate.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .linalg import jacobian_at, nullspace, pivot_columns
from .prolongation import PolySystem

log = logging.getLogger(__name__)

DEFAULT_CANDIDATES = 3000


class RankInstabilityError(RuntimeError):
    """Jacobian ranks disagree between independent sample points."""


class NoCandidateError(RuntimeError):
    """No sampled subset passed the validity test."""


@dataclass
class BasisCandidate:
    """A conjectured transcendence basis (ring variable names)."""

    members: tuple[str, ...]
    valid: bool = False
    entropies: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.members = tuple(self.members)
        if len(set(self.members)) != len(self.members):
            raise ValueError("basis members must be distinct")

    @property
    def k(self) -> int:
        return len(self.members)

    def sorted_entropies(self) -> tuple[float, ...]:
        return tuple(sorted(self.entropies.get(m, 0.0) for m in self.members))

    def labels(self, sys: PolySystem) -> list[str]:
        return [sys.label(m) for m in self.members]


@dataclass
class CandidatePool:
    candidates: list[BasisCandidate]
    total: int
    sampled: int
    seed: int
    k: int

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def member_sets(self) -> set[frozenset[str]]:
        return {frozenset(c.members) for c in self.candidates}

    def dump(self, sys: PolySystem | None = None) -> str:
        """One candidate per line: comma-separated members and a validity flag."""
        lines = []
        for c in self.candidates:
            names = c.labels(sys) if sys is not None else list(c.members)
            lines.append(",".join(names) + f" {'valid' if c.valid else 'invalid'}")
        return "\n".join(lines) + ("\n" if lines else "")


def load_pool(text: str, *, seed: int = 0) -> CandidatePool:
    cands = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        names, _, flag = line.rpartition(" ")
        members = tuple(n for n in names.split(",") if n)
        cands.append(BasisCandidate(members, valid=(flag == "valid")))
    k = cands[0].k if cands else 0
    return CandidatePool(cands, total=len(cands), sampled=len(cands), seed=seed, k=k)


# ---------------------------------------------------------------------------

class JacobianData:
    """Jacobian of a system at its witness point with rank and kernel basis."""

    def __init__(self, sys: PolySystem):
        self.sys = sys
        self.names = list(sys.ring.names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.matrix = jacobian_at(sys, self.names, sys.witness)
        self.rank = self.matrix.rank()
        self.kernel = nullspace(self.matrix.data, sys.prime) if self.names else np.zeros((0, 0), dtype=np.int64)

    @property
    def degree(self) -> int:
        return len(self.names) - self.rank

    def is_basis(self, members: Sequence[str]) -> bool:
        if len(members) != self.degree:
            raise ValueError(f"a basis needs {self.degree} members, got {len(members)}")
        if not members:
            return True
        rows = [self.index[m] for m in members]
        return bool(batched_full_rank(self.kernel[rows, :][None, :, :], self.sys.prime)[0])

    def are_bases(self, subsets: Sequence[Sequence[int]]) -> np.ndarray:
        """Validity of many index subsets of equal size at once."""
        if not len(subsets):
            return np.zeros(0, dtype=bool)
        idx = np.asarray(subsets, dtype=np.int64)
        if idx.shape[1] == 0:
            return np.ones(len(idx), dtype=bool)
        return batched_full_rank(self.kernel[idx, :], self.sys.prime)

    def identifiable_locally(self, name: str) -> bool:
        """True when the variable is fixed to first order: its kernel row vanishes."""
        if self.degree == 0:
            return True
        return not np.any(self.kernel[self.index[name], :] % self.sys.prime)


def batched_full_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Whether each square matrix in a ``(B, k, k)`` stack is invertible mod ``p``."""
    A = np.array(mats, dtype=np.int64 if p < 2**31 else object) % p
    B, k, _ = A.shape
    ok = np.ones(B, dtype=bool)
    rows = np.arange(B)
    for c in range(k):
        sub = A[:, c:, c]
        nz = sub != 0
        has = nz.any(axis=1)
        ok &= has
        piv = c + np.argmax(nz, axis=1)
        # swap pivot row into place
        tmp = A[rows, piv, :].copy()
        A[rows, piv, :] = A[:, c, :]
        A[:, c, :] = tmp
        pv = A[:, c, c]
        inv = _vec_inverse(np.where(pv == 0, 1, pv), p)
        A[:, c, :] = A[:, c, :] * inv[:, None] % p
        factors = A[:, c + 1:, c].copy()
        A[:, c + 1:, :] = (A[:, c + 1:, :] - factors[:, :, None] * A[:, c, None, :]) % p
    return ok


def _vec_inverse(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse mod p by Fermat exponentiation."""
    result = np.ones_like(a)
    base = a % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


# ---------------------------------------------------------------------------

def _checked(sys: PolySystem, seed: int, retries: int = 3) -> JacobianData:
    data = JacobianData(sys)
    rng = random.Random(seed)
    for _ in range(retries):
        r1 = sys.jacobian_rank_elsewhere(rng)
        if r1 is None:
            return data
        r2 = sys.jacobian_rank_elsewhere(rng)
        if r1 == r2:
            if data.rank != r1:
                raise RankInstabilityError(
                    f"witness Jacobian rank {data.rank} differs from the generic rank {r1}; "
                    "regenerate the system with another seed")
            return data
        log.info("Jacobian ranks %d and %d disagree, resampling", r1, r2)
    raise RankInstabilityError("Jacobian rank did not stabilize across sample points")


def jacobian_data(sys: PolySystem, seed: int = 0) -> JacobianData:
    """Witness Jacobian, cross-checked against independent sample points."""
    return _checked(sys, seed)


def find_independent(sys: PolySystem, seed: int = 0) -> list[str]:
    """Variables of the non-pivot Jacobian columns under the ring order."""
    data = _checked(sys, seed)
    piv = set(pivot_columns(data.matrix))
    return [n for i, n in enumerate(data.names) if i not in piv]


def transcendence_degree(sys: PolySystem, seed: int = 0) -> int:
    return _checked(sys, seed).degree


def is_valid_basis(sys: PolySystem, S: Iterable[str], *, data: JacobianData | None = None) -> bool:
    data = data or JacobianData(sys)
    members = [sys.resolve(s) if s not in data.index else s for s in S]
    return data.is_basis(members)


def enumerate_candidates(sys: PolySystem, K: int = DEFAULT_CANDIDATES, seed: int = 0, *,
                         data: JacobianData | None = None, batch: int = 20000) -> CandidatePool:
    """All valid subsets of parameters and initial conditions, or a sample of ``K``.

    Invalid draws are discarded, so a sampled pool may hold fewer than ``K``
    entries; ``sampled`` records how many subsets were tested.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    data = data or _checked(sys, seed)
    k = data.degree
    eligible = sys.eligible()
    n = len(eligible)
    N = comb(n, k)
    if k == 0:
        return CandidatePool([BasisCandidate((), valid=True)], total=1, sampled=1, seed=seed, k=0)
    elig_idx = [data.index[v] for v in eligible]
    if N <= K:
        subsets_iter = combinations(range(n), k)
        sampled = N
    else:
        rng = random.Random(seed)
        seen: set[tuple[int, ...]] = set()
        draws = []
        while len(draws) < K:
            s = tuple(sorted(rng.sample(range(n), k)))
            if s not in seen:
                seen.add(s)
                draws.append(s)
        subsets_iter = iter(draws)
        sampled = K
    cands: list[BasisCandidate] = []
    while True:
        chunk = [s for _, s in zip(range(batch), subsets_iter)]
        if not chunk:
            break
        ok = data.are_bases([[elig_idx[i] for i in s] for s in chunk])
        for s, good in zip(chunk, ok):
            if good:
                cands.append(BasisCandidate(tuple(eligible[i] for i in s), valid=True))
    if not cands:
        raise NoCandidateError(f"none of {sampled} subsets of size {k} is a transcendence basis")
    cands.sort(key=lambda c: sorted(c.members))
    return CandidatePool(cands, total=N, sampled=sampled, seed=seed, k=k)
