"""Degree-weighted count entropy for ranking candidate bases."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import MultiPoly
from .basis import BasisCandidate, CandidatePool

TOLERANCE = 1e-9


@dataclass
class DegreeProfile:
    """Per-member degree arrays, their normalized weights and entropies."""

    degrees: dict[str, list[int]] = field(default_factory=dict)

    @property
    def weights(self) -> dict[str, list[float]]:
        out = {}
        for m, arr in self.degrees.items():
            total = sum(arr)
            out[m] = [d / total for d in arr] if total else []
        return out

    @property
    def entropies(self) -> dict[str, float]:
        return {m: entropy(arr) for m, arr in self.degrees.items()}


def entropy(degrees: Iterable[int]) -> float:
    """Shannon entropy (bits) of the degrees normalized to sum 1.

    Empty or all-zero input gives 0.
    """
    arr = [int(d) for d in degrees]
    if any(d < 0 for d in arr):
        raise ValueError("degrees must be nonnegative")
    total = sum(arr)
    if total == 0:
        return 0.0
    h = 0.0
    for d in arr:
        if d:
            w = d / total
            h -= w * math.log2(w)
    return max(h, 0.0)


def _owner(exps: Sequence[int], members: Sequence[tuple[str, int]]) -> str | None:
    best, best_e = None, 0
    for name, idx in members:
        e = exps[idx]
        if e > best_e or (e == best_e and e and name < best):
            best, best_e = name, e
    return best


def degree_profile_polys(polys: Iterable[MultiPoly], members: Sequence[str]) -> DegreeProfile:
    """Collect each monomial's total degree once, for the member with the largest exponent.

    Exponent ties go to the alphabetically first member.  Every term of every
    polynomial counts as one monomial occurrence.
    """
    polys = list(polys)
    prof = DegreeProfile({m: [] for m in members})
    if not polys:
        return prof
    ring = polys[0].ring
    present = [(m, ring.index[m]) for m in members if m in ring.index]
    for f in polys:
        for exps in f.terms:
            who = _owner(exps, present)
            if who is not None:
                prof.degrees[who].append(sum(exps))
    return prof


def degree_profile(sys, T: BasisCandidate | Sequence[str]) -> DegreeProfile:
    members = T.members if isinstance(T, BasisCandidate) else tuple(T)
    polys = sys.polys if hasattr(sys, "polys") else sys
    return degree_profile_polys(polys, members)


def score(sys, pool: CandidatePool | Iterable[BasisCandidate]) -> dict[tuple[str, ...], DegreeProfile]:
    """Fill ``entropies`` on every candidate and return the profiles."""
    profiles = {}
    for cand in pool:
        prof = degree_profile(sys, cand)
        cand.entropies = prof.entropies
        profiles[cand.members] = prof
    return profiles


def _compare(a: Sequence[float], b: Sequence[float]) -> int:
    n = max(len(a), len(b))
    pa = list(a) + [-math.inf] * (n - len(a))
    pb = list(b) + [-math.inf] * (n - len(b))
    for x, y in zip(pa, pb):
        if x == y or (math.isfinite(x) and math.isfinite(y) and abs(x - y) <= TOLERANCE):
            continue
        return 1 if x > y else -1
    return 0


def select_best(pool: CandidatePool | Sequence[BasisCandidate],
                profiles: Mapping[tuple[str, ...], DegreeProfile] | None = None) -> BasisCandidate:
    """Candidate whose ascending entropy tuple is lexicographically largest.

    Ties (within the tolerance) go to the smaller sorted member-name list.
    """
    cands = list(pool)
    if not cands:
        raise ValueError("empty candidate pool")
    if profiles is not None:
        for c in cands:
            if c.members in profiles:
                c.entropies = profiles[c.members].entropies
    best = cands[0]
    for c in cands[1:]:
        cmp = _compare(c.sorted_entropies(), best.sorted_entropies())
        if cmp > 0 or (cmp == 0 and sorted(c.members) < sorted(best.members)):
            best = c
    return best


def entropy_csv(pool: Iterable[BasisCandidate], sys=None) -> str:
    """CSV rows ``candidate,member,entropy`` for scatter plots."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["candidate", "member", "entropy"])
    for i, cand in enumerate(pool):
        for m in cand.members:
            label = sys.label(m) if sys is not None else m
            w.writerow([i, label, f"{cand.entropies.get(m, 0.0):.6f}"])
    return buf.getvalue()
