"""Dense linear algebra over F_p: Jacobians, row reduction, pivots and kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .algebra import MultiPoly, inv_mod


def _as_array(M, p: int) -> np.ndarray:
    dtype = np.int64 if p < 2**31 else object
    A = np.array(M, dtype=dtype)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    return A % p


def rref(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot column indices.

    Pivots are chosen as the first nonzero entry in each column, scanning
    columns left to right.
    """
    A = _as_array(M, p).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * inv_mod(int(A[r, c]), p) % p
        col = A[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            A[others] = (A[others] - np.outer(col[others], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def matrix_rank(M, p: int) -> int:
    A = _as_array(M, p)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(M, p: int) -> np.ndarray:
    """Basis of the right kernel as the columns of an ``ncols x k`` matrix."""
    A, pivots = rref(M, p)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((cols, len(free)), dtype=A.dtype)
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, pc in enumerate(pivots):
            K[pc, j] = (-A[i, f]) % p
    return K


@dataclass
class FpMatrix:
    """A dense matrix over F_p with labelled columns."""

    data: np.ndarray
    prime: int
    labels: tuple[str, ...]

    def __post_init__(self):
        self.data = _as_array(self.data, self.prime).reshape(-1, len(self.labels))
        if self.data.shape[1] != len(self.labels):
            raise ValueError("label count differs from the number of columns")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.data]

    def rank(self) -> int:
        return matrix_rank(self.data, self.prime) if self.data.size else 0

    def columns(self, names: Sequence[str]) -> "FpMatrix":
        idx = [self.labels.index(n) for n in names]
        return FpMatrix(self.data[:, idx], self.prime, tuple(names))


def pivot_columns(M: FpMatrix) -> list[int]:
    """Pivot column indices of the reduced row echelon form of ``M``."""
    if M.data.size == 0:
        return []
    return rref(M.data, M.prime)[1]


def poly_gradient(f: MultiPoly, values: Sequence[int], p: int) -> dict[int, int]:
    """Partial derivatives of ``f`` at a point, keyed by variable index."""
    out: dict[int, int] = {}
    for exps, c in f.terms.items():
        nz = [(i, e) for i, e in enumerate(exps) if e]
        if not nz:
            continue
        powers = [pow(values[i], e, p) for i, e in nz]
        for k, (i, e) in enumerate(nz):
            t = c * e % p
            if e > 1:
                t = t * pow(values[i], e - 1, p) % p
            for j, pw in enumerate(powers):
                if j != k:
                    t = t * pw % p
            out[i] = (out.get(i, 0) + t) % p
    return out


def jacobian_at(polys, vars: Sequence[str], point: Mapping[str, int], prime: int | None = None) -> FpMatrix:
    """Jacobian of ``polys`` (a list or a PolySystem) w.r.t. ``vars`` evaluated at ``point``."""
    if hasattr(polys, "polys"):
        prime = prime or polys.prime
        polys = polys.polys
    polys = list(polys)
    if prime is None:
        if not polys or polys[0].ring.modulus is None:
            raise ValueError("a prime is required for polynomials with exact coefficients")
        prime = polys[0].ring.modulus
    vars = tuple(vars)
    if not polys:
        return FpMatrix(np.zeros((0, len(vars)), dtype=np.int64), prime, vars)
    ring = polys[0].ring
    values = [int(point[n]) % prime for n in ring.names]
    colidx = [ring.index[v] for v in vars]
    rows = []
    for f in polys:
        g = poly_gradient(f, values, prime)
        rows.append([g.get(c, 0) for c in colidx])
    return FpMatrix(np.array(rows, dtype=np.int64 if prime < 2**31 else object).reshape(len(rows), len(vars)),
                    prime, vars)
