"""Minimum-cost assignment with deterministic tie-breaking, plus the
permutation algebra shared by the matching pipeline.

Matrix convention: the matrix P of a permutation has P[i, perm[i]] = 1, so
(P x)_i = x[perm[i]] and (P M P^T)[i, j] = M[perm[i], perm[j]]. Composition
follows matrix products: compose(a, b) is the permutation whose matrix is
matrix(a) @ matrix(b), i.e. i -> b[a[i]].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as iter_permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "Permutation",
    "compose",
    "check_cost_matrix",
    "solve_assignment",
    "brute_force_assignment",
]


@dataclass(frozen=True, eq=False)
class Permutation:
    """A bijection on {0,...,n-1} stored as an index vector."""

    perm: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.perm, dtype=np.int64).copy()
        if p.ndim != 1 or p.size == 0:
            raise ValueError("permutation must be a nonempty 1-d integer vector")
        n = p.size
        if np.any(p < 0) or np.any(p >= n):
            raise ValueError("permutation entries must lie in [0, n)")
        if np.bincount(p, minlength=n).max() > 1:
            raise ValueError("permutation entries must be distinct")
        p.setflags(write=False)
        object.__setattr__(self, "perm", p)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.perm.size

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.perm] = np.arange(self.n, dtype=np.int64)
        return Permutation(inv)

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n), dtype=np.float64)
        P[np.arange(self.n), self.perm] = 1.0
        return P

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.perm, other.perm)

    def __hash__(self) -> int:
        return hash(self.perm.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.perm.tolist()})"


def compose(*perms: Permutation) -> Permutation:
    """Composition matching matrix products: compose(a,b)(i) = b[a[i]]."""
    if not perms:
        raise ValueError("compose needs at least one permutation")
    n = perms[0].n
    acc = perms[0].perm
    for q in perms[1:]:
        if q.n != n:
            raise ValueError("cannot compose permutations of different sizes")
        acc = q.perm[acc]
    return Permutation(acc)


def check_cost_matrix(C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        raise ValueError("cost matrix must be square and nonempty")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix entries must be finite")
    return C


def _canonicalize_ties(C: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Greedy lexicographic reduction over cost-preserving transpositions.

    For each row i in order, swap its assigned column with the smallest
    column held by a later row whenever the 2x2 exchange keeps the total
    cost exactly equal (bitwise float equality, no epsilon). Structural
    ties, in particular duplicated columns as produced by seed replication,
    form transposition-connected optimal sets, for which this yields the
    lexicographically smallest optimal assignment.
    """
    n = perm.size
    perm = perm.copy()
    rows = np.arange(n)
    for i in range(n - 1):
        tail = perm[i + 1:]
        own = C[i, perm[i]] + C[rows[i + 1:], tail]
        swapped = C[i, tail] + C[rows[i + 1:], perm[i]]
        candidates = (swapped == own) & (tail < perm[i])
        if np.any(candidates):
            j = np.argmin(np.where(candidates, tail, n))
            perm[i], perm[i + 1 + j] = tail[j], perm[i]
    return perm


def solve_assignment(C: np.ndarray) -> tuple[Permutation, float]:
    """Exact minimum of sum_i C[i, perm[i]] over permutations.

    Solves with the Jonker-Volgenant method (O(n^3)) and then canonicalizes
    ties toward the lexicographically smallest optimal perm vector (see
    _canonicalize_ties for the exact mechanism). Input is not mutated.
    """
    C = check_cost_matrix(C)
    rows, cols = linear_sum_assignment(C)
    perm = np.empty(C.shape[0], dtype=np.int64)
    perm[rows] = cols
    perm = _canonicalize_ties(C, perm)
    cost = float(C[np.arange(C.shape[0]), perm].sum())
    return Permutation(perm), cost


def brute_force_assignment(C: np.ndarray) -> tuple[Permutation, float]:
    """Exhaustive reference solver; lexicographic tie-break; n <= 10 only."""
    C = check_cost_matrix(C)
    n = C.shape[0]
    if n > 10:
        raise ValueError(f"brute_force_assignment is guarded to n <= 10, got n = {n}")
    idx = np.arange(n)
    best_perm = None
    best_cost = np.inf
    for cand in iter_permutations(range(n)):
        cost = C[idx, cand].sum()
        if cost < best_cost:
            best_cost = cost
            best_perm = cand
    return Permutation(np.array(best_perm, dtype=np.int64)), float(best_cost)
