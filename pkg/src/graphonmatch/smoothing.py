"""Neighborhood-smoothing estimate of the edge-probability matrix.

Classical neighborhood smoothing: node dissimilarity is measured through
common neighbors,

    d(i,j) = max_{k != i,j} |<A_i. - A_j., A_k.>| / n,

each node averages the adjacency rows of the nodes within its lower
h-quantile of dissimilarity (h ~ sqrt(log n / n)), and the estimate is
symmetrized. The estimator is fully deterministic and label-free: all
row sums involved are integer-valued, so permutation equivariance holds
bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graphons import check_adjacency

__all__ = ["SmoothingConfig", "column_dissimilarity", "estimate_probabilities"]


@dataclass(frozen=True)
class SmoothingConfig:
    """bandwidth_constant C0 sets the quantile h = min(1, C0 sqrt(log n / n))."""

    bandwidth_constant: float = 1.0
    symmetrize: bool = True

    def __post_init__(self):
        if not self.bandwidth_constant > 0.0:
            raise ValueError("bandwidth_constant must be positive")

    def quantile(self, n: int) -> float:
        return min(1.0, self.bandwidth_constant * math.sqrt(math.log(n) / n))


@njit(cache=True, fastmath=True)
def _max_abs_product_diff(S):  # pragma: no cover - compiled
    # D[i,j] = max_{k != i,j} |S[k,i] - S[k,j]| for symmetric S.
    # For fixed i the k-loop briefly rewrites S[k,k] to S[k,i] so that the
    # forbidden j == k term contributes 0, keeping the inner loop branch-free.
    n = S.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        Di = D[i]
        for k in range(n):
            if k == i:
                continue
            saved = S[k, k]
            c = S[k, i]
            S[k, k] = c
            row = S[k]
            for j in range(n):
                v = abs(c - row[j])
                if v > Di[j]:
                    Di[j] = v
            S[k, k] = saved
    return D


def column_dissimilarity(A: np.ndarray) -> np.ndarray:
    """Max common-neighbor dissimilarity between all row pairs.

    Returns the symmetric matrix d(i,j) = max_{k != i,j} |<A_i - A_j, A_k>|/n
    with a zero diagonal. Requires n >= 3 so the max is over a nonempty set.
    """
    A = check_adjacency(A)
    n = A.shape[0]
    if n < 3:
        raise ValueError(f"column_dissimilarity needs n >= 3, got n = {n}")
    # S[k,i] = <A_i, A_k>/n; integer-valued sums, exact in float64
    S = (A @ A) / n
    return _max_abs_product_diff(S)


def estimate_probabilities(A: np.ndarray,
                           cfg: SmoothingConfig | None = None) -> np.ndarray:
    """Neighborhood-smoothing estimate of W from one adjacency matrix.

    Each node i averages the adjacency rows of N_i = {i} plus every j with
    d(i,j) at or below the lower empirical h-quantile of {d(i,j) : j != i};
    quantile ties are all included, so the result does not depend on node
    order. Symmetrizes by (W + W^T)/2 when cfg.symmetrize.
    """
    cfg = cfg or SmoothingConfig()
    A = check_adjacency(A)
    n = A.shape[0]
    if n < 3:
        raise ValueError(f"estimate_probabilities needs n >= 3, got n = {n}")
    D = column_dissimilarity(A)
    h = cfg.quantile(n)
    # lower empirical quantile: smallest value with ECDF >= h among the n-1
    # off-diagonal entries of each row
    kth = max(1, math.ceil(h * (n - 1)))
    off = D.copy()
    np.fill_diagonal(off, np.inf)
    thresholds = np.partition(off, kth - 1, axis=1)[:, kth - 1]
    members = off <= thresholds[:, None]
    np.fill_diagonal(members, True)
    counts = members.sum(axis=1)
    W = (members.astype(np.float64) @ A) / counts[:, None]
    if cfg.symmetrize:
        W = (W + W.T) / 2.0
    return W
