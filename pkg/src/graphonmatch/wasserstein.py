"""One-dimensional empirical Wasserstein utilities.

For equal-size scalar samples the l2 Wasserstein distance between the
empirical measures is attained by the monotone coupling, so everything
here reduces to sorting. The latent-permutation oracle is simulation-only:
it reads latent positions, which the matching pipeline never observes.
"""

from __future__ import annotations

import numpy as np

from .assignment import Permutation

__all__ = ["w2_distance", "replicate_sample", "oracle_latent_permutation"]


def _check_sample(x, what: str = "sample") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{what} must be a nonempty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{what} must be finite")
    return x


def w2_distance(x, y) -> float:
    """(1/sqrt(m)) * ||sort(x) - sort(y)||_2, the exact l2 Wasserstein
    distance between two equal-size empirical measures."""
    x = _check_sample(x, "x")
    y = _check_sample(y, "y")
    if x.size != y.size:
        raise ValueError(f"samples must have equal length, got {x.size} and {y.size}")
    diff = np.sort(x) - np.sort(y)
    return float(np.linalg.norm(diff) / np.sqrt(x.size))


def replicate_sample(s, m: int) -> np.ndarray:
    """Each value repeated m times, block order (v0 x m, v1 x m, ...)."""
    s = _check_sample(s)
    if m < 1:
        raise ValueError(f"replication factor must be >= 1, got {m}")
    return np.repeat(s, m)


def oracle_latent_permutation(x, y) -> Permutation:
    """Permutation realizing the monotone coupling of x onto y.

    Returns the argmin over permutations sigma of ||x o sigma - y||_2 where
    (x o sigma)_i = x[sigma[i]]: rank r of y receives rank r of x. Ties are
    resolved by stable sort on index, so the output is deterministic.
    """
    x = _check_sample(x, "x")
    y = _check_sample(y, "y")
    if x.size != y.size:
        raise ValueError(f"samples must have equal length, got {x.size} and {y.size}")
    sx = np.argsort(x, kind="stable")
    sy = np.argsort(y, kind="stable")
    perm = np.empty(x.size, dtype=np.int64)
    perm[sy] = sx
    return Permutation(perm)
