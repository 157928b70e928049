"""Loss and baseline comparisons for judging matchings in simulation.

The loss of a candidate permutation P is (1/n) ||P W1 P^T - W2||_F with the
diagonal included. Random-permutation baselines calibrate how much of the
loss a matcher actually explains; a useful matcher should sit well below
the baseline median.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import Permutation
from .matcher import MatchResult, apply_matching

__all__ = ["MatchQuality", "BaselineSummary", "matching_loss", "baseline_losses",
           "evaluate_match"]


@dataclass(frozen=True)
class MatchQuality:
    loss: float
    random_baseline_median: float
    identity_loss: float
    n_retained: int


@dataclass(frozen=True)
class BaselineSummary:
    median: float
    min: float
    max: float
    identity_loss: float


def _check_pair(W1: np.ndarray, W2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    W1 = np.asarray(W1, dtype=np.float64)
    W2 = np.asarray(W2, dtype=np.float64)
    if W1.shape != W2.shape or W1.ndim != 2 or W1.shape[0] != W1.shape[1]:
        raise ValueError("probability matrices must be square and of equal shape")
    return W1, W2


def matching_loss(P: Permutation, W1: np.ndarray, W2: np.ndarray) -> float:
    """(1/n) ||P W1 P^T - W2||_F, diagonal included."""
    W1, W2 = _check_pair(W1, W2)
    n = W1.shape[0]
    if P.n != n:
        raise ValueError(f"permutation size {P.n} does not match matrices of size {n}")
    return float(np.linalg.norm(apply_matching(P, W1) - W2) / n)


def baseline_losses(W1: np.ndarray, W2: np.ndarray, rng: np.random.Generator,
                    k: int = 50) -> BaselineSummary:
    """Loss summary over k uniform random permutations, plus the identity."""
    W1, W2 = _check_pair(W1, W2)
    if k < 1:
        raise ValueError(f"need k >= 1 baseline permutations, got {k}")
    n = W1.shape[0]
    losses = np.empty(k)
    for i in range(k):
        losses[i] = matching_loss(Permutation(rng.permutation(n)), W1, W2)
    identity = matching_loss(Permutation.identity(n), W1, W2)
    return BaselineSummary(median=float(np.median(losses)), min=float(losses.min()),
                           max=float(losses.max()), identity_loss=identity)


def evaluate_match(result: MatchResult, W1: np.ndarray, W2: np.ndarray,
                   rng: np.random.Generator, k: int = 50) -> MatchQuality:
    """Score a MatchResult against the true probability matrices.

    W1, W2 must already be restricted to the retained node sets. Fills
    result.loss as a side effect.
    """
    loss = matching_loss(result.p_hat, W1, W2)
    result.loss = loss
    summary = baseline_losses(W1, W2, rng, k)
    return MatchQuality(loss=loss, random_baseline_median=summary.median,
                        identity_loss=summary.identity_loss, n_retained=result.n_retained)
