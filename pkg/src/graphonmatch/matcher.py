"""Unseeded matching of two networks sampled from a shared graphon.

Pipeline, for equal-size networks A1, A2:

  1. denoise each adjacency matrix by neighborhood smoothing;
  2. draw d random seed columns per network, independently;
  3. align every column of each denoised matrix to its nearest replicated
     seed column with an exact balanced assignment (d groups of n/d);
  4. rearrange both matrices into the seed-contiguous layout;
  5. exhaustively search the d! permutations of seed groups for the best
     Frobenius alignment of the two rearranged matrices.

The final estimate composes the three permutations. Seed count d grows like
log n / log log n, so step 5 stays polynomial in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations as iter_permutations

import numpy as np
from scipy.spatial.distance import cdist

from .assignment import Permutation, compose, solve_assignment
from .graphons import check_adjacency, check_probability_matrix
from .rng import SeedStream
from .smoothing import SmoothingConfig, estimate_probabilities

__all__ = [
    "SeedSet",
    "MatcherConfig",
    "MatchResult",
    "UnequalMatchResult",
    "choose_seeds",
    "align_to_seeds",
    "block_cost_tensor",
    "enumerate_block_permutation",
    "expand_block_permutation",
    "apply_matching",
    "match_graphs",
    "match_unequal",
    "seed_groups",
]

_ENUMERATION_CHUNK = 40320  # 8! permutations per vectorized chunk


@dataclass(frozen=True)
class SeedSet:
    """d distinct node indices anchoring the alignment of one network."""

    indices: np.ndarray
    network: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).copy()
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("seed indices must form a nonempty 1-d vector")
        if np.unique(idx).size != idx.size:
            raise ValueError("seed indices must be distinct")
        if np.any(idx < 0):
            raise ValueError("seed indices must be nonnegative")
        if self.network not in (1, 2):
            raise ValueError("network label must be 1 or 2")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def d(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class MatcherConfig:
    """Pipeline knobs.

    d: explicit seed count, or "auto" for clamp(round(C log n / log log n),
    2, d_max) with C = d_constant. use_oracle_probabilities skips smoothing
    and consumes externally supplied true probability matrices (simulation
    debugging only). seed feeds the pipeline stream when the caller does not
    pass one.
    """

    d: int | str = "auto"
    d_max: int = 9
    d_constant: float = 1.0
    use_oracle_probabilities: bool = False
    seed: int = 0
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)

    def __post_init__(self):
        if not 2 <= self.d_max <= 10:
            raise ValueError("d_max must lie in [2, 10]")
        if isinstance(self.d, str):
            if self.d != "auto":
                raise ValueError(f"d must be an integer or 'auto', got {self.d!r}")
        elif not 2 <= int(self.d) <= self.d_max:
            raise ValueError(f"d must lie in [2, d_max={self.d_max}], got {self.d}")
        if not self.d_constant > 0.0:
            raise ValueError("d_constant must be positive")

    def resolve_d(self, n: int) -> int:
        if self.d == "auto":
            if n < 3:
                return 2
            # log log n < 1 below n = 16 makes the ratio blow up; the extra
            # clamp at n keeps tiny inputs legal (never more seeds than nodes)
            raw = self.d_constant * math.log(n) / math.log(math.log(n))
            return int(min(max(round(raw), 2), self.d_max, n))
        return int(self.d)


@dataclass
class MatchResult:
    """Final permutation estimate plus the intermediate pipeline artifacts.

    p_hat maps network-1 node order onto network-2 node order (post-drop
    coordinates); it equals compose(inverse(p2), expand(q_tilde), p1) as
    matrices. loss stays None until evaluation fills it from true W's.
    """

    p_hat: Permutation
    p1: Permutation
    p2: Permutation
    q_tilde: Permutation
    seeds1: SeedSet
    seeds2: SeedSet
    enumeration_cost: float
    dropped_nodes: tuple[np.ndarray, np.ndarray]
    w_hat1: np.ndarray | None = None
    w_hat2: np.ndarray | None = None
    loss: float | None = None

    @property
    def d(self) -> int:
        return self.q_tilde.n

    @property
    def n_retained(self) -> int:
        return self.p_hat.n


@dataclass(frozen=True)
class UnequalMatchResult:
    """match_unequal output: the equal-size core match plus the extension."""

    match: MatchResult
    larger_network: int
    subsample: np.ndarray
    extension: dict[int, int]


def choose_seeds(n: int, d: int, rng: np.random.Generator,
                 network: int = 1) -> SeedSet:
    """d distinct indices uniform without replacement, in draw order."""
    if d < 2:
        raise ValueError(f"need at least 2 seeds, got d = {d}")
    if d > n:
        raise ValueError(f"cannot draw {d} distinct seeds from {n} nodes")
    return SeedSet(indices=rng.choice(n, size=d, replace=False), network=network)


def align_to_seeds(w_hat: np.ndarray, seeds: SeedSet) -> tuple[Permutation, float]:
    """Balanced alignment of all columns to the replicated seed columns.

    Solves min_P ||W P^T - W_breve||_F^2 where W_breve repeats each seed
    column n/d times contiguously. The underlying assignment has cost
    C[j, slot] = ||W[:, j] - W[:, seed(slot // (n/d))]||_2^2, i.e. a
    balanced clustering of columns into d groups of exactly n/d. Returns
    the permutation P (slot -> column) and the attained squared cost.
    """
    w_hat = check_probability_matrix(w_hat)
    n = w_hat.shape[0]
    d = seeds.d
    if np.any(seeds.indices >= n):
        raise ValueError("seed index out of range")
    if n % d != 0:
        raise ValueError(f"seed count {d} must divide n = {n}; drop remainder nodes first")
    m = n // d
    table = cdist(w_hat.T, w_hat[:, seeds.indices].T, metric="sqeuclidean")
    C = np.repeat(table, m, axis=1)
    sigma, cost = solve_assignment(C)  # node j -> slot sigma[j]
    return sigma.inverse(), cost


def block_cost_tensor(M1: np.ndarray, M2: np.ndarray, d: int) -> np.ndarray:
    """Cross-products powering the fast block-permutation objective.

    With both matrices in seed-contiguous layout (group g occupies rows
    g*m..g*m+m-1), G[p,q,a,b] = sum_{s,t<m} M1[(p,s),(q,t)] * M2[(a,s),(b,t)]
    and the objective of a block permutation sigma evaluates in O(d^2):

      ||Q M1 Q^T - M2||_F^2 = ||M1||^2 + ||M2||^2 - 2 sum_{a,b} G[sigma(a), sigma(b), a, b].
    """
    M1 = np.asarray(M1, dtype=np.float64)
    M2 = np.asarray(M2, dtype=np.float64)
    if M1.shape != M2.shape or M1.ndim != 2 or M1.shape[0] != M1.shape[1]:
        raise ValueError("matrices must be square and of equal shape")
    n = M1.shape[0]
    if n % d != 0:
        raise ValueError(f"block count {d} must divide n = {n}")
    m = n // d
    T1 = M1.reshape(d, m, d, m)
    T2 = M2.reshape(d, m, d, m)
    return np.einsum("psqt,asbt->pqab", T1, T2)


def enumerate_block_permutation(M1: np.ndarray, M2: np.ndarray, d: int,
                                d_max: int = 9) -> tuple[Permutation, float]:
    """Exhaustive search over all d! seed-group permutations.

    Minimizes ||Q M1 Q^T - M2||_F^2 with Q the block expansion of sigma.
    Permutations are scanned in lexicographic order and the first minimum
    wins, so exact cost ties break lexicographically. Guarded to d <= d_max
    (factorial blowup).
    """
    if d > d_max:
        raise ValueError(f"refusing d = {d} > d_max = {d_max}: d! enumeration blowup")
    if d < 1:
        raise ValueError("d must be >= 1")
    G = block_cost_tensor(M1, M2, d)
    flat = G.reshape(d * d, d * d)
    cols = np.arange(d * d)
    best_gain = -np.inf
    best_perm = None
    chunk: list[tuple[int, ...]] = []

    def flush(chunk):
        nonlocal best_gain, best_perm
        P = np.array(chunk, dtype=np.int64)
        rows = (P[:, :, None] * d + P[:, None, :]).reshape(len(chunk), d * d)
        gains = flat[rows, cols].sum(axis=1)
        j = int(np.argmax(gains))
        if gains[j] > best_gain:
            best_gain = float(gains[j])
            best_perm = chunk[j]

    for sigma in iter_permutations(range(d)):
        chunk.append(sigma)
        if len(chunk) == _ENUMERATION_CHUNK:
            flush(chunk)
            chunk = []
    if chunk:
        flush(chunk)
    # the tensor gains pick the argmin; the reported cost is the winner's
    # directly evaluated objective, so exact-recovery instances return 0.0
    winner = Permutation(np.array(best_perm, dtype=np.int64))
    full = expand_block_permutation(winner, M1.shape[0] // d).perm
    cost = float(np.linalg.norm(M1[np.ix_(full, full)] - M2) ** 2)
    return winner, cost


def expand_block_permutation(q_tilde: Permutation, m: int) -> Permutation:
    """Lift a d-permutation to d*m nodes: group g maps wholesale onto group
    q_tilde[g], preserving within-group order. The matrix equals
    kron(matrix(q_tilde), I_m)."""
    if m < 1:
        raise ValueError(f"group size must be >= 1, got {m}")
    d = q_tilde.n
    out = (q_tilde.perm[:, None] * m + np.arange(m)[None, :]).reshape(d * m)
    return Permutation(out)


def apply_matching(P: Permutation, M: np.ndarray) -> np.ndarray:
    """Conjugation P M P^T: out[i, j] = M[perm[i], perm[j]]."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != P.n:
        raise ValueError("matrix shape must match the permutation size")
    return M[np.ix_(P.perm, P.perm)]


def seed_groups(p_align: Permutation, m: int) -> np.ndarray:
    """Group label of every node implied by an alignment permutation."""
    groups = np.empty(p_align.n, dtype=np.int64)
    groups[p_align.perm] = np.arange(p_align.n) // m
    return groups


def _drop_remainder(n: int, r: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    dropped = np.sort(rng.choice(n, size=r, replace=False)) if r else np.empty(0, np.int64)
    retained = np.setdiff1d(np.arange(n), dropped)
    return retained, dropped.astype(np.int64)


def match_graphs(A1: np.ndarray, A2: np.ndarray, cfg: MatcherConfig | None = None,
                 rng: SeedStream | None = None, *,
                 w1: np.ndarray | None = None, w2: np.ndarray | None = None,
                 seeds1: np.ndarray | None = None,
                 seeds2: np.ndarray | None = None) -> MatchResult:
    """Full unseeded matching of two equal-size networks.

    If d does not divide n, n mod d nodes are dropped uniformly at random
    from each network (independently) and recorded; all later coordinates
    refer to the retained node sets in ascending original order. Under
    cfg.use_oracle_probabilities the smoothing step is skipped and the true
    matrices w1, w2 must be supplied. seeds1/seeds2 pin the seed sets
    (post-drop coordinates) instead of sampling them.
    """
    cfg = cfg or MatcherConfig()
    A1 = check_adjacency(A1)
    A2 = check_adjacency(A2)
    n = A1.shape[0]
    if A2.shape[0] != n:
        raise ValueError(
            f"match_graphs requires equal sizes, got {n} and {A2.shape[0]}; "
            "use match_unequal"
        )
    rng = rng if rng is not None else SeedStream(cfg.seed)
    d = cfg.resolve_d(n)
    r = n % d
    retained1, dropped1 = _drop_remainder(n, r, rng.child("drop", 1).generator())
    retained2, dropped2 = _drop_remainder(n, r, rng.child("drop", 2).generator())
    A1r = A1[np.ix_(retained1, retained1)]
    A2r = A2[np.ix_(retained2, retained2)]
    n_eff = n - r
    m = n_eff // d

    if cfg.use_oracle_probabilities:
        if w1 is None or w2 is None:
            raise ValueError("use_oracle_probabilities requires w1 and w2")
        w_hat1 = check_probability_matrix(w1)[np.ix_(retained1, retained1)]
        w_hat2 = check_probability_matrix(w2)[np.ix_(retained2, retained2)]
    else:
        w_hat1 = estimate_probabilities(A1r, cfg.smoothing)
        w_hat2 = estimate_probabilities(A2r, cfg.smoothing)

    if seeds1 is None:
        s1 = choose_seeds(n_eff, d, rng.child("seeds", 1).generator(), network=1)
    else:
        s1 = SeedSet(indices=np.asarray(seeds1, dtype=np.int64), network=1)
    if seeds2 is None:
        s2 = choose_seeds(n_eff, d, rng.child("seeds", 2).generator(), network=2)
    else:
        s2 = SeedSet(indices=np.asarray(seeds2, dtype=np.int64), network=2)
    if s1.d != d or s2.d != d:
        raise ValueError(f"pinned seed sets must have d = {d} entries")

    p1, _ = align_to_seeds(w_hat1, s1)
    p2, _ = align_to_seeds(w_hat2, s2)
    M1 = apply_matching(p1, w_hat1)
    M2 = apply_matching(p2, w_hat2)
    q_tilde, enum_cost = enumerate_block_permutation(M1, M2, d, d_max=cfg.d_max)
    p_hat = compose(p2.inverse(), expand_block_permutation(q_tilde, m), p1)
    return MatchResult(
        p_hat=p_hat, p1=p1, p2=p2, q_tilde=q_tilde, seeds1=s1, seeds2=s2,
        enumeration_cost=enum_cost, dropped_nodes=(dropped1, dropped2),
        w_hat1=w_hat1, w_hat2=w_hat2,
    )


def match_unequal(A1: np.ndarray, A2: np.ndarray, cfg: MatcherConfig | None = None,
                  rng: SeedStream | None = None) -> UnequalMatchResult:
    """Matching for networks of different sizes.

    Subsamples min(n1, n2) nodes without replacement from the larger
    network, matches the induced subnetwork against the smaller network,
    then assigns every leftover node of the larger network to the seed
    group with the nearest denoised seed column (squared l2 over the full
    larger network, ties to the smaller group index).
    """
    cfg = cfg or MatcherConfig()
    A1 = check_adjacency(A1)
    A2 = check_adjacency(A2)
    n1, n2 = A1.shape[0], A2.shape[0]
    if n1 == n2:
        raise ValueError("equal sizes: use match_graphs")
    rng = rng if rng is not None else SeedStream(cfg.seed)
    larger = 1 if n1 > n2 else 2
    A_big = A1 if larger == 1 else A2
    n_big, n_small = max(n1, n2), min(n1, n2)
    keep = np.sort(rng.child("subsample").generator().choice(n_big, size=n_small,
                                                             replace=False))
    A_big_sub = A_big[np.ix_(keep, keep)]
    if larger == 1:
        result = match_graphs(A_big_sub, A2, cfg, rng.child("core"))
    else:
        result = match_graphs(A1, A_big_sub, cfg, rng.child("core"))

    # leftover nodes join the closest seed group of the larger network,
    # measured on a full-network denoised estimate
    seeds_sub = result.seeds1 if larger == 1 else result.seeds2
    dropped_sub = result.dropped_nodes[0] if larger == 1 else result.dropped_nodes[1]
    retained = np.setdiff1d(np.arange(n_small), dropped_sub)
    seed_original = keep[retained[seeds_sub.indices]]
    w_full = estimate_probabilities(A_big, cfg.smoothing)
    leftover = np.setdiff1d(np.arange(n_big), keep)
    extension: dict[int, int] = {}
    if leftover.size:
        dists = cdist(w_full[:, leftover].T, w_full[:, seed_original].T,
                      metric="sqeuclidean")
        groups = np.argmin(dists, axis=1)  # first (smallest) index on ties
        extension = {int(v): int(g) for v, g in zip(leftover, groups)}
    return UnequalMatchResult(match=result, larger_network=larger,
                              subsample=keep, extension=extension)
