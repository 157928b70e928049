"""Pipeline steps 2-5 and the assembled matcher."""

import itertools

import numpy as np
import pytest

from graphonmatch.assignment import Permutation, compose
from graphonmatch.evaluation import baseline_losses, matching_loss
from graphonmatch.graphons import (block_graphon, build_probability_matrix,
                                   gradient_graphon, sample_adjacency,
                                   sample_latents)
from graphonmatch.matcher import (MatcherConfig, SeedSet, align_to_seeds,
                                  apply_matching, block_cost_tensor,
                                  choose_seeds, enumerate_block_permutation,
                                  expand_block_permutation, match_graphs,
                                  match_unequal, seed_groups)
from graphonmatch.rng import SeedStream

from conftest import random_adjacency


def symmetric_uniform(n, rng):
    M = rng.uniform(size=(n, n))
    return (M + M.T) / 2.0


def replicated_seed_columns(W, seeds, m):
    return np.repeat(W[:, seeds], m, axis=1)


# --- config ------------------------------------------------------------------


def test_auto_d_at_reference_sizes():
    cfg = MatcherConfig()
    assert [cfg.resolve_d(n) for n in (200, 500, 1000, 2000)] == [3, 3, 4, 4]


def test_auto_d_clamps():
    assert MatcherConfig(d_max=9).resolve_d(10**15) == 9
    # below n = 16 the ratio log n / log log n blows up; the clamp at n wins
    assert MatcherConfig().resolve_d(3) == 3
    assert MatcherConfig().resolve_d(8) == 3


def test_config_validation():
    with pytest.raises(ValueError):
        MatcherConfig(d=1)
    with pytest.raises(ValueError):
        MatcherConfig(d=10, d_max=9)
    with pytest.raises(ValueError):
        MatcherConfig(d_max=11)
    with pytest.raises(ValueError):
        MatcherConfig(d="all")
    with pytest.raises(ValueError):
        MatcherConfig(d_constant=-1.0)
    assert MatcherConfig(d=5).resolve_d(333) == 5


def test_seed_set_validation():
    with pytest.raises(ValueError):
        SeedSet(indices=np.array([1, 1, 2]), network=1)
    with pytest.raises(ValueError):
        SeedSet(indices=np.array([0, 3]), network=7)
    with pytest.raises(ValueError):
        SeedSet(indices=np.array([-1, 3]), network=2)


# --- seed choice ---------------------------------------------------------------


def test_choose_seeds_full_set(rng):
    s = choose_seeds(6, 6, rng)
    assert sorted(s.indices.tolist()) == [0, 1, 2, 3, 4, 5]


def test_choose_seeds_reproducible():
    a = choose_seeds(50, 4, np.random.default_rng(3))
    b = choose_seeds(50, 4, np.random.default_rng(3))
    np.testing.assert_array_equal(a.indices, b.indices)


def test_choose_seeds_bounds(rng):
    with pytest.raises(ValueError):
        choose_seeds(5, 6, rng)
    with pytest.raises(ValueError):
        choose_seeds(5, 1, rng)


def test_choose_seeds_frequency(rng):
    # d=2 from n=10^4, 10^5 draws: per-index count is Binomial(10^5, 2/10^4);
    # a 5-sigma band keeps the simultaneous check over 10^4 indices stable
    n, draws = 10**4, 10**5
    idx = np.empty(2 * draws, dtype=np.int64)
    for t in range(draws):
        idx[2 * t:2 * t + 2] = choose_seeds(n, 2, rng).indices
    counts = np.bincount(idx, minlength=n)
    mean = 2 * draws / n
    sigma = np.sqrt(draws * (2 / n) * (1 - 2 / n))
    assert np.all(np.abs(counts - mean) <= 5 * sigma)


# --- alignment -----------------------------------------------------------------


def test_align_grouped_columns_cost_zero():
    # columns take two distinct values, four copies each, so a zero-cost
    # balanced grouping exists and is unique
    n, d, m = 8, 2, 4
    cols = [0, 1, 0, 0, 1, 1, 0, 1]
    vals = np.array([[0.2, 0.5], [0.5, 0.8]])
    sym = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            sym[i, j] = vals[cols[i], cols[j]]
    seeds = SeedSet(indices=np.array([0, 1]), network=1)
    p, cost = align_to_seeds(sym, seeds)
    assert cost == pytest.approx(0.0, abs=1e-24)
    groups = seed_groups(p, m)
    np.testing.assert_array_equal(groups, cols)


def test_align_degenerate_full_seed_set(rng):
    n = 5
    M = symmetric_uniform(n, rng)
    M = np.clip(M, 0.0, 1.0)
    seeds = SeedSet(indices=np.arange(n), network=1)
    p, cost = align_to_seeds(M, seeds)
    assert cost == pytest.approx(0.0, abs=1e-24)
    assert p == Permutation.identity(n)


def test_align_matches_brute_force(rng):
    n, d = 6, 3
    m = n // d
    W = np.clip(symmetric_uniform(n, rng), 0.0, 1.0)
    seeds = SeedSet(indices=np.array([4, 0, 2]), network=1)
    p, cost = align_to_seeds(W, seeds)
    target = replicated_seed_columns(W, seeds.indices, m)
    best = min(
        np.linalg.norm(W[:, list(q)] - target) ** 2
        for q in itertools.permutations(range(n))
    )
    assert cost == pytest.approx(best, rel=1e-12)
    achieved = np.linalg.norm(W[:, p.perm] - target) ** 2
    assert achieved == pytest.approx(cost, rel=1e-12)


def test_align_requires_divisibility(rng):
    W = np.clip(symmetric_uniform(8, rng), 0.0, 1.0)
    with pytest.raises(ValueError):
        align_to_seeds(W, SeedSet(indices=np.array([0, 1, 2]), network=1))


# --- block permutation search ---------------------------------------------------


def test_tensor_matches_direct_cost_every_sigma(rng):
    n, d = 8, 2
    m = n // d
    M1 = symmetric_uniform(n, rng)
    M2 = symmetric_uniform(n, rng)
    G = block_cost_tensor(M1, M2, d)
    base = np.sum(M1 * M1) + np.sum(M2 * M2)
    for sigma in itertools.permutations(range(d)):
        gain = sum(G[sigma[a], sigma[b], a, b] for a in range(d) for b in range(d))
        tensor_cost = base - 2.0 * gain
        Q = np.kron(Permutation(np.array(sigma)).matrix(), np.eye(m))
        direct = np.linalg.norm(Q @ M1 @ Q.T - M2) ** 2
        assert tensor_cost == pytest.approx(direct, rel=1e-9)


def test_tensor_d1_is_inner_product(rng):
    M1 = symmetric_uniform(4, rng)
    M2 = symmetric_uniform(4, rng)
    G = block_cost_tensor(M1, M2, 1)
    assert G.shape == (1, 1, 1, 1)
    assert G[0, 0, 0, 0] == pytest.approx(np.sum(M1 * M2), rel=1e-12)


def test_tensor_divisibility_error(rng):
    with pytest.raises(ValueError):
        block_cost_tensor(symmetric_uniform(9, rng), symmetric_uniform(9, rng), 2)


def test_enumerate_identity_on_equal_inputs(rng):
    M = symmetric_uniform(12, rng)
    q, cost = enumerate_block_permutation(M, M.copy(), 3)
    assert q == Permutation.identity(3)
    assert cost == 0.0


def test_enumerate_recovers_planted_relabeling():
    d, m = 4, 3
    n = d * m
    block_vals = np.array([
        [0.9, 0.1, 0.2, 0.3],
        [0.1, 0.8, 0.4, 0.2],
        [0.2, 0.4, 0.7, 0.1],
        [0.3, 0.2, 0.1, 0.6],
    ])
    M1 = np.kron(block_vals, np.ones((m, m)))
    sigma0 = Permutation(np.array([2, 0, 3, 1]))
    Q = expand_block_permutation(sigma0, m)
    M2 = apply_matching(Q, M1)
    q, cost = enumerate_block_permutation(M1, M2, d)
    assert q == sigma0
    assert cost == pytest.approx(0.0, abs=1e-18)


def test_enumerate_matches_direct_minimum(rng):
    d, n = 5, 20
    m = n // d
    M1 = symmetric_uniform(n, rng)
    M2 = symmetric_uniform(n, rng)
    q, cost = enumerate_block_permutation(M1, M2, d)
    direct = {}
    for sigma in itertools.permutations(range(d)):
        Q = np.kron(Permutation(np.array(sigma)).matrix(), np.eye(m))
        direct[sigma] = np.linalg.norm(Q @ M1 @ Q.T - M2) ** 2
    assert len(direct) == 120
    best = min(direct.values())
    assert cost == pytest.approx(best, rel=1e-9)
    assert direct[tuple(q.perm)] == pytest.approx(best, rel=1e-9)


def test_enumerate_guard(rng):
    M = symmetric_uniform(20, rng)
    with pytest.raises(ValueError):
        enumerate_block_permutation(M, M, 10, d_max=9)
    with pytest.raises(ValueError):
        enumerate_block_permutation(M, M, 5, d_max=4)


# --- expansion and conjugation ---------------------------------------------------


def test_expand_identity():
    q = Permutation.identity(3)
    assert expand_block_permutation(q, 4) == Permutation.identity(12)


def test_expand_swap():
    q = Permutation(np.array([1, 0]))
    assert expand_block_permutation(q, 2).perm.tolist() == [2, 3, 0, 1]


def test_expand_matrix_is_kron(rng):
    d, m = 3, 2
    q = Permutation(rng.permutation(d))
    E = expand_block_permutation(q, m)
    np.testing.assert_array_equal(E.matrix(), np.kron(q.matrix(), np.eye(m)))


def test_apply_matching_identity(rng):
    M = rng.uniform(size=(5, 5))
    np.testing.assert_array_equal(apply_matching(Permutation.identity(5), M), M)


def test_apply_matching_swap():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = apply_matching(Permutation(np.array([1, 0])), M)
    np.testing.assert_array_equal(out, [[4.0, 3.0], [2.0, 1.0]])


def test_apply_matching_group_law(rng):
    M = rng.uniform(size=(7, 7))
    p = Permutation(rng.permutation(7))
    np.testing.assert_array_equal(apply_matching(p.inverse(), apply_matching(p, M)), M)


def test_apply_matching_matches_matrix_convention(rng):
    M = rng.uniform(size=(6, 6))
    p = Permutation(rng.permutation(6))
    P = p.matrix()
    np.testing.assert_allclose(apply_matching(p, M), P @ M @ P.T, atol=1e-15)


# --- assembled pipeline ----------------------------------------------------------


def exact_recovery_instance(seed=0):
    """Two relabelings of one block-constant network, d=4 equal-mass blocks."""
    d, m = 4, 5
    n = d * m
    B = np.array([
        [0.9, 0.1, 0.2, 0.3],
        [0.1, 0.8, 0.4, 0.2],
        [0.2, 0.4, 0.7, 0.1],
        [0.3, 0.2, 0.1, 0.6],
    ])
    g = block_graphon(B, [0.25, 0.5, 0.75])
    rng = np.random.default_rng(seed)
    # m latents per block, so blocks have exactly equal mass
    x = np.concatenate([rng.uniform(k * 0.25 + 0.01, (k + 1) * 0.25 - 0.01, size=m)
                        for k in range(d)])
    W = build_probability_matrix(g, x)
    A = sample_adjacency(W, rng)
    relabel = Permutation(rng.permutation(n))
    W2 = apply_matching(relabel, W)
    A2 = apply_matching(relabel, A)
    return W, A, W2, A2, relabel, d, m


def test_exact_recovery_oracle_mode():
    W, A, W2, A2, relabel, d, m = exact_recovery_instance()
    # pin one seed per block in each network
    seeds1 = np.array([0, m, 2 * m, 3 * m])
    seeds2 = np.array([int(np.where(relabel.perm == s)[0][0]) for s in seeds1])
    cfg = MatcherConfig(d=d, use_oracle_probabilities=True)
    res = match_graphs(A, A2, cfg, SeedStream(5), w1=W, w2=W2,
                       seeds1=seeds1, seeds2=seeds2)
    assert matching_loss(res.p_hat, W, W2) == 0.0


def test_match_graphs_deterministic(rng):
    A1 = random_adjacency(36, rng)
    A2 = random_adjacency(36, rng)
    cfg = MatcherConfig(d=3)
    r1 = match_graphs(A1, A2, cfg, SeedStream(21))
    r2 = match_graphs(A1, A2, cfg, SeedStream(21))
    assert r1.p_hat == r2.p_hat
    assert r1.q_tilde == r2.q_tilde
    assert r1.enumeration_cost == r2.enumeration_cost
    np.testing.assert_array_equal(r1.seeds1.indices, r2.seeds1.indices)
    np.testing.assert_array_equal(r1.w_hat1, r2.w_hat1)


def test_match_result_invariants(rng):
    A1 = random_adjacency(40, rng)
    A2 = random_adjacency(40, rng)
    res = match_graphs(A1, A2, MatcherConfig(d=3), SeedStream(2))
    assert res.enumeration_cost >= 0.0
    assert res.d == 3
    assert res.n_retained == 39
    assert res.dropped_nodes[0].size == 1
    # composition identity
    m = res.n_retained // res.d
    expected = compose(res.p2.inverse(), expand_block_permutation(res.q_tilde, m), res.p1)
    assert res.p_hat == expected
    # p_hat is a bijection by construction of Permutation; round-trip check
    assert compose(res.p_hat, res.p_hat.inverse()) == Permutation.identity(res.n_retained)


def test_match_graphs_unequal_sizes_error(rng):
    with pytest.raises(ValueError, match="match_unequal"):
        match_graphs(random_adjacency(10, rng), random_adjacency(12, rng))


def test_match_graphs_oracle_needs_w(rng):
    A = random_adjacency(12, rng)
    with pytest.raises(ValueError):
        match_graphs(A, A.copy(), MatcherConfig(d=2, use_oracle_probabilities=True),
                     SeedStream(0))


def test_pinned_seed_count_checked(rng):
    A1 = random_adjacency(12, rng)
    A2 = random_adjacency(12, rng)
    with pytest.raises(ValueError):
        match_graphs(A1, A2, MatcherConfig(d=3), SeedStream(0),
                     seeds1=np.array([0, 1]))


def test_label_equivariance_group_assignments(rng):
    # relabeling network 1 while mapping the pinned seeds through the same
    # relabeling must relabel the group assignments consistently
    n, d = 20, 2
    m = n // d
    x = np.sort(sample_latents(n, rng))
    W = build_probability_matrix(gradient_graphon(), x)
    A = sample_adjacency(W, rng)
    A2 = sample_adjacency(W, rng)
    seeds1 = np.array([2, 17])
    seeds2 = np.array([4, 11])
    cfg = MatcherConfig(d=d, use_oracle_probabilities=True)
    base = match_graphs(A, A2, cfg, SeedStream(1), w1=W, w2=W,
                        seeds1=seeds1, seeds2=seeds2)
    pi = Permutation(rng.permutation(n))
    A_rel = apply_matching(pi, A)
    W_rel = apply_matching(pi, W)
    seeds1_rel = np.array([int(np.where(pi.perm == s)[0][0]) for s in seeds1])
    rel = match_graphs(A_rel, A2, cfg, SeedStream(1), w1=W_rel, w2=W,
                       seeds1=seeds1_rel, seeds2=seeds2)
    g_base = seed_groups(base.p1, m)
    g_rel = seed_groups(rel.p1, m)
    # node pi.perm[i] of the original carries the label of node i in the
    # relabeled network
    np.testing.assert_array_equal(g_rel, g_base[pi.perm])


def test_match_beats_baseline_network_pair():
    # single moderately sized pair; the acceptance suite runs the full grid
    r = np.random.default_rng(77)
    x = sample_latents(300, r)
    W = build_probability_matrix(gradient_graphon(), x)
    A1 = sample_adjacency(W, r)
    A2 = sample_adjacency(W, r)
    res = match_graphs(A1, A2, MatcherConfig(d=3), SeedStream(8))
    loss = matching_loss(res.p_hat, W, W)
    summary = baseline_losses(W, W, r, k=50)
    assert loss < summary.median


def test_match_graphs_n1000_d7_beats_baseline():
    wins = 0
    for rep in range(10):
        r = np.random.default_rng(5000 + rep)
        x = sample_latents(1000, r)
        W = build_probability_matrix(gradient_graphon(), x)
        A1 = sample_adjacency(W, r)
        A2 = sample_adjacency(W, r)
        res = match_graphs(A1, A2, MatcherConfig(d=7), SeedStream(6000 + rep))
        keep1 = np.setdiff1d(np.arange(1000), res.dropped_nodes[0])
        keep2 = np.setdiff1d(np.arange(1000), res.dropped_nodes[1])
        W1r = W[np.ix_(keep1, keep1)]
        W2r = W[np.ix_(keep2, keep2)]
        loss = matching_loss(res.p_hat, W1r, W2r)
        summary = baseline_losses(W1r, W2r, r, k=100)
        wins += loss < summary.median
    assert wins >= 9


# --- unequal sizes ----------------------------------------------------------------


def test_match_unequal_rejects_equal(rng):
    A = random_adjacency(10, rng)
    with pytest.raises(ValueError, match="match_graphs"):
        match_unequal(A, A.copy())


def test_match_unequal_extension_total(rng):
    r = np.random.default_rng(31)
    x = sample_latents(60, r)
    W = build_probability_matrix(gradient_graphon(), x)
    A_small = sample_adjacency(W, r)
    y = sample_latents(120, r)
    Wb = build_probability_matrix(gradient_graphon(), y)
    A_big = sample_adjacency(Wb, r)
    out = match_unequal(A_small, A_big, MatcherConfig(d=3), SeedStream(14))
    assert out.larger_network == 2
    assert out.subsample.shape == (60,)
    leftover = np.setdiff1d(np.arange(120), out.subsample)
    assert set(out.extension.keys()) == set(leftover.tolist())
    assert all(0 <= g < 3 for g in out.extension.values())


def test_match_unequal_loss_comparable_to_equal_size():
    # matched-core loss within 2x of the equal-size run, median of 10 pairs
    g = gradient_graphon()
    ratios = []
    for rep in range(10):
        r = np.random.default_rng(900 + rep)
        x = sample_latents(500, r)
        W = build_probability_matrix(g, x)
        A1 = sample_adjacency(W, r)
        A2 = sample_adjacency(W, r)
        equal = match_graphs(A1, A2, MatcherConfig(d=3), SeedStream(30 + rep))
        keep1 = np.setdiff1d(np.arange(500), equal.dropped_nodes[0])
        keep2 = np.setdiff1d(np.arange(500), equal.dropped_nodes[1])
        loss_equal = matching_loss(equal.p_hat, W[np.ix_(keep1, keep1)],
                                   W[np.ix_(keep2, keep2)])

        y = sample_latents(600, r)
        Wb = build_probability_matrix(g, y)
        A_big = sample_adjacency(Wb, r)
        out = match_unequal(A1, A_big, MatcherConfig(d=3), SeedStream(60 + rep))
        core = out.match
        keep_small = np.setdiff1d(np.arange(500), core.dropped_nodes[0])
        sub = out.subsample
        keep_big = np.setdiff1d(np.arange(500), core.dropped_nodes[1])
        Wb_core = Wb[np.ix_(sub, sub)][np.ix_(keep_big, keep_big)]
        loss_unequal = matching_loss(core.p_hat, W[np.ix_(keep_small, keep_small)],
                                     Wb_core)
        ratios.append(loss_unequal / loss_equal)
    assert np.median(ratios) < 2.0
