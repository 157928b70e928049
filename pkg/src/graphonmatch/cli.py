"""Command line entry points: run experiments, match two files, selftest."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .assignment import brute_force_assignment, solve_assignment
from .graphons import check_adjacency
from .harness import parse_config, run_experiment, write_records
from .matcher import (MatcherConfig, block_cost_tensor,
                      enumerate_block_permutation, match_graphs,
                      match_unequal)
from .rng import SeedStream
from .smoothing import column_dissimilarity
from .wasserstein import oracle_latent_permutation, w2_distance

OUTDIR_ENV = "GRAPHONMATCH_OUTDIR"


def load_adjacency(path: str | Path) -> np.ndarray:
    """Read a graph file: .edges (one '<i> <j>' pair per line, 0-indexed)
    or .csv (dense 0/1 matrix)."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"adjacency file not found: {path}")
    if path.suffix == ".edges":
        pairs = []
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {raw!r}")
            try:
                i, j = int(fields[0]), int(fields[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: node ids must be integers") from None
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: node ids must be >= 0")
            if i == j:
                raise ValueError(f"{path}:{lineno}: self-loop on node {i}")
            pairs.append((i, j))
        if not pairs:
            raise ValueError(f"{path}: no edges found")
        n = max(max(i, j) for i, j in pairs) + 1
        A = np.zeros((n, n))
        for i, j in pairs:
            A[i, j] = A[j, i] = 1.0
    elif path.suffix == ".csv":
        try:
            A = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as e:
            raise ValueError(f"{path}: not a numeric CSV matrix ({e})") from e
    else:
        raise ValueError(f"unsupported adjacency format {path.suffix!r} (use .edges or .csv)")
    try:
        check_adjacency(A)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e
    return A


def _cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as e:
        raise ValueError(f"cannot read config {args.config}: {e}") from e
    cfg = parse_config(text)
    out = Path(cfg.output)
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir:
        out = Path(outdir) / out.name
    records = run_experiment(cfg)
    write_records(records, out)
    print(f"wrote {len(records)} records to {out}")
    return 0


def _cmd_match(args) -> int:
    A1 = load_adjacency(args.graph1)
    A2 = load_adjacency(args.graph2)
    cfg = MatcherConfig(d=args.d if args.d is not None else "auto", seed=args.seed)
    rng = SeedStream(args.seed)
    if A1.shape[0] == A2.shape[0]:
        result = match_graphs(A1, A2, cfg, rng)
        report = {
            "n1": int(A1.shape[0]),
            "n2": int(A2.shape[0]),
            "d": result.d,
            "n_retained": result.n_retained,
            "enumeration_cost": result.enumeration_cost,
            "dropped1": result.dropped_nodes[0].tolist(),
            "dropped2": result.dropped_nodes[1].tolist(),
            "seeds1": result.seeds1.indices.tolist(),
            "seeds2": result.seeds2.indices.tolist(),
            "permutation": result.p_hat.perm.tolist(),
        }
    else:
        unequal = match_unequal(A1, A2, cfg, rng)
        result = unequal.match
        report = {
            "n1": int(A1.shape[0]),
            "n2": int(A2.shape[0]),
            "d": result.d,
            "n_retained": result.n_retained,
            "enumeration_cost": result.enumeration_cost,
            "larger_network": unequal.larger_network,
            "subsample": unequal.subsample.tolist(),
            "permutation": result.p_hat.perm.tolist(),
            "extension": {str(k): int(v) for k, v in unequal.extension.items()},
        }
    print(json.dumps(report, indent=2))
    return 0


def _selftest_assignment(rng) -> None:
    for t in range(20):
        C = rng.uniform(size=(5, 5))
        perm, cost = solve_assignment(C)
        operm, ocost = brute_force_assignment(C)
        if perm != operm or abs(cost - ocost) > 1e-12:
            raise AssertionError(f"assignment mismatch on trial {t}")
    C = np.zeros((4, 4))
    perm, _ = solve_assignment(C)
    if perm.perm.tolist() != [0, 1, 2, 3]:
        raise AssertionError("tie break is not lexicographic")


def _selftest_dissimilarity(rng) -> None:
    A = (rng.uniform(size=(6, 6)) < 0.5).astype(float)
    A = np.triu(A, 1)
    A = A + A.T
    D = column_dissimilarity(A)
    S = A @ A / 6.0
    for i in range(6):
        for j in range(6):
            best = 0.0
            for k in range(6):
                if k in (i, j):
                    continue
                best = max(best, abs(S[k, i] - S[k, j]))
            if abs(D[i, j] - best) > 1e-15:
                raise AssertionError(f"dissimilarity mismatch at ({i}, {j})")


def _selftest_wasserstein(rng) -> None:
    x = rng.uniform(size=5)
    y = rng.uniform(size=5)
    direct = w2_distance(x, y)
    from itertools import permutations
    best = min(
        np.sqrt(np.mean((x - y[list(p)]) ** 2)) for p in permutations(range(5))
    )
    if abs(direct - best) > 1e-12:
        raise AssertionError("sorted coupling is not the optimum")
    perm = oracle_latent_permutation(x, y)
    if abs(np.sqrt(np.mean((x[perm.perm] - y) ** 2)) - direct) > 1e-12:
        raise AssertionError("latent permutation does not realize the distance")


def _selftest_enumeration(rng) -> None:
    from itertools import permutations
    d, m = 3, 2
    M1 = rng.uniform(size=(6, 6))
    M1 = (M1 + M1.T) / 2
    M2 = rng.uniform(size=(6, 6))
    M2 = (M2 + M2.T) / 2
    q, cost = enumerate_block_permutation(M1, M2, d)
    G = block_cost_tensor(M1, M2, d)
    base = float(np.sum(M1 * M1) + np.sum(M2 * M2))
    best = None
    for p in permutations(range(d)):
        gain = sum(G[p[a], p[b], a, b] for a in range(d) for b in range(d))
        direct = base - 2 * gain
        if best is None or direct < best:
            best = direct
    if abs(cost - best) > 1e-9 * max(1.0, abs(best)):
        raise AssertionError("enumeration cost differs from direct minimum")
    Q = np.kron(q.matrix(), np.eye(m))
    if abs(np.linalg.norm(Q @ M1 @ Q.T - M2) ** 2 - cost) > 1e-9 * max(1.0, cost):
        raise AssertionError("reported cost differs from realized residual")


def _cmd_selftest(args) -> int:
    checks = [
        ("assignment-oracle", _selftest_assignment),
        ("column-dissimilarity", _selftest_dissimilarity),
        ("wasserstein-coupling", _selftest_wasserstein),
        ("block-enumeration", _selftest_enumeration),
    ]
    for name, fn in checks:
        fn(np.random.default_rng(20240801))
        print(f"selftest {name}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphonmatch",
        description="Unseeded matching of networks sampled from a shared graphon.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment grid from a JSON config")
    p_run.add_argument("config", help="path to the JSON config file")
    p_run.set_defaults(fn=_cmd_run)

    p_match = sub.add_parser("match", help="match two adjacency files")
    p_match.add_argument("graph1", help="first graph (.edges or .csv)")
    p_match.add_argument("graph2", help="second graph (.edges or .csv)")
    p_match.add_argument("--d", type=int, default=None, help="seed count (default: auto)")
    p_match.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p_match.set_defaults(fn=_cmd_match)

    p_self = sub.add_parser("selftest", help="run quick internal oracle checks")
    p_self.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 1
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
