"""Experiment harness: config parsing, grid execution, CSV records.

Runs the full simulate-match-evaluate pipeline over a grid of network
sizes and replicates. Every cell derives its random streams from
(master_seed, n, replicate), so records do not depend on execution order
and a config fixes every byte of the output file (wall-clock timing can
be disabled for byte-stable reruns).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .evaluation import evaluate_match
from .graphons import (CouplingMode, Graphon, build_probability_matrix,
                       couple_latents, make_graphon, sample_adjacency,
                       sample_latents)
from .matcher import MatcherConfig, match_graphs
from .rng import SeedStream
from .smoothing import SmoothingConfig
from .wasserstein import replicate_sample, w2_distance

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "parse_config",
    "serialize_config",
    "run_experiment",
    "write_records",
    "read_records",
    "CSV_HEADER",
]

CSV_HEADER = "n,d,replicate,loss,baseline_median,identity_loss,smoothing_err,w2_seed,wall_ms,dropped"


@dataclass(frozen=True)
class ExperimentConfig:
    graphon_spec: dict
    n_grid: tuple[int, ...]
    coupling: CouplingMode = CouplingMode("identical")
    matcher: MatcherConfig = field(default_factory=MatcherConfig)
    replicates: int = 1
    baseline_k: int = 50
    master_seed: int = 0
    output: str = "records.csv"
    diagnostics: bool = False
    measure_walltime: bool = True

    def graphon(self) -> Graphon:
        spec = dict(self.graphon_spec)
        return make_graphon(spec.pop("kind"), **spec)


@dataclass(frozen=True)
class ExperimentRecord:
    """One simulation cell.

    smoothing_err is the max-column error (1/sqrt(n)) max_k ||What_k - W_k||
    over both networks, None when smoothing was skipped. w2_seed is the
    Wasserstein distance between network 1's retained latent sample and its
    replicated seed subsample, None unless diagnostics are on. dropped is
    the per-network count of remainder nodes eliminated before matching.
    """

    n: int
    d: int
    replicate: int
    loss: float
    baseline_median: float
    identity_loss: float
    smoothing_err: float | None
    w2_seed: float | None
    wall_ms: float
    dropped: int


class ConfigError(ValueError):
    pass


def _fail(path: str, message: str) -> None:
    raise ConfigError(f"config error at '{path}': {message}")


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _parse_graphon(value, path: str) -> dict:
    if isinstance(value, str):
        spec = {"kind": value}
    elif isinstance(value, dict):
        if "kind" not in value:
            _fail(path, "graphon object needs a 'kind' key")
        spec = dict(value)
    else:
        _fail(path, f"expected a kind string or object, got {value!r}")
    try:
        make_graphon(spec["kind"], **{k: v for k, v in spec.items() if k != "kind"})
    except ValueError as e:
        _fail(path, str(e))
    return spec


def _parse_coupling(value, path: str) -> CouplingMode:
    if isinstance(value, str):
        kind, rho = value, None
    elif isinstance(value, dict):
        unknown = set(value) - {"kind", "rho"}
        if unknown:
            _fail(path, f"unknown key(s) {sorted(unknown)}")
        kind, rho = value.get("kind"), value.get("rho")
    else:
        _fail(path, f"expected a kind string or object, got {value!r}")
    try:
        return CouplingMode(kind, rho if rho is None else float(rho))
    except ValueError as e:
        _fail(path, str(e))


def _parse_matcher(value, smoothing: SmoothingConfig, path: str) -> MatcherConfig:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {value!r}")
    unknown = set(value) - {"d", "d_max", "d_constant", "use_oracle_probabilities", "seed"}
    if unknown:
        _fail(path, f"unknown key(s) {sorted(unknown)}")
    kwargs = dict(value)
    if "d" in kwargs and not isinstance(kwargs["d"], str):
        kwargs["d"] = _as_int(kwargs["d"], path + ".d")
    try:
        return MatcherConfig(smoothing=smoothing, **kwargs)
    except (TypeError, ValueError) as e:
        _fail(path, str(e))


def _parse_smoothing(value, path: str) -> SmoothingConfig:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {value!r}")
    unknown = set(value) - {"bandwidth_constant", "symmetrize"}
    if unknown:
        _fail(path, f"unknown key(s) {sorted(unknown)}")
    try:
        return SmoothingConfig(**value)
    except (TypeError, ValueError) as e:
        _fail(path, str(e))


_TOP_KEYS = {
    "graphon", "n_grid", "coupling", "matcher", "smoothing", "replicates",
    "baseline_k", "master_seed", "output", "diagnostics", "measure_walltime",
}


def parse_config(doc: str | dict) -> ExperimentConfig:
    """Validate a JSON config document; defaults applied, unknown keys rejected."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config error: not valid JSON ({e})") from e
    if not isinstance(doc, dict):
        raise ConfigError("config error: top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        _fail(sorted(unknown)[0], "unknown key")
    for key in ("graphon", "n_grid"):
        if key not in doc:
            _fail(key, "required key missing")

    graphon_spec = _parse_graphon(doc["graphon"], "graphon")
    n_grid = doc["n_grid"]
    if not isinstance(n_grid, list) or not n_grid:
        _fail("n_grid", "must be a nonempty list of sizes")
    n_grid = tuple(_as_int(v, f"n_grid[{i}]", minimum=3) for i, v in enumerate(n_grid))
    coupling = _parse_coupling(doc.get("coupling", "identical"), "coupling")
    smoothing = _parse_smoothing(doc.get("smoothing", {}), "smoothing")
    matcher = _parse_matcher(doc.get("matcher", {}), smoothing, "matcher")
    replicates = _as_int(doc.get("replicates", 1), "replicates", minimum=1)
    baseline_k = _as_int(doc.get("baseline_k", 50), "baseline_k", minimum=1)
    master_seed = _as_int(doc.get("master_seed", 0), "master_seed", minimum=0)
    if master_seed >= 2**64:
        _fail("master_seed", "must fit in 64 bits")
    output = doc.get("output", "records.csv")
    if not isinstance(output, str) or not output:
        _fail("output", "must be a nonempty path string")
    diagnostics = doc.get("diagnostics", False)
    if not isinstance(diagnostics, bool):
        _fail("diagnostics", "must be a boolean")
    measure_walltime = doc.get("measure_walltime", True)
    if not isinstance(measure_walltime, bool):
        _fail("measure_walltime", "must be a boolean")
    return ExperimentConfig(
        graphon_spec=graphon_spec, n_grid=n_grid, coupling=coupling,
        matcher=matcher, replicates=replicates, baseline_k=baseline_k,
        master_seed=master_seed, output=output, diagnostics=diagnostics,
        measure_walltime=measure_walltime,
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical JSON document; parse(serialize(cfg)) == cfg."""
    coupling: str | dict = cfg.coupling.kind
    if cfg.coupling.rho is not None:
        coupling = {"kind": cfg.coupling.kind, "rho": cfg.coupling.rho}
    doc = {
        "graphon": cfg.graphon_spec,
        "n_grid": list(cfg.n_grid),
        "coupling": coupling,
        "matcher": {
            "d": cfg.matcher.d,
            "d_max": cfg.matcher.d_max,
            "d_constant": cfg.matcher.d_constant,
            "use_oracle_probabilities": cfg.matcher.use_oracle_probabilities,
            "seed": cfg.matcher.seed,
        },
        "smoothing": {
            "bandwidth_constant": cfg.matcher.smoothing.bandwidth_constant,
            "symmetrize": cfg.matcher.smoothing.symmetrize,
        },
        "replicates": cfg.replicates,
        "baseline_k": cfg.baseline_k,
        "master_seed": cfg.master_seed,
        "output": cfg.output,
        "diagnostics": cfg.diagnostics,
        "measure_walltime": cfg.measure_walltime,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _run_cell(cfg: ExperimentConfig, g: Graphon, n: int, rep: int) -> ExperimentRecord:
    cell = SeedStream(cfg.master_seed).child("cell", n, rep)
    xi = sample_latents(n, cell.child("latents").generator())
    eta = couple_latents(xi, cfg.coupling, cell.child("coupling").generator())
    W1 = build_probability_matrix(g, xi)
    W2 = build_probability_matrix(g, eta)
    A1 = sample_adjacency(W1, cell.child("edges", 1).generator())
    A2 = sample_adjacency(W2, cell.child("edges", 2).generator())
    oracle = cfg.matcher.use_oracle_probabilities
    t0 = time.perf_counter()
    result = match_graphs(A1, A2, cfg.matcher, cell.child("matcher"),
                          w1=W1 if oracle else None, w2=W2 if oracle else None)
    wall_ms = (time.perf_counter() - t0) * 1e3 if cfg.measure_walltime else 0.0

    dropped1, dropped2 = result.dropped_nodes
    ret1 = np.setdiff1d(np.arange(n), dropped1)
    ret2 = np.setdiff1d(np.arange(n), dropped2)
    W1r = W1[np.ix_(ret1, ret1)]
    W2r = W2[np.ix_(ret2, ret2)]
    quality = evaluate_match(result, W1r, W2r,
                             cell.child("baseline").generator(), cfg.baseline_k)

    smoothing_err = None
    if not oracle:
        n_eff = result.n_retained
        err1 = np.linalg.norm(result.w_hat1 - W1r, axis=0).max()
        err2 = np.linalg.norm(result.w_hat2 - W2r, axis=0).max()
        smoothing_err = float(max(err1, err2) / math.sqrt(n_eff))

    w2_seed = None
    if cfg.diagnostics:
        xi_r = xi[ret1]
        seed_values = xi_r[result.seeds1.indices]
        w2_seed = w2_distance(xi_r, replicate_sample(seed_values, result.n_retained // result.d))

    return ExperimentRecord(
        n=n, d=result.d, replicate=rep, loss=quality.loss,
        baseline_median=quality.random_baseline_median,
        identity_loss=quality.identity_loss, smoothing_err=smoothing_err,
        w2_seed=w2_seed, wall_ms=wall_ms, dropped=int(dropped1.size),
    )


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Execute every (n, replicate) cell in deterministic grid order."""
    g = cfg.graphon()
    records = []
    for n in cfg.n_grid:
        for rep in range(cfg.replicates):
            try:
                records.append(_run_cell(cfg, g, n, rep))
            except Exception as e:
                raise RuntimeError(f"experiment cell (n={n}, replicate={rep}) failed: {e}") from e
    return records


def _render(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".10g")


def write_records(records, path) -> None:
    """CSV with the fixed header, floats at 10 significant digits."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join(_render(v) for v in (
            r.n, r.d, r.replicate, r.loss, r.baseline_median, r.identity_loss,
            r.smoothing_err, r.w2_seed, r.wall_ms, r.dropped)))
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(f"cannot write records to {path}: {e}") from e


def read_records(path) -> list[ExperimentRecord]:
    """Inverse of write_records at the file's rendered precision."""
    with open(path, "r", newline="") as fh:
        lines = [ln.rstrip("\n").rstrip("\r") for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not carry the expected record header")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 10:
            raise ValueError(f"malformed record line: {ln!r}")
        records.append(ExperimentRecord(
            n=int(parts[0]), d=int(parts[1]), replicate=int(parts[2]),
            loss=float(parts[3]), baseline_median=float(parts[4]),
            identity_loss=float(parts[5]),
            smoothing_err=float(parts[6]) if parts[6] else None,
            w2_seed=float(parts[7]) if parts[7] else None,
            wall_ms=float(parts[8]), dropped=int(parts[9]),
        ))
    return records
