"""Graphon sampling model.

A graphon is a symmetric measurable f: (0,1)^2 -> [0,1]. Networks are
generated by drawing latent positions x_i ~ Uniform(0,1) iid, forming the
edge-probability matrix W_ij = f(x_i, x_j), and sampling a symmetric hollow
adjacency matrix with independent Bernoulli(W_ij) upper-triangle entries.
A second network on the same nodes uses latents eta coupled to xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "Graphon",
    "CouplingMode",
    "constant_graphon",
    "gradient_graphon",
    "sinusoidal_graphon",
    "block_graphon",
    "graphon_from_function",
    "make_graphon",
    "validate_graphon",
    "eval_graphon",
    "sample_latents",
    "couple_latents",
    "build_probability_matrix",
    "sample_adjacency",
    "check_latents",
    "check_probability_matrix",
    "check_adjacency",
]


@dataclass(frozen=True)
class Graphon:
    """Symmetric kernel on (0,1)^2 with values in [0,1].

    ``fn`` must accept broadcastable float arrays. ``lipschitz_bound`` is an
    upper bound L with |f(x,y) - f(x',y')| <= L * (|x-x'| + |y-y'|); block
    kernels carry ``piecewise=True`` and are exempt from Lipschitz checks.
    """

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz_bound: float
    piecewise: bool = False


def constant_graphon(p: float) -> Graphon:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"constant graphon level must be in [0,1], got {p}")

    def fn(x, y):
        return np.broadcast_to(np.float64(p), np.broadcast_shapes(np.shape(x), np.shape(y)))

    return Graphon(name=f"constant({p})", fn=fn, lipschitz_bound=0.0)


def gradient_graphon() -> Graphon:
    """f(x,y) = (x+y)/2, the canonical smooth full-range kernel."""
    return Graphon(name="gradient", fn=lambda x, y: (np.asarray(x, dtype=np.float64) + y) / 2.0,
                   lipschitz_bound=0.5)


def sinusoidal_graphon() -> Graphon:
    """f(x,y) = 0.3 + 0.25 cos(pi x) cos(pi y); smooth, non-monotone."""

    def fn(x, y):
        return 0.3 + 0.25 * np.cos(np.pi * np.asarray(x, dtype=np.float64)) * np.cos(np.pi * y)

    return Graphon(name="sinusoidal", fn=fn, lipschitz_bound=0.25 * math.pi)


def block_graphon(B, boundaries) -> Graphon:
    """Piecewise-constant kernel: f(x,y) = B[bin(x), bin(y)].

    ``boundaries`` are the K-1 interior cut points of the K latent blocks,
    strictly increasing inside (0,1). A point exactly on a boundary belongs
    to the lower block.
    """
    B = np.asarray(B, dtype=np.float64)
    bnd = np.asarray(boundaries, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("block matrix must be square")
    if not np.array_equal(B, B.T):
        raise ValueError("block matrix must be symmetric")
    if np.any(B < 0.0) or np.any(B > 1.0):
        raise ValueError("block matrix entries must be in [0,1]")
    k = B.shape[0]
    if bnd.shape != (k - 1,):
        raise ValueError(f"expected {k - 1} boundaries for {k} blocks, got {bnd.size}")
    if bnd.size and (np.any(bnd <= 0.0) or np.any(bnd >= 1.0) or np.any(np.diff(bnd) <= 0.0)):
        raise ValueError("boundaries must be strictly increasing inside (0,1)")

    def fn(x, y):
        bx = np.searchsorted(bnd, np.asarray(x, dtype=np.float64), side="left")
        by = np.searchsorted(bnd, np.asarray(y, dtype=np.float64), side="left")
        return B[bx, by]

    return Graphon(name=f"block(k={k})", fn=fn, lipschitz_bound=math.inf, piecewise=True)


def graphon_from_function(fn, lipschitz_bound: float, name: str = "custom",
                          piecewise: bool = False) -> Graphon:
    return Graphon(name=name, fn=fn, lipschitz_bound=float(lipschitz_bound),
                   piecewise=piecewise)


_CATALOG = {
    "constant": lambda params: constant_graphon(params["p"]),
    "gradient": lambda params: gradient_graphon(),
    "sinusoidal": lambda params: sinusoidal_graphon(),
    "block": lambda params: block_graphon(params["B"], params["boundaries"]),
}

_CATALOG_PARAMS = {
    "constant": {"p"},
    "gradient": set(),
    "sinusoidal": set(),
    "block": {"B", "boundaries"},
}


def make_graphon(kind: str, **params) -> Graphon:
    """Build a catalog graphon by name; used by the experiment harness."""
    if kind not in _CATALOG:
        raise ValueError(f"unknown graphon kind {kind!r}; "
                         f"known kinds: {sorted(_CATALOG)}")
    allowed = _CATALOG_PARAMS[kind]
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"unknown parameter(s) {sorted(extra)} for graphon kind {kind!r}")
    missing = allowed - set(params)
    if missing:
        raise ValueError(f"missing parameter(s) {sorted(missing)} for graphon kind {kind!r}")
    return _CATALOG[kind](params)


def _check_unit_open(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError(f"{what} must lie strictly inside (0,1)")


def eval_graphon(g: Graphon, x, y):
    """Evaluate f(x,y); arguments must lie strictly inside (0,1)."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    _check_unit_open(xa, "graphon argument x")
    _check_unit_open(ya, "graphon argument y")
    out = np.asarray(g.fn(xa, ya), dtype=np.float64)
    if np.any(out < 0.0) or np.any(out > 1.0):
        raise ValueError(f"graphon {g.name!r} returned values outside [0,1]")
    if out.ndim == 0:
        return float(out)
    return out


def validate_graphon(g: Graphon, grid_points: int = 100) -> None:
    """Grid check of symmetry, range, and the declared Lipschitz bound.

    The Lipschitz bound is checked on adjacent grid pairs with a 1e-9 slack
    for rounding; piecewise kernels skip it.
    """
    m = int(grid_points)
    xs = (np.arange(m) + 0.5) / m
    F = eval_graphon(g, xs[:, None], xs[None, :])
    if not np.allclose(F, F.T, rtol=0.0, atol=1e-12):
        raise ValueError(f"graphon {g.name!r} is not symmetric on the grid")
    if np.any(F < 0.0) or np.any(F > 1.0):
        raise ValueError(f"graphon {g.name!r} leaves [0,1] on the grid")
    if g.piecewise:
        return
    step = 1.0 / m
    tol = g.lipschitz_bound * step + 1e-9
    if np.max(np.abs(np.diff(F, axis=0))) > tol or np.max(np.abs(np.diff(F, axis=1))) > tol:
        raise ValueError(
            f"graphon {g.name!r} violates its declared Lipschitz bound "
            f"{g.lipschitz_bound} on the grid"
        )


# ---------------------------------------------------------------------------
# latent positions and coupling


@dataclass(frozen=True)
class CouplingMode:
    """Dependence between the two latent vectors.

    kind: "identical" | "independent" | "comonotone-noise".
    For comonotone-noise, the second vector is generated through a Gaussian
    copula with correlation rho: eta = Phi(rho * Phi^-1(xi) + sqrt(1-rho^2) Z).
    rho=1 degenerates to identical, rho=0 to independent; both are special-
    cased so the degenerate identities hold exactly.
    """

    kind: str
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in ("identical", "independent", "comonotone-noise"):
            raise ValueError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "comonotone-noise":
            if self.rho is None:
                raise ValueError("comonotone-noise coupling requires rho")
            if not 0.0 <= self.rho <= 1.0:
                raise ValueError(f"rho must be in [0,1], got {self.rho}")
        elif self.rho is not None:
            raise ValueError(f"coupling kind {self.kind!r} takes no rho")


def check_latents(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("latent positions must form a nonempty 1-d vector")
    _check_unit_open(x, "latent positions")
    return x


def sample_latents(n: int, rng: np.random.Generator) -> np.ndarray:
    """n iid Uniform(0,1) draws, strictly inside the open interval."""
    if n < 1:
        raise ValueError(f"need n >= 1 latent positions, got {n}")
    x = rng.random(n)
    # rng.random covers [0,1); redraw the measure-zero exact zeros
    while np.any(x == 0.0):
        zero = x == 0.0
        x[zero] = rng.random(int(zero.sum()))
    return x


def couple_latents(xi: np.ndarray, mode: CouplingMode,
                   rng: np.random.Generator) -> np.ndarray:
    """Second latent vector eta coupled to xi; marginally Uniform(0,1)."""
    xi = check_latents(xi)
    if mode.kind == "identical":
        return xi.copy()
    if mode.kind == "independent":
        return sample_latents(xi.size, rng)
    if mode.rho == 1.0:
        return xi.copy()
    if mode.rho == 0.0:
        return sample_latents(xi.size, rng)
    z = ndtri(xi)
    eta = ndtr(mode.rho * z + math.sqrt(1.0 - mode.rho**2) * rng.standard_normal(xi.size))
    # ndtr can round to an endpoint for extreme arguments; keep the open interval
    return np.clip(eta, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


# ---------------------------------------------------------------------------
# probability and adjacency matrices


def check_probability_matrix(W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] == 0:
        raise ValueError("probability matrix must be square and nonempty")
    if not np.all(np.isfinite(W)):
        raise ValueError("probability matrix must be finite")
    if np.any(W < 0.0) or np.any(W > 1.0):
        raise ValueError("probability matrix entries must lie in [0,1]")
    if not np.array_equal(W, W.T):
        raise ValueError("probability matrix must be symmetric")
    return W


def check_adjacency(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError("adjacency matrix must be square and nonempty")
    if not np.all((A == 0.0) | (A == 1.0)):
        raise ValueError("adjacency matrix entries must be 0 or 1")
    if not np.array_equal(A, A.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diag(A) != 0.0):
        raise ValueError("adjacency matrix must have a zero diagonal")
    return A


def build_probability_matrix(g: Graphon, latents: np.ndarray) -> np.ndarray:
    """W_ij = f(x_i, x_j), diagonal included."""
    x = check_latents(latents)
    W = np.asarray(g.fn(x[:, None], x[None, :]), dtype=np.float64)
    if np.any(W < 0.0) or np.any(W > 1.0):
        raise ValueError(f"graphon {g.name!r} produced probabilities outside [0,1]")
    if not np.array_equal(W, W.T):
        if not np.allclose(W, W.T, rtol=0.0, atol=1e-12):
            raise ValueError(f"graphon {g.name!r} produced an asymmetric matrix")
        W = (W + W.T) / 2.0
    return W


def sample_adjacency(W: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Symmetric hollow 0/1 matrix with upper-triangle Bernoulli(W_ij)."""
    W = check_probability_matrix(W)
    n = W.shape[0]
    U = rng.random((n, n))
    upper = np.triu(U < W, k=1)
    A = upper.astype(np.float64)
    A += A.T
    return A
