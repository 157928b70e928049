"""Deterministic splittable random streams.

Every draw in the package comes from a generator derived from a
(master seed, label path) pair. Streams are independent of execution
order: adding, removing, or reordering computations never shifts the
stream that another computation sees.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["SeedStream", "stream"]

_MAX_SEED = 2**64


def _encode_label(label) -> int:
    if isinstance(label, (bool, float)):
        raise TypeError(f"stream label must be int or str, got {type(label).__name__}")
    if isinstance(label, (int, np.integer)):
        value = int(label)
        if value < 0:
            raise ValueError(f"stream labels must be nonnegative, got {value}")
        return value
    if isinstance(label, str):
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        return int.from_bytes(digest[:16], "little")
    raise TypeError(f"stream label must be int or str, got {type(label).__name__}")


class SeedStream:
    """A node in a tree of derivable random streams.

    ``child(*labels)`` derives a sub-stream; ``generator()`` returns a
    counter-based (Philox) numpy generator seeded by the full path, so equal
    (master seed, path) always reproduces the same draws.
    """

    __slots__ = ("master_seed", "path")

    def __init__(self, master_seed: int, _path: tuple[int, ...] = ()):
        if isinstance(master_seed, bool) or not isinstance(master_seed, (int, np.integer)):
            raise TypeError("master_seed must be an integer")
        if not 0 <= int(master_seed) < _MAX_SEED:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        self.master_seed = int(master_seed)
        self.path = _path

    def child(self, *labels) -> "SeedStream":
        return SeedStream(
            self.master_seed, self.path + tuple(_encode_label(l) for l in labels)
        )

    def generator(self) -> np.random.Generator:
        entropy = (self.master_seed,) + self.path
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

    def __repr__(self) -> str:
        return f"SeedStream(master_seed={self.master_seed}, path={self.path})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeedStream)
            and self.master_seed == other.master_seed
            and self.path == other.path
        )

    def __hash__(self) -> int:
        return hash((self.master_seed, self.path))


def stream(master_seed: int, *labels) -> np.random.Generator:
    """Shorthand: generator for the stream at (master_seed, labels)."""
    return SeedStream(master_seed).child(*labels).generator()
