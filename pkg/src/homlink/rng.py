"""Reproducible, order-independent random streams.

Every stochastic stage draws from a Philox (counter-based) generator keyed
by a hash of (master_seed, stream path).  Identical (seed, path) always
yields the identical stream, no matter how trials are scheduled across
workers, which makes trial-parallel runs bit-for-bit reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_U64 = 2 ** 64


def _derive_key(master_seed: int, path: tuple) -> np.ndarray:
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for part in path:
        h.update(b"/")
        h.update(repr(part).encode())
    d = h.digest()
    k0 = int.from_bytes(d[0:8], "little")
    k1 = int.from_bytes(d[8:16], "little")
    return np.array([k0, k1], dtype=np.uint64)


@dataclass(frozen=True)
class RngStreamSpec:
    """Addressable random stream: (master seed, hierarchical path).

    The path is conventionally (experiment id, trial index, stage tag) but
    any hashable tuple of strings/ints works.
    """

    master_seed: int
    stream_path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < _U64):
            raise ValueError(
                f"master_seed must be a u64, got {self.master_seed}")

    def child(self, *parts) -> "RngStreamSpec":
        return RngStreamSpec(self.master_seed, self.stream_path + tuple(parts))

    def generator(self) -> np.random.Generator:
        key = _derive_key(self.master_seed, self.stream_path)
        return np.random.Generator(np.random.Philox(key=key))


def stream(master_seed: int, *path) -> np.random.Generator:
    """Shorthand: generator for (master_seed, path)."""
    return RngStreamSpec(master_seed, tuple(path)).generator()
