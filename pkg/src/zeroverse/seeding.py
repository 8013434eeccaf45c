"""Seed derivation.

Every random stream in the package is a Philox generator keyed by a 64-bit
hash of (parent seed, tag).  Streams for different objects, or for different
stages of the same object, never share draws, so results do not depend on the
order in which objects or stages are processed.
"""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _as_u64(value) -> np.ndarray:
    if isinstance(value, str):
        value = zlib.crc32(value.encode("utf-8"))
    if isinstance(value, (int, np.integer)):
        return np.array([int(value) & _MASK64], dtype=np.uint64)
    return np.asarray(value).astype(np.uint64)


def hash64_array(*parts) -> np.ndarray:
    """Vectorized 64-bit hash; array parts broadcast against each other."""
    with np.errstate(over="ignore"):
        h = np.array([0x6A09E667F3BCC908], dtype=np.uint64)
        for k, part in enumerate(parts):
            p = _as_u64(part)
            h = _mix(h ^ _mix(p + np.uint64((_GOLDEN * (k + 1)) & _MASK64)))
        return h


def hash64(*parts) -> int:
    """Hash integers and/or string tags into one 64-bit integer."""
    return int(hash64_array(*parts)[0])


def uuid_words(dataset_seed: int, index) -> tuple[np.ndarray, np.ndarray]:
    """High and low 64-bit words of the 128-bit object id, vectorized over ``index``."""
    index = np.asarray(index, dtype=np.uint64)
    hi = hash64_array(dataset_seed, index, 0x5555)
    lo = hash64_array(dataset_seed, index, 0xAAAA)
    return np.broadcast_to(hi, index.shape), np.broadcast_to(lo, index.shape)


def uuid_hex(dataset_seed: int, index: int) -> str:
    hi, lo = uuid_words(dataset_seed, np.array([index]))
    return f"{int(hi[0]):016x}{int(lo[0]):016x}"


def object_seed(dataset_seed: int, index: int) -> int:
    return hash64(dataset_seed, index)


def stream(seed: int, tag: str | int = 0) -> np.random.Generator:
    """Independent counter-based generator for ``(seed, tag)``."""
    return np.random.Generator(np.random.Philox(key=hash64(seed, tag)))
