"""Object identities: every object is fully determined by (dataset seed, index, config)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import Config
from ..errors import InvalidParameter
from ..seeding import object_seed, uuid_hex, uuid_words


@dataclass(frozen=True)
class JobSpec:
    dataset_seed: int
    index: int
    uuid: str  # 32 hex digits
    seed: int  # root of every random stream of this object
    config_hash: int


def derive_job(dataset_seed: int, index: int, config: Config = Config()) -> JobSpec:
    if index < 0:
        raise InvalidParameter("index must be non-negative")
    return JobSpec(
        dataset_seed=int(dataset_seed),
        index=int(index),
        uuid=uuid_hex(dataset_seed, index),
        seed=object_seed(dataset_seed, index),
        config_hash=config.digest(),
    )


def uuid_pairs(dataset_seed: int, indices) -> np.ndarray:
    """(N, 2) uint64 words of the ids for many indices at once, for collision checks."""
    hi, lo = uuid_words(dataset_seed, np.asarray(indices, dtype=np.uint64))
    return np.stack([hi, lo], axis=1)


def parse_shard(text: str) -> tuple[int, int]:
    """``"i/n"`` -> ``(i, n)`` with ``0 <= i < n``."""
    try:
        i, n = (int(x) for x in text.split("/"))
    except ValueError:
        raise InvalidParameter(f"shard must look like i/n, got {text!r}") from None
    check_shard(i, n)
    return i, n


def check_shard(shard_index: int, shard_count: int) -> None:
    if shard_count < 1 or not 0 <= shard_index < shard_count:
        raise InvalidParameter(f"need 0 <= shard_index < shard_count, got {shard_index}/{shard_count}")


def shard_indices(count: int, shard_index: int, shard_count: int) -> range:
    check_shard(shard_index, shard_count)
    return range(shard_index, count, shard_count)
