"""Random composition of primitives into one object."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import Config
from .errors import InvalidParameter
from .mesh import (
    PRIMITIVE_CHARTS,
    Tessellation,
    Transform,
    TriMesh,
    apply_transform,
    merge,
    primitive_mesh,
)

DEFAULT_COUNT_WEIGHTS = (5, 5, 5, 5, 5, 4, 3, 2, 1)


@dataclass(frozen=True)
class PrimitiveInstance:
    kind: str
    transform: Transform

    def __post_init__(self):
        if self.kind not in PRIMITIVE_CHARTS:
            raise InvalidParameter(f"unknown primitive kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class ComposedObject:
    """A mesh plus everything needed to explain how it was made.

    ``textures`` and ``charts`` are indexed by surface-group id.
    """

    mesh: TriMesh
    instances: tuple
    charts: tuple
    textures: tuple = ()
    augmentation: object = None

    def replace(self, **changes) -> "ComposedObject":
        return replace(self, **changes)


def count_probabilities(weights=DEFAULT_COUNT_WEIGHTS) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return w / w.sum()


def sample_primitive_count(rng: np.random.Generator, weights=DEFAULT_COUNT_WEIGHTS) -> int:
    """Number of primitives in ``1..len(weights)`` drawn from the unnormalized ``weights``."""
    p = count_probabilities(weights)
    return int(rng.choice(len(p), p=p)) + 1


def random_quaternion(rng: np.random.Generator) -> tuple:
    """Uniform rotation on SO(3) (Shoemake's method), as ``(w, x, y, z)``."""
    u1, u2, u3 = rng.random(3)
    a, b = np.sqrt(1 - u1), np.sqrt(u1)
    q = np.array([b * np.cos(2 * np.pi * u3), a * np.sin(2 * np.pi * u2), a * np.cos(2 * np.pi * u2), b * np.sin(2 * np.pi * u3)])
    return tuple(q / np.linalg.norm(q))


def sample_transform(rng: np.random.Generator, cfg: Config = Config()) -> Transform:
    """Per-axis scale in [scale_lo, scale_hi], center in [-1, 1]^3, uniform rotation."""
    lo, hi = cfg.scale_lo, cfg.scale_hi
    if not 0 < lo <= hi:
        raise InvalidParameter(f"need 0 < scale_lo <= scale_hi, got ({lo}, {hi})")
    scale = rng.uniform(lo, hi, 3) if hi > lo else np.full(3, float(lo))
    translation = rng.uniform(-1.0, 1.0, 3)
    return Transform(tuple(scale), random_quaternion(rng), tuple(translation))


def sample_instances(rng: np.random.Generator, cfg: Config = Config()) -> tuple:
    """Primitive kinds (uniform, with replacement) and transforms, without building geometry."""
    n = sample_primitive_count(rng, cfg.count_weights)
    pool = cfg.primitive_pool
    out = []
    for _ in range(n):
        kind = pool[int(rng.integers(len(pool)))]
        out.append(PrimitiveInstance(kind, sample_transform(rng, cfg)))
    return tuple(out)


def build_mesh(instances, tess: Tessellation = Tessellation()) -> TriMesh:
    """Concatenate the transformed primitives; intersections are left as they are."""
    return merge(apply_transform(primitive_mesh(i.kind, tess), i.transform) for i in instances)


def charts_for(instances) -> tuple:
    return tuple(tag for i in instances for tag in PRIMITIVE_CHARTS[i.kind])


def compose(rng: np.random.Generator, cfg: Config = Config()) -> ComposedObject:
    instances = sample_instances(rng, cfg)
    return ComposedObject(build_mesh(instances, cfg.tessellation), instances, charts_for(instances))
