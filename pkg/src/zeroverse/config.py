"""Dataset configuration: one flat JSON document, every key optional."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfig
from .mesh import PRIMITIVE_KINDS, Tessellation

TEXTURE_FAMILIES = ("checker", "value-noise", "gradient", "voronoi")
RIGS = ("random", "struct4", "struct8")

# keys that change which objects exist but never the bytes of any object
_NOT_HASHED = ("count",)


@dataclass(frozen=True)
class Config:
    # composition
    scale_lo: float = 0.15
    scale_hi: float = 0.6
    count_weights: tuple = (5, 5, 5, 5, 5, 4, 3, 2, 1)
    primitive_pool: tuple = PRIMITIVE_KINDS
    tessellation: Tessellation = field(default_factory=Tessellation)
    # augmentation
    p_boolean: float = 0.4
    p_wireframe: float = 0.2
    p_none: float = 0.4
    p_heightfield: float = 0.5
    k_hf: float = 0.15
    hf_grid: tuple = (8, 8)
    wire_thickness_range: tuple = (0.01, 0.04)
    wire_subdiv: int = 1
    solidify_range: tuple = (0.02, 0.08)
    cutter_pool: tuple = ("cube", "sphere", "cylinder", "cone")
    cutter_scale_range: tuple = (0.15, 0.6)
    # texturing
    texture_res: int = 256
    texture_pool_size: int = 10_000
    texture_families: tuple = TEXTURE_FAMILIES
    texture_dir: str | None = None
    # rendering
    resolution: int = 512
    views: int = 32
    rig: str = "random"
    fov_y_deg: float = 60.0
    distance_range: tuple = (2.0, 3.0)
    rig_distance: float = 2.5
    lighting: str = "unlit"
    write_depth: bool = False
    normalize_radius: float = 0.9
    # dataset
    count: int = 400_000
    seed: int = 0

    def __post_init__(self):
        for name, f in self.__dataclass_fields__.items():
            value = getattr(self, name)
            if isinstance(value, list):
                object.__setattr__(self, name, tuple(value))
        if isinstance(self.tessellation, dict):
            tess = dict(self.tessellation)
            if "torus_radii" in tess:
                tess["torus_radii"] = tuple(tess["torus_radii"])
            object.__setattr__(self, "tessellation", Tessellation(**tess))
        if self.rig not in RIGS:
            raise InvalidConfig(f"rig must be one of {RIGS}, got {self.rig!r}")
        if self.lighting not in ("unlit", "lambert"):
            raise InvalidConfig("lighting must be 'unlit' or 'lambert'")
        unknown = set(self.primitive_pool) - set(PRIMITIVE_KINDS)
        unknown |= set(self.cutter_pool) - set(PRIMITIVE_KINDS)
        if unknown:
            raise InvalidConfig(f"unknown primitive kinds {sorted(unknown)}")
        if not self.primitive_pool or not self.count_weights:
            raise InvalidConfig("primitive_pool and count_weights must be non-empty")
        if any(w < 0 for w in self.count_weights) or sum(self.count_weights) <= 0:
            raise InvalidConfig("count_weights must be non-negative with a positive sum")
        bad = set(self.texture_families) - set(TEXTURE_FAMILIES)
        if bad:
            raise InvalidConfig(f"unknown texture families {sorted(bad)}")

    @property
    def aug_probs(self) -> dict:
        return {"boolean": self.p_boolean, "wireframe": self.p_wireframe, "none": self.p_none}

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return json.loads(json.dumps(d))

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "Config":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)

    def digest(self) -> int:
        """64-bit digest of everything that influences object content."""
        d = {k: v for k, v in self.to_dict().items() if k not in _NOT_HASHED}
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "big")
