"""Which augmentations an object gets, and applying them.

Decisions are drawn first (:func:`plan_augmentation`) from counts alone, then
realized on geometry (:func:`apply_augmentation`).  The split lets the
decision statistics of a large dataset be checked without building meshes,
while generation follows exactly the same draws.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import Config
from ..errors import BooleanFailure, InvalidConfig
from ..mesh import (
    COARSE_TESSELLATION,
    CUTTER_TESSELLATION,
    Transform,
    TriMesh,
    apply_transform,
    bounds,
    primitive_mesh,
)
from ..sampler import ComposedObject, PrimitiveInstance, build_mesh, random_quaternion
from .csg import boolean_difference
from .heightfield import HeightField, displace_surfaces, face_size, make_heightfield
from .shell import solidify, wireframe

KINDS = ("boolean", "wireframe", "none")


@dataclass(frozen=True)
class AugRecord:
    kind: str
    heightfield_surfaces: tuple = ()
    cutter: PrimitiveInstance | None = None
    wire_thickness: float | None = None
    solidify_thickness: float | None = None
    cutter_vertex: int | None = None
    fallback: bool = False  # a planned boolean failed and was dropped

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown augmentation kind {self.kind!r}")
        if (self.kind == "boolean") != (self.cutter is not None):
            raise ValueError("cutter must be present exactly for boolean augmentation")
        if (self.kind == "wireframe") != (self.wire_thickness is not None):
            raise ValueError("wire_thickness must be present exactly for wireframe augmentation")


@dataclass(frozen=True, eq=False)
class AugPlan:
    """Random decisions for one object, independent of its geometry."""

    kind: str
    heightfields: dict = field(default_factory=dict)  # group id -> unit grid in [-1, 1]
    cutter_kind: str | None = None
    cutter_scale: tuple | None = None
    cutter_rotation: tuple | None = None
    cutter_vertex: int | None = None
    solidify_fraction: float | None = None
    wire_fraction: float | None = None
    jitter_seed: int = 0


def choose_augmentation(rng: np.random.Generator, probs: dict | None = None) -> str:
    """Exclusive draw of one of ``boolean``, ``wireframe``, ``none``.

    Kinds missing from ``probs`` have probability zero.
    """
    probs = Config().aug_probs if probs is None else probs
    unknown = set(probs) - set(KINDS)
    if unknown:
        raise InvalidConfig(f"unknown augmentation kinds {sorted(unknown)}")
    p = np.array([float(probs.get(k, 0.0)) for k in KINDS])
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidConfig(f"augmentation probabilities must be non-negative and sum to 1, got {probs}")
    u = rng.random()
    return KINDS[min(int(np.searchsorted(np.cumsum(p), u, side="right")), len(KINDS) - 1)]


def plan_augmentation(rng: np.random.Generator, n_groups: int, n_vertices: int, cfg: Config = Config()) -> AugPlan:
    displaced = [g for g in range(n_groups) if rng.random() < cfg.p_heightfield]
    h, w = cfg.hf_grid
    grids = {g: make_heightfield(rng, h, w, 1.0, 1.0).grid for g in displaced}
    kind = choose_augmentation(rng, cfg.aug_probs)
    if kind == "boolean":
        pool = cfg.cutter_pool
        ckind = pool[int(rng.integers(len(pool)))]
        lo, hi = cfg.cutter_scale_range
        scale = tuple(rng.uniform(lo, hi, 3))
        rotation = random_quaternion(rng)
        vertex = int(rng.integers(n_vertices))
        frac = float(rng.uniform(*cfg.solidify_range))
        jitter = int(rng.integers(2**63))
        return AugPlan(kind, grids, ckind, scale, rotation, vertex, frac, jitter_seed=jitter)
    if kind == "wireframe":
        return AugPlan(kind, grids, wire_fraction=float(rng.uniform(*cfg.wire_thickness_range)))
    return AugPlan(kind, grids)


def bounding_radius(mesh: TriMesh) -> float:
    """Radius of the sphere around the box center that holds every vertex."""
    if mesh.n_triangles == 0:
        return 0.0
    used = mesh.vertices[np.unique(mesh.triangles)]
    return float(np.linalg.norm(used - bounds(mesh).center, axis=1).max())


def _displace(mesh: TriMesh, grids: dict, k_hf: float) -> TriMesh:
    fields = {}
    for g, unit in grids.items():
        amp = k_hf * face_size(mesh, g)
        if amp > 0:
            fields[g] = HeightField(unit * amp, amp)
    return displace_surfaces(mesh, fields)


def apply_augmentation(obj: ComposedObject, plan: AugPlan, cfg: Config = Config()) -> ComposedObject:
    mesh = _displace(obj.mesh, plan.heightfields, cfg.k_hf)
    surfaces = tuple(sorted(plan.heightfields))

    if plan.kind == "boolean":
        center = tuple(obj.mesh.vertices[plan.cutter_vertex])
        cutter = PrimitiveInstance(plan.cutter_kind, Transform(plan.cutter_scale, plan.cutter_rotation, center))
        cutter_mesh = apply_transform(primitive_mesh(cutter.kind, CUTTER_TESSELLATION), cutter.transform)
        try:
            cut = boolean_difference(mesh, cutter_mesh, seed=plan.jitter_seed)
            if cut.n_triangles == 0:
                raise BooleanFailure("cutter removed the whole object")
        except BooleanFailure:
            record = AugRecord("none", surfaces, fallback=True)
            return obj.replace(mesh=mesh, augmentation=record)
        thickness = plan.solidify_fraction * bounding_radius(cutter_mesh)
        record = AugRecord("boolean", surfaces, cutter=cutter, solidify_thickness=thickness, cutter_vertex=plan.cutter_vertex)
        return obj.replace(mesh=solidify(cut, thickness), augmentation=record)

    if plan.kind == "wireframe":
        # beams follow a coarse rebuild of the same object; on the fine mesh
        # they would fuse into a solid
        coarse = _displace(build_mesh(obj.instances, COARSE_TESSELLATION), plan.heightfields, cfg.k_hf)
        thickness = plan.wire_fraction * bounding_radius(mesh)
        record = AugRecord("wireframe", surfaces, wire_thickness=thickness)
        return obj.replace(mesh=wireframe(coarse, thickness, cfg.wire_subdiv), augmentation=record)

    return obj.replace(mesh=mesh, augmentation=AugRecord("none", surfaces))


def augment_object(rng: np.random.Generator, obj: ComposedObject, cfg: Config = Config()) -> ComposedObject:
    """Height fields per surface, then at most one of boolean difference or wireframe."""
    plan = plan_augmentation(rng, obj.mesh.n_groups, obj.mesh.n_vertices, cfg)
    return apply_augmentation(obj, plan, cfg)
