"""Synthesis and rendering of one object, and its on-disk layout.

Every random choice of an object comes from streams keyed by the object seed
and a stage tag ("compose", "texture", "augment", "camera"), so an object's
bytes depend only on its job and the config.
"""
from __future__ import annotations

import hashlib
import json
import os
import shutil
import time
from dataclasses import dataclass
from pathlib import Path

from ..augment import AugPlan, apply_augmentation, plan_augmentation
from ..config import Config
from ..errors import InvalidConfig
from ..mesh import PRIMITIVE_CHARTS, normalize_to_sphere, primitive_mesh
from ..render import RenderOptions, RenderOut, render, sample_camera, structural_rig
from ..sampler import ComposedObject, build_mesh, charts_for, sample_instances
from ..seeding import stream
from ..texture import TextureSource, assign_textures
from .jobs import JobSpec
from .objio import mtl_text, obj_text, texture_filename, write_png

MARKER = "done.marker"
STATUS_DONE = "done"
STATUS_FALLBACK = "failed-boolean-fallback"
STATUS_FAILED = "failed"
COMPLETE = (STATUS_DONE, STATUS_FALLBACK)  # statuses that leave a finished object directory


@dataclass(frozen=True, eq=False)
class Synthesized:
    job: JobSpec
    obj: ComposedObject  # augmented, textured, normalized
    plan: AugPlan


def plan_job(job: JobSpec, cfg: Config = Config()) -> tuple[tuple, AugPlan]:
    """Primitive instances and augmentation decisions, without building any geometry.

    Uses exactly the draws :func:`synthesize` makes, so statistics over plans
    are statistics over the generated dataset.
    """
    instances = sample_instances(stream(job.seed, "compose"), cfg)
    n_groups = sum(len(PRIMITIVE_CHARTS[i.kind]) for i in instances)
    n_vertices = sum(primitive_mesh(i.kind, cfg.tessellation).n_vertices for i in instances)
    plan = plan_augmentation(stream(job.seed, "augment"), n_groups, n_vertices, cfg)
    return instances, plan


def synthesize(job: JobSpec, cfg: Config = Config(), pool_size: int | None = None) -> Synthesized:
    pool_size = cfg.texture_pool_size if pool_size is None else pool_size
    instances = sample_instances(stream(job.seed, "compose"), cfg)
    obj = ComposedObject(build_mesh(instances, cfg.tessellation), instances, charts_for(instances))
    obj = assign_textures(stream(job.seed, "texture"), obj, pool_size)
    plan = plan_augmentation(stream(job.seed, "augment"), obj.mesh.n_groups, obj.mesh.n_vertices, cfg)
    obj = apply_augmentation(obj, plan, cfg)
    obj = obj.replace(mesh=normalize_to_sphere(obj.mesh, cfg.normalize_radius))
    return Synthesized(job, obj, plan)


def cameras_for(job: JobSpec, cfg: Config = Config()) -> list:
    res = cfg.resolution
    if cfg.rig == "struct4":
        return structural_rig(4, cfg.rig_distance, cfg.fov_y_deg, res)
    if cfg.rig == "struct8":
        return structural_rig(8, cfg.rig_distance, cfg.fov_y_deg, res)
    if cfg.views < 1:
        raise InvalidConfig("views must be at least 1")
    rng = stream(job.seed, "camera")
    return [sample_camera(rng, cfg.distance_range, cfg.fov_y_deg, res) for _ in range(cfg.views)]


def render_views(obj: ComposedObject, cameras, source: TextureSource, cfg: Config = Config()) -> list[RenderOut]:
    textures = [source.get(t) for t in obj.textures]
    opts = RenderOptions(lighting=cfg.lighting, want_depth=cfg.write_depth)
    return [render(obj.mesh, textures, cam, opts) for cam in cameras]


def status_of(obj: ComposedObject) -> str:
    return STATUS_FALLBACK if obj.augmentation.fallback else STATUS_DONE


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(text)


def _fsync_tree(root: Path) -> None:
    for p in sorted(root.rglob("*")):
        if p.is_file():
            fd = os.open(p, os.O_RDONLY)
            try:
                os.fsync(fd)
            finally:
                os.close(fd)


def write_object(out_root, job: JobSpec, cfg: Config = Config(), source: TextureSource | None = None) -> dict:
    """Synthesize, render and store one object; returns its manifest row.

    Files are written into a hidden temporary directory which is renamed to
    ``<out_root>/<uuid>`` only once complete, so a crash never leaves a
    partial object under its final name.
    """
    source = TextureSource(cfg) if source is None else source
    out_root = Path(out_root)
    tmp = out_root / f".tmp-{job.uuid}-{os.getpid()}"
    if tmp.exists():
        shutil.rmtree(tmp)
    (tmp / "renders").mkdir(parents=True)

    t0 = time.perf_counter()
    result = synthesize(job, cfg, source.pool_size)
    obj = result.obj
    _write_text(tmp / "mesh.obj", obj_text(obj.mesh))
    _write_text(tmp / "mesh.mtl", mtl_text(obj.textures))
    for tex_id in sorted(set(obj.textures)):
        write_png(tmp / texture_filename(tex_id), source.get(tex_id).pixels)
    t1 = time.perf_counter()

    cameras = cameras_for(job, cfg)
    outs = render_views(obj, cameras, source, cfg)
    for k, out in enumerate(outs):
        write_png(tmp / "renders" / f"view_{k:03d}.png", out.rgba)
        if out.depth is not None:
            (tmp / "renders" / f"depth_{k:03d}.bin").write_bytes(out.depth.astype("<f4").tobytes())
    cams = {"fov_y_deg": cfg.fov_y_deg, "views": [c.to_json() for c in cameras]}
    _write_text(tmp / "cameras.json", json.dumps(cams, indent=1) + "\n")
    t2 = time.perf_counter()

    aug = obj.augmentation
    files = {p.relative_to(tmp).as_posix(): _sha256(p) for p in sorted(tmp.rglob("*")) if p.is_file()}
    marker = {
        "uuid": job.uuid,
        "index": job.index,
        "dataset_seed": job.dataset_seed,
        "config_hash": f"{job.config_hash:016x}",
        "files": files,
    }
    _write_text(tmp / MARKER, json.dumps(marker, indent=1, sort_keys=True) + "\n")
    _fsync_tree(tmp)

    final = out_root / job.uuid
    if final.exists():  # left by a run that died between rename and manifest append
        shutil.rmtree(final)
    os.rename(tmp, final)

    return {
        "uuid": job.uuid,
        "index": job.index,
        "status": status_of(obj),
        "synth_ms": round((t1 - t0) * 1000.0, 3),
        "render_ms": round((t2 - t1) * 1000.0, 3),
        "triangle_count": int(obj.mesh.n_triangles),
        "aug_kind": aug.kind,
        "planned_aug": result.plan.kind,
        "primitive_count": len(obj.instances),
        "n_surfaces": len(obj.charts),
        "n_heightfield": len(aug.heightfield_surfaces),
        "config_hash": f"{job.config_hash:016x}",
    }


def plan_row(job: JobSpec, cfg: Config = Config()) -> dict:
    """The decision fields of a manifest row, computed from the plan alone."""
    instances, plan = plan_job(job, cfg)
    return {
        "uuid": job.uuid,
        "index": job.index,
        "planned_aug": plan.kind,
        "primitive_count": len(instances),
        "n_surfaces": sum(len(PRIMITIVE_CHARTS[i.kind]) for i in instances),
        "n_heightfield": len(plan.heightfields),
    }


def object_is_complete(path) -> bool:
    return (Path(path) / MARKER).is_file()


def read_marker(path) -> dict:
    return json.loads((Path(path) / MARKER).read_text())


def tree_digest(path) -> str:
    """SHA-256 over the relative paths and contents of every file under ``path``."""
    root = Path(path)
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode() + b"\0")
            h.update(hashlib.sha256(p.read_bytes()).digest())
    return h.hexdigest()


def first_view(job: JobSpec, cfg: Config = Config(), source: TextureSource | None = None, view: int = 0) -> RenderOut:
    """Render one object from one camera of the 4-view structural rig."""
    source = TextureSource(cfg) if source is None else source
    obj = synthesize(job, cfg, source.pool_size).obj
    cam = structural_rig(4, cfg.rig_distance, cfg.fov_y_deg, cfg.resolution)[view]
    return render_views(obj, [cam], source, cfg)[0]


__all__ = [
    "COMPLETE",
    "MARKER",
    "STATUS_DONE",
    "STATUS_FAILED",
    "STATUS_FALLBACK",
    "Synthesized",
    "cameras_for",
    "first_view",
    "object_is_complete",
    "plan_job",
    "plan_row",
    "read_marker",
    "render_views",
    "status_of",
    "synthesize",
    "tree_digest",
    "write_object",
]
