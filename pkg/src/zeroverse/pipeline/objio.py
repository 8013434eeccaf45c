"""Wavefront OBJ/MTL and PNG export.

Each surface group becomes one material whose diffuse map is the PNG of its
texture, referenced by a relative path.  Numbers are written with six
decimals, so the files are byte-stable across runs.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..mesh import TriMesh


def _rows(fmt: str, a: np.ndarray) -> str:
    """One ``fmt`` line per row of ``a``."""
    if len(a) == 0:
        return ""
    return ((fmt + "\n") * len(a)) % tuple(a.ravel().tolist())


def material_name(group: int) -> str:
    return f"surface_{group:03d}"


def texture_filename(tex_id: int) -> str:
    return f"tex_{tex_id}.png"


def obj_text(mesh: TriMesh, mtl_name: str = "mesh.mtl") -> str:
    """OBJ with positions, per-corner texture coordinates and one ``usemtl`` block per group."""
    used, inverse = np.unique(mesh.triangles, return_inverse=True)
    verts = mesh.vertices[used] + 0.0  # no negative zeros
    tris = inverse.reshape(-1, 3) + 1
    # identical printed coordinates share one vt line
    uv = np.round(mesh.uvs.reshape(-1, 2), 6) + 0.0
    uv_unique, uv_index = np.unique(uv, axis=0, return_inverse=True)
    uv_index = uv_index.reshape(-1, 3) + 1

    parts = [f"mtllib {mtl_name}\n", _rows("v %.6f %.6f %.6f", verts), _rows("vt %.6f %.6f", uv_unique)]
    order = np.argsort(mesh.groups, kind="stable")
    groups = mesh.groups[order]
    starts = np.flatnonzero(np.r_[True, groups[1:] != groups[:-1]]) if len(groups) else []
    bounds = list(starts) + [len(order)]
    for a, b in zip(bounds[:-1], bounds[1:]):
        sel = order[a:b]
        face = np.stack([tris[sel], uv_index[sel]], axis=2).reshape(-1, 6)
        parts.append(f"usemtl {material_name(int(groups[a]))}\n")
        parts.append(_rows("f %d/%d %d/%d %d/%d", face))
    return "".join(parts)


def mtl_text(textures) -> str:
    """One material per surface group; ``textures[g]`` is the texture id of group ``g``."""
    lines = []
    for g, tex_id in enumerate(textures):
        lines += [f"newmtl {material_name(g)}", "Ka 0 0 0", "Kd 1 1 1", "Ks 0 0 0", f"map_Kd {texture_filename(int(tex_id))}", ""]
    return "\n".join(lines)


def write_png(path, pixels: np.ndarray) -> None:
    """Deterministic PNG (fixed compression settings, no metadata)."""
    mode = {3: "RGB", 4: "RGBA"}[pixels.shape[2]] if pixels.ndim == 3 else "L"
    Image.fromarray(np.ascontiguousarray(pixels), mode=mode).save(path, format="PNG", compress_level=1)


def read_png(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im).copy()


def read_obj(path) -> TriMesh:
    """Parse what :func:`obj_text` writes, recovering group ids from material names."""
    verts, vts, faces, fuv, fgroup = [], [], [], [], []
    current = -1
    for line in Path(path).read_text().splitlines():
        head, _, rest = line.partition(" ")
        if head == "v":
            verts.append([float(x) for x in rest.split()])
        elif head == "vt":
            vts.append([float(x) for x in rest.split()])
        elif head == "usemtl":
            current = int(rest.strip().rsplit("_", 1)[1])
        elif head == "f":
            corners = [c.split("/") for c in rest.split()]
            faces.append([int(c[0]) - 1 for c in corners])
            fuv.append([int(c[1]) - 1 for c in corners])
            fgroup.append(current)
    vts = np.asarray(vts, dtype=float).reshape(-1, 2)
    fuv = np.asarray(fuv, dtype=np.int64).reshape(-1, 3)
    mesh = TriMesh(np.asarray(verts).reshape(-1, 3), np.asarray(faces).reshape(-1, 3), vts[fuv], np.asarray(fgroup))
    return mesh


__all__ = ["material_name", "mtl_text", "obj_text", "read_obj", "read_png", "texture_filename", "write_png"]
