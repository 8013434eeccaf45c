"""Deterministic CPU triangle rasterizer.

Vertices are snapped to a fixed-point grid with 8 sub-pixel bits, and edge
functions are evaluated exactly in int64.  A pixel whose center lies exactly
on an edge belongs to the triangle for which that edge is a top or left edge,
so triangles sharing an edge neither overlap nor leave gaps.  Visibility is
resolved by (depth, triangle index), which makes the output independent of
how triangles are batched.
"""
from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter
from ..mesh import TriMesh, face_normals
from ..texture import sample_texture
from .camera import Camera

SUBPIXEL_BITS = 8
_ONE = 1 << SUBPIXEL_BITS
_HALF = _ONE // 2
NEAR = 1e-3
_CHUNK = 1 << 21  # candidate pixels evaluated per batch


@dataclass(frozen=True)
class RenderOptions:
    lighting: str = "unlit"  # or "lambert": headlight diffuse plus constant ambient
    ambient: float = 0.35
    want_depth: bool = False
    flat_colors: bool = False  # one fixed color per surface group instead of textures

    def __post_init__(self):
        if self.lighting not in ("unlit", "lambert"):
            raise InvalidParameter(f"unknown lighting {self.lighting!r}")


@dataclass(frozen=True, eq=False)
class RenderOut:
    rgba: np.ndarray  # (H, W, 4) uint8, alpha 255 where covered
    depth: np.ndarray | None  # (H, W) float32 view depth, 0 where empty
    camera: Camera


@dataclass(frozen=True, eq=False)
class Fragments:
    """The visible triangle at each covered pixel."""

    pixel: np.ndarray  # flat index y * W + x
    triangle: np.ndarray
    bary: np.ndarray  # (N, 3) perspective-correct barycentrics
    depth: np.ndarray  # view-space depth along -z


def _pow2(x: np.ndarray) -> np.ndarray:
    return (1 << np.ceil(np.log2(np.maximum(x, 1))).astype(np.int64)).astype(np.int64)


def _owns_edge(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Top-left rule for counter-clockwise (in y-down pixels, positive area) triangles."""
    return (dy < 0) | ((dy == 0) & (dx > 0))


def rasterize(mesh: TriMesh, cam: Camera) -> Fragments:
    w, h = cam.width, cam.height
    empty = Fragments(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros((0, 3)), np.zeros(0))
    if mesh.n_triangles == 0:
        return empty
    w2c = cam.w2c()
    v = mesh.vertices @ w2c[:3, :3].T + w2c[:3, 3]
    z = -v[:, 2]
    f = cam.focal
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = 0.5 * w + f * v[:, 0] / z
        sy = 0.5 * h - f * v[:, 1] / z

    tris = mesh.triangles
    zt = z[tris]
    keep = np.all(zt > NEAR, axis=1)  # objects sit well inside the view frustum; no clipping
    fx = np.rint(sx * _ONE)
    fy = np.rint(sy * _ONE)
    limit = 1 << 40
    keep &= np.all(np.abs(fx[tris]) < limit, axis=1) & np.all(np.abs(fy[tris]) < limit, axis=1)
    tid = np.nonzero(keep)[0]
    if len(tid) == 0:
        return empty
    X = np.where(np.isfinite(fx), fx, 0).astype(np.int64)[tris[tid]]
    Y = np.where(np.isfinite(fy), fy, 0).astype(np.int64)[tris[tid]]
    Z = zt[tid]

    area = (X[:, 1] - X[:, 0]) * (Y[:, 2] - Y[:, 0]) - (Y[:, 1] - Y[:, 0]) * (X[:, 2] - X[:, 0])
    flip = area < 0
    X[flip] = X[flip][:, [0, 2, 1]]
    Y[flip] = Y[flip][:, [0, 2, 1]]
    Z[flip] = Z[flip][:, [0, 2, 1]]
    order = np.where(flip[:, None], [[0, 2, 1]], [[0, 1, 2]])
    area = np.abs(area)
    ok = area > 0

    # pixel (i, j) has its center at (i * ONE + HALF, j * ONE + HALF)
    i0 = -((-(X.min(axis=1) - _HALF)) // _ONE)
    i1 = (X.max(axis=1) - _HALF) // _ONE
    j0 = -((-(Y.min(axis=1) - _HALF)) // _ONE)
    j1 = (Y.max(axis=1) - _HALF) // _ONE
    i0, j0 = np.maximum(i0, 0), np.maximum(j0, 0)
    i1, j1 = np.minimum(i1, w - 1), np.minimum(j1, h - 1)
    ok &= (i0 <= i1) & (j0 <= j1)
    sel = np.nonzero(ok)[0]
    if len(sel) == 0:
        return empty

    bw, bh = _pow2(i1 - i0 + 1), _pow2(j1 - j0 + 1)
    keys = bw[sel] * (1 << 20) + bh[sel]
    out_pix, out_tri, out_e = [], [], []
    for key in np.unique(keys):
        group = sel[keys == key]
        ww, hh = int(key >> 20), int(key & ((1 << 20) - 1))
        oy, ox = np.divmod(np.arange(ww * hh, dtype=np.int64), ww)
        step = max(1, _CHUNK // (ww * hh))
        for s in range(0, len(group), step):
            g = group[s : s + step]
            px = i0[g, None] + ox[None]
            py = j0[g, None] + oy[None]
            inside = (px <= i1[g, None]) & (py <= j1[g, None])
            cx = px * _ONE + _HALF
            cy = py * _ONE + _HALF
            es = []
            for a, b in ((1, 2), (2, 0), (0, 1)):  # edge opposite vertex 0, 1, 2
                xa, ya = X[g, a, None], Y[g, a, None]
                dx, dy = X[g, b, None] - xa, Y[g, b, None] - ya
                e = dx * (cy - ya) - dy * (cx - xa)
                inside &= (e > 0) | ((e == 0) & _owns_edge(dx, dy))
                es.append(e)
            r, c = np.nonzero(inside)
            out_pix.append(py[r, c] * w + px[r, c])
            out_tri.append(g[r])
            out_e.append(np.stack([e[r, c] for e in es], axis=1))
    pix = np.concatenate(out_pix)
    if len(pix) == 0:
        return empty
    local = np.concatenate(out_tri)
    e = np.concatenate(out_e).astype(np.float64)

    lam = e / area[local, None].astype(np.float64)
    wgt = lam / Z[local]
    s = wgt.sum(axis=1)
    depth = 1.0 / s
    bary_local = wgt / s[:, None]
    tri = tid[local]

    first = _nearest(pix, depth, tri)
    # undo the winding swap so barycentrics refer to the mesh's own corner order
    bary = np.empty((len(first), 3))
    rows = np.arange(len(first))[:, None]
    bary[rows, order[local[first]]] = bary_local[first]
    return Fragments(pix[first], tri[first], bary, depth[first])


def _nearest(pix: np.ndarray, depth: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Index of the closest fragment per pixel, ties going to the lower triangle id."""
    order = np.lexsort((tri, depth, pix))
    p = pix[order]
    first = np.ones(len(p), dtype=bool)
    first[1:] = p[1:] != p[:-1]
    return order[first]


def group_color(group: int) -> np.ndarray:
    """Fixed, well separated flat color for a surface group."""
    hue = (group * 0.6180339887498949) % 1.0
    return np.array(colorsys.hsv_to_rgb(hue, 0.65, 0.9)) * 255.0


def render(mesh: TriMesh, textures, cam: Camera, opts: RenderOptions = RenderOptions()) -> RenderOut:
    """Render a textured mesh.

    Args:
        mesh: triangles with per-corner UVs and surface groups.
        textures: sequence (or mapping) from surface group to :class:`Texture`;
            ignored when ``opts.flat_colors`` is set.
        cam: the camera.
        opts: lighting and outputs.
    """
    w, h = cam.width, cam.height
    rgba = np.zeros((h * w, 4), dtype=np.uint8)
    depth = np.zeros(h * w, dtype=np.float32) if opts.want_depth else None
    frags = rasterize(mesh, cam)
    if len(frags.pixel):
        uv = np.einsum("nk,nkj->nj", frags.bary, mesh.uvs[frags.triangle])
        groups = mesh.groups[frags.triangle]
        color = np.zeros((len(uv), 3))
        for g in np.unique(groups):
            m = groups == g
            if opts.flat_colors:
                color[m] = group_color(int(g))
            else:
                color[m] = sample_texture(textures[int(g)], uv[m, 0], uv[m, 1])
        if opts.lighting == "lambert":
            n = face_normals(mesh)[frags.triangle]
            corners = mesh.vertices[mesh.triangles[frags.triangle]]
            p = np.einsum("nk,nkj->nj", frags.bary, corners)
            view = cam.position - p
            view /= np.linalg.norm(view, axis=1, keepdims=True)
            shade = opts.ambient + (1 - opts.ambient) * np.abs(np.einsum("ij,ij->i", n, view))
            color *= shade[:, None]
        rgba[frags.pixel, :3] = np.clip(np.rint(color), 0, 255).astype(np.uint8)
        rgba[frags.pixel, 3] = 255
        if depth is not None:
            depth[frags.pixel] = frags.depth
    return RenderOut(rgba.reshape(h, w, 4), None if depth is None else depth.reshape(h, w), cam)
