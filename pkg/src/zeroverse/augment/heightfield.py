"""Height fields and surface displacement.

The evaluator is a tensor-product C1 cubic Hermite interpolant.  Node slopes
come from fourth-order finite differences (one-sided four-point stencils at
the two outermost nodes), so cubic polynomials sampled on the grid are
reproduced exactly in each axis, not only quadratics as with Catmull-Rom.
The price is a wider kernel with larger overshoot between nodes; displacement
therefore goes through :meth:`HeightField.height`, which applies the
amplitude cap.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidParameter
from ..mesh import TriMesh


@dataclass(frozen=True, eq=False)
class HeightField:
    grid: np.ndarray  # (H, W); row i at v = i / (H - 1), column j at u = j / (W - 1)
    amp_max: float

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        if g.ndim != 2 or min(g.shape) < 4:
            raise InvalidParameter(f"height grid must be at least 4x4, got {g.shape}")
        if self.amp_max < 0:
            raise InvalidParameter("amp_max must be non-negative")
        if g.size and np.abs(g).max() > self.amp_max * (1 + 1e-12):
            raise InvalidParameter("grid amplitude exceeds amp_max")
        object.__setattr__(self, "grid", g)

    def height(self, u, v) -> np.ndarray:
        """Interpolated height, capped to ``[-amp_max, amp_max]``."""
        return np.clip(eval_bicubic(self, u, v), -self.amp_max, self.amp_max)


def make_heightfield(rng: np.random.Generator, h: int, w: int, face_size: float, k_hf: float = 0.15) -> HeightField:
    """Uniform random amplitudes in ``[-k_hf * face_size, k_hf * face_size]``."""
    if h < 4 or w < 4:
        raise InvalidParameter("height grid must be at least 4x4")
    if face_size <= 0:
        raise InvalidParameter("face_size must be positive")
    amp = k_hf * face_size
    unit = rng.uniform(-1.0, 1.0, (h, w))
    return HeightField(unit * amp, amp)


@lru_cache(maxsize=16)
def _slope_matrix(n: int) -> np.ndarray:
    """Rows give the d/dx (per node spacing) at each node as a combination of node values."""
    d = np.zeros((n, n))
    d[0, :4] = np.array([-11, 18, -9, 2]) / 6
    d[1, :4] = np.array([-2, -3, 6, -1]) / 6
    for k in range(2, n - 2):
        d[k, k - 2 : k + 3] = np.array([1, -8, 0, 8, -1]) / 12
    d[n - 2, n - 4 :] = np.array([1, -6, 3, 2]) / 6
    d[n - 1, n - 4 :] = np.array([-2, 9, -18, 11]) / 6
    d.setflags(write=False)
    return d


def _axis_weights(t: np.ndarray, n: int) -> np.ndarray:
    """(N, n) weights so that ``weights @ samples`` is the 1D interpolant at ``t``."""
    x = np.clip(t, 0.0, 1.0) * (n - 1)
    i = np.minimum(np.floor(x).astype(np.int64), n - 2)
    s = x - i
    s2, s3 = s * s, s * s * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    d = _slope_matrix(n)
    w = h10[:, None] * d[i] + h11[:, None] * d[i + 1]
    rows = np.arange(len(t))
    w[rows, i] += h00
    w[rows, i + 1] += h01
    return w


def eval_bicubic(hf: HeightField, u, v) -> np.ndarray:
    """Uncapped interpolant at ``(u, v)``; coordinates outside [0, 1] are clamped."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    shape = np.broadcast(u, v).shape
    u, v = np.broadcast_to(u, shape).ravel(), np.broadcast_to(v, shape).ravel()
    h, w = hf.grid.shape
    wu = _axis_weights(u, w)
    wv = _axis_weights(v, h)
    # interpolate offsets from one node value so constant grids come out exact
    base = hf.grid[0, 0]
    out = base + np.einsum("na,ab,nb->n", wv, hf.grid - base, wu)
    return out.reshape(shape)


def surface_vertices(mesh: TriMesh, surface_id: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices owned only by ``surface_id`` and one UV for each.

    Vertices on the border with another surface are excluded so that moving
    them can never open a crack between surfaces.
    """
    mask = mesh.groups == surface_id
    if not mask.any():
        raise InvalidParameter(f"surface {surface_id} does not exist")
    corner_v = mesh.triangles[mask].ravel()
    corner_uv = mesh.uvs[mask].reshape(-1, 2)
    verts, first = np.unique(corner_v, return_index=True)
    uv = corner_uv[first]
    shared = np.zeros(mesh.n_vertices, dtype=bool)
    shared[mesh.triangles[~mask].ravel()] = True
    keep = ~shared[verts]
    return verts[keep], uv[keep]


def displace_surface(mesh: TriMesh, surface_id: int, hf: HeightField) -> TriMesh:
    """Move the surface's own vertices along their normals by the capped height."""
    verts, uv = surface_vertices(mesh, surface_id)
    d = hf.height(uv[:, 0], uv[:, 1]) if len(verts) else np.zeros(0)
    if not np.any(d):
        return mesh
    moved = mesh.vertices.copy()
    moved[verts] += d[:, None] * mesh.normals[verts]
    return TriMesh(moved, mesh.triangles, mesh.uvs, mesh.groups)


def displace_surfaces(mesh: TriMesh, fields: dict) -> TriMesh:
    """Apply several height fields (surface id -> :class:`HeightField`) at once.

    Same result as calling :func:`displace_surface` once per surface: a
    vertex owned by one surface touches only that surface's faces, and border
    vertices never move, so no displacement changes another surface's normals.
    """
    moved = None
    for sid, hf in fields.items():
        verts, uv = surface_vertices(mesh, sid)
        if not len(verts):
            continue
        d = hf.height(uv[:, 0], uv[:, 1])
        if not np.any(d):
            continue
        if moved is None:
            moved = mesh.vertices.copy()
        moved[verts] += d[:, None] * mesh.normals[verts]
    if moved is None:
        return mesh
    return TriMesh(moved, mesh.triangles, mesh.uvs, mesh.groups)


def face_size(mesh: TriMesh, surface_id: int) -> float:
    """Smallest non-degenerate principal extent of a surface (rotation invariant).

    A flat face has one zero extent, which is skipped.
    """
    mask = mesh.groups == surface_id
    pts = mesh.vertices[np.unique(mesh.triangles[mask])]
    centered = pts - pts.mean(axis=0)
    _, _, axes = np.linalg.svd(centered, full_matrices=False)
    proj = centered @ axes.T
    extents = proj.max(axis=0) - proj.min(axis=0)
    extents = extents[extents > 1e-9 * max(extents.max(), 1e-300)]
    return float(extents.min()) if len(extents) else 0.0
