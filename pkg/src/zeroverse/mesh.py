"""Indexed triangle meshes, the five primitive generators, and basic measurements.

Vertices are welded (a position shared by several faces is stored once) so that
edge-based topology checks work by index; texture coordinates are stored per
triangle corner so seams and face boundaries need no vertex duplication.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import InvalidParameter

PRIMITIVE_KINDS = ("cube", "sphere", "cylinder", "cone", "torus")


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangle mesh.

    Attributes:
        vertices: (V, 3) float64 positions.
        triangles: (F, 3) int64 vertex indices, counter-clockwise seen from outside.
        uvs: (F, 3, 2) per-corner texture coordinates in [0, 1].
        groups: (F,) surface-group id of each triangle.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    uvs: np.ndarray
    groups: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        object.__setattr__(self, "uvs", np.asarray(self.uvs, dtype=np.float64).reshape(-1, 3, 2))
        object.__setattr__(self, "groups", np.asarray(self.groups, dtype=np.int64).reshape(-1))
        n = len(self.triangles)
        if len(self.uvs) != n or len(self.groups) != n:
            raise InvalidParameter("uvs and groups must have one entry per triangle")
        if n and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise InvalidParameter("triangle index out of range")

    @classmethod
    def empty(cls) -> "TriMesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), np.int64), np.zeros((0, 3, 2)), np.zeros(0, np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_groups(self) -> int:
        return int(self.groups.max()) + 1 if len(self.groups) else 0

    @cached_property
    def normals(self) -> np.ndarray:
        return vertex_normals(self)

    def corners(self) -> np.ndarray:
        """(F, 3, 3) corner positions."""
        return self.vertices[self.triangles]


@dataclass(frozen=True)
class Transform:
    """Scale, then rotate (unit quaternion ``w, x, y, z``), then translate."""

    scale: tuple = (1.0, 1.0, 1.0)
    rotation: tuple = (1.0, 0.0, 0.0, 0.0)
    translation: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        s = np.asarray(self.scale, dtype=float)
        q = np.asarray(self.rotation, dtype=float)
        if s.shape != (3,) or not np.all(s > 0) or not np.all(np.isfinite(s)):
            raise InvalidParameter(f"scale components must be finite and > 0, got {self.scale}")
        if q.shape != (4,) or abs(float(np.linalg.norm(q)) - 1.0) > 1e-9:
            raise InvalidParameter("rotation must be a unit quaternion")
        if not np.all(np.isfinite(self.translation)):
            raise InvalidParameter("translation must be finite")
        object.__setattr__(self, "scale", tuple(float(x) for x in s))
        object.__setattr__(self, "rotation", tuple(float(x) for x in q))
        object.__setattr__(self, "translation", tuple(float(x) for x in self.translation))

    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.rotation)

    @property
    def is_identity_rotation(self) -> bool:
        return self.rotation == (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Aabb:
    min: np.ndarray = field(default_factory=lambda: np.zeros(3))
    max: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)

    @property
    def extent(self) -> np.ndarray:
        return self.max - self.min

    def overlaps(self, other: "Aabb", pad: float = 0.0) -> bool:
        return bool(np.all(self.min - pad <= other.max) and np.all(other.min - pad <= self.max))


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


# ---------------------------------------------------------------------------
# measurements


def face_normals(m: TriMesh, normalize: bool = True) -> np.ndarray:
    c = m.corners()
    n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    if normalize:
        length = np.linalg.norm(n, axis=1, keepdims=True)
        n = n / np.where(length > 0, length, 1.0)
    return n


def triangle_areas(m: TriMesh) -> np.ndarray:
    return 0.5 * np.linalg.norm(face_normals(m, normalize=False), axis=1)


def vertex_normals(m: TriMesh) -> np.ndarray:
    """Area-weighted vertex normals (unit length; zero for isolated vertices)."""
    weighted = face_normals(m, normalize=False)  # length = 2 * area
    n = np.zeros_like(m.vertices)
    for k in range(3):
        np.add.at(n, m.triangles[:, k], weighted)
    length = np.linalg.norm(n, axis=1, keepdims=True)
    return n / np.where(length > 0, length, 1.0)


def unique_edges(m: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Undirected edges (E, 2) with ``lo < hi`` and the number of triangles using each."""
    e = np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]])
    e.sort(axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)
    return edges, counts


def is_closed(m: TriMesh) -> bool:
    """True when every undirected edge is shared by exactly two triangles."""
    if m.n_triangles == 0:
        return True
    _, counts = unique_edges(m)
    return bool(np.all(counts == 2))


def is_consistently_oriented(m: TriMesh) -> bool:
    """Each directed edge used at most once, i.e. neighbours agree on orientation."""
    e = np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]])
    return len(np.unique(e, axis=0)) == len(e)


def euler_characteristic(m: TriMesh) -> int:
    """V - E + F over referenced vertices and unique undirected edges."""
    if m.n_triangles == 0:
        return 0
    v = len(np.unique(m.triangles))
    edges, _ = unique_edges(m)
    return int(v - len(edges) + m.n_triangles)


def signed_volume(m: TriMesh) -> float:
    if m.n_triangles == 0:
        return 0.0
    c = m.corners()
    return float(np.einsum("ij,ij->i", c[:, 0], np.cross(c[:, 1], c[:, 2])).sum() / 6.0)


def bounds(m: TriMesh) -> Aabb:
    if m.n_vertices == 0:
        return Aabb()
    used = m.vertices[np.unique(m.triangles)] if m.n_triangles else m.vertices
    return Aabb(used.min(axis=0), used.max(axis=0))


def connected_components(m: TriMesh) -> np.ndarray:
    """Component label per triangle; triangles sharing a vertex are connected."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components as _cc

    if m.n_triangles == 0:
        return np.zeros(0, np.int64)
    t = m.triangles
    rows = np.concatenate([t[:, 0], t[:, 1]])
    cols = np.concatenate([t[:, 1], t[:, 2]])
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m.n_vertices, m.n_vertices))
    _, labels = _cc(graph, directed=False)
    _, dense = np.unique(labels[t[:, 0]], return_inverse=True)
    return dense.astype(np.int64)


# ---------------------------------------------------------------------------
# editing


def apply_transform(m: TriMesh, t: Transform) -> TriMesh:
    v = m.vertices * np.asarray(t.scale)
    if not t.is_identity_rotation:
        v = v @ t.rotation_matrix().T
    if any(t.translation):
        v = v + np.asarray(t.translation)
    return TriMesh(v, m.triangles, m.uvs, m.groups)


def merge(meshes) -> TriMesh:
    """Concatenate meshes; group ids of later meshes are offset so they stay unique."""
    meshes = list(meshes)
    if not meshes:
        raise InvalidParameter("merge needs at least one mesh")
    verts, tris, uvs, groups = [], [], [], []
    v_off = g_off = 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + v_off)
        uvs.append(m.uvs)
        groups.append(m.groups + g_off)
        v_off += m.n_vertices
        g_off += m.n_groups
    return TriMesh(np.concatenate(verts), np.concatenate(tris), np.concatenate(uvs), np.concatenate(groups))


def normalize_to_sphere(m: TriMesh, radius: float = 0.9) -> TriMesh:
    """Recenter on the bounding-box center and scale so the farthest vertex sits at ``radius``."""
    if radius <= 0:
        raise InvalidParameter("radius must be positive")
    if m.n_triangles == 0:
        return m
    v = m.vertices - bounds(m).center
    r = np.linalg.norm(v[np.unique(m.triangles)], axis=1).max()
    if r == 0:
        return TriMesh(v, m.triangles, m.uvs, m.groups)
    return TriMesh(v * (radius / r), m.triangles, m.uvs, m.groups)


def compact(m: TriMesh) -> TriMesh:
    """Drop unreferenced vertices and renumber groups to be contiguous from 0."""
    used, inverse = np.unique(m.triangles, return_inverse=True)
    _, groups = np.unique(m.groups, return_inverse=True)
    return TriMesh(m.vertices[used], inverse.reshape(-1, 3), m.uvs, groups)


def weld(vertices: np.ndarray, triangles: np.ndarray, decimals: int = 12):
    """Merge vertices with identical rounded positions."""
    key = np.round(vertices, decimals) + 0.0
    unique, inverse = np.unique(key, axis=0, return_inverse=True)
    return unique, inverse.reshape(-1)[triangles]


# ---------------------------------------------------------------------------
# primitive generators


def _finish(vertices, triangles, uvs, groups) -> TriMesh:
    vertices = np.asarray(vertices, dtype=np.float64) + 0.0
    vertices, triangles = weld(vertices, np.asarray(triangles, dtype=np.int64))
    m = TriMesh(vertices, triangles, uvs, groups)
    if signed_volume(m) < 0:
        m = TriMesh(m.vertices, m.triangles[:, ::-1], m.uvs[:, ::-1], m.groups)
    return m


def _grid_triangles(nu: int, nv: int, offset: int = 0) -> np.ndarray:
    """Two triangles per cell of an (nu+1) x (nv+1) vertex grid stored row-major in u."""
    i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    a = (i * (nv + 1) + j).ravel() + offset
    b = a + (nv + 1)
    return np.concatenate([np.stack([a, b, b + 1], 1), np.stack([a, b + 1, a + 1], 1)])


def _grid_uvs(nu: int, nv: int, tris_local: np.ndarray) -> np.ndarray:
    s = (tris_local // (nv + 1)) / nu
    t = (tris_local % (nv + 1)) / nv
    return np.stack([s, t], axis=-1)


_CUBE_FACES = [  # (normal, u axis, v axis) with u x v = normal
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((-1, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, -1, 0), (1, 0, 0), (0, 0, 1)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((0, 0, -1), (0, 1, 0), (1, 0, 0)),
]


def gen_cube(tess: int = 4) -> TriMesh:
    """Axis-aligned unit cube centered at the origin, one surface group per face."""
    if int(tess) != tess or tess < 1:
        raise InvalidParameter("cube tessellation must be a positive integer")
    tess = int(tess)
    s = np.arange(tess + 1) / tess - 0.5
    su, sv = np.meshgrid(s, s, indexing="ij")
    verts, tris, uvs, groups = [], [], [], []
    local = _grid_triangles(tess, tess)
    for g, (n, u, v) in enumerate(_CUBE_FACES):
        n, u, v = (np.asarray(x, float) for x in (n, u, v))
        p = 0.5 * n + su.reshape(-1, 1) * u + sv.reshape(-1, 1) * v
        tris.append(local + len(verts) * (tess + 1) ** 2)
        verts.append(p)
        uvs.append(_grid_uvs(tess, tess, local))
        groups.append(np.full(len(local), g))
    return _finish(np.concatenate(verts), np.concatenate(tris), np.concatenate(uvs), np.concatenate(groups))


def _ring(radius, y, segments):
    phi = 2 * np.pi * np.arange(segments) / segments
    return np.stack([radius * np.cos(phi), np.full(segments, float(y)), radius * np.sin(phi)], 1)


def _band(lo_start: int, hi_start: int, segments: int) -> np.ndarray:
    """Quads between two rings of ``segments`` vertices (wrapping)."""
    j = np.arange(segments)
    jn = (j + 1) % segments
    a, b = lo_start + j, lo_start + jn
    c, d = hi_start + jn, hi_start + j
    return np.concatenate([np.stack([a, d, c], 1), np.stack([a, c, b], 1)])


def _band_uv(segments: int, v_lo: float, v_hi: float) -> np.ndarray:
    j = np.arange(segments)
    u0, u1 = j / segments, (j + 1) / segments
    lo0 = np.stack([u0, np.full(segments, v_lo)], 1)
    lo1 = np.stack([u1, np.full(segments, v_lo)], 1)
    hi0 = np.stack([u0, np.full(segments, v_hi)], 1)
    hi1 = np.stack([u1, np.full(segments, v_hi)], 1)
    return np.concatenate([np.stack([lo0, hi0, hi1], 1), np.stack([lo0, hi1, lo1], 1)])


def _fan(center: int, ring_start: int, segments: int, reverse: bool = False) -> np.ndarray:
    j = np.arange(segments)
    t = np.stack([np.full(segments, center), ring_start + j, ring_start + (j + 1) % segments], 1)
    return t[:, ::-1] if reverse else t


def _fan_uv_polar(segments: int, v_center: float, v_ring: float, reverse: bool = False) -> np.ndarray:
    j = np.arange(segments)
    c = np.stack([(j + 0.5) / segments, np.full(segments, v_center)], 1)
    r0 = np.stack([j / segments, np.full(segments, v_ring)], 1)
    r1 = np.stack([(j + 1) / segments, np.full(segments, v_ring)], 1)
    uv = np.stack([c, r0, r1], 1)
    return uv[:, ::-1] if reverse else uv


def _planar_uv(points: np.ndarray, tris: np.ndarray, flip: bool = False) -> np.ndarray:
    x = (points[tris][..., 0] + 1) / 2
    z = (points[tris][..., 2] + 1) / 2
    return np.stack([1 - x if flip else x, z], -1)


def gen_sphere(rings: int = 32, segments: int = 64) -> TriMesh:
    """Unit-radius UV sphere with poles on the y axis; ``rings`` latitude bands."""
    if rings < 2 or segments < 3:
        raise InvalidParameter("sphere needs rings >= 2 and segments >= 3")
    theta = np.pi * np.arange(1, rings) / rings
    verts = [np.array([[0.0, 1.0, 0.0]])]
    for th in theta:
        verts.append(_ring(np.sin(th), np.cos(th), segments))
    verts.append(np.array([[0.0, -1.0, 0.0]]))
    verts = np.concatenate(verts)
    south = len(verts) - 1
    ring_start = lambda k: 1 + k * segments  # noqa: E731
    tris = [_fan(0, ring_start(0), segments, reverse=True)]
    uvs = [_fan_uv_polar(segments, 1.0, 1 - 1 / rings, reverse=True)]
    for k in range(rings - 2):
        tris.append(_band(ring_start(k + 1), ring_start(k), segments))
        uvs.append(_band_uv(segments, 1 - (k + 2) / rings, 1 - (k + 1) / rings))
    tris.append(_fan(south, ring_start(rings - 2), segments))
    uvs.append(_fan_uv_polar(segments, 0.0, 1 / rings))
    tris = np.concatenate(tris)
    return _finish(verts, tris, np.concatenate(uvs), np.zeros(len(tris), np.int64))


def _disk(segments: int, cap_rings: int, y: float, rim_start: int, first_index: int, top: bool):
    """Concentric-ring cap whose outer rim is the existing ring at ``rim_start``."""
    verts = [np.array([[0.0, y, 0.0]])]
    for k in range(1, cap_rings):
        verts.append(_ring(k / cap_rings, y, segments))
    verts = np.concatenate(verts)
    center = first_index
    starts = [first_index + 1 + (k - 1) * segments for k in range(1, cap_rings)] + [rim_start]
    tris = [_fan(center, starts[0], segments, reverse=top)]
    for k in range(cap_rings - 1):
        b = _band(starts[k], starts[k + 1], segments)
        tris.append(b[:, ::-1] if top else b)
    return verts, np.concatenate(tris)


def gen_cylinder(segments: int = 64, stacks: int = 1, cap_rings: int = 1) -> TriMesh:
    """Unit-radius, unit-height capped cylinder along y; groups: side, top cap, bottom cap."""
    if segments < 3 or stacks < 1 or cap_rings < 1:
        raise InvalidParameter("cylinder needs segments >= 3, stacks >= 1, cap_rings >= 1")
    side = np.concatenate([_ring(1.0, -0.5 + i / stacks, segments) for i in range(stacks + 1)])
    side_tris = np.concatenate([_band(i * segments, (i + 1) * segments, segments) for i in range(stacks)])
    side_uv = np.concatenate([_band_uv(segments, i / stacks, (i + 1) / stacks) for i in range(stacks)])
    top_v, top_t = _disk(segments, cap_rings, 0.5, stacks * segments, len(side), top=True)
    bot_v, bot_t = _disk(segments, cap_rings, -0.5, 0, len(side) + len(top_v), top=False)
    verts = np.concatenate([side, top_v, bot_v])
    tris = np.concatenate([side_tris, top_t, bot_t])
    uvs = np.concatenate([side_uv, _planar_uv(verts, top_t), _planar_uv(verts, bot_t, flip=True)])
    groups = np.concatenate([np.zeros(len(side_tris)), np.ones(len(top_t)), np.full(len(bot_t), 2)])
    return _finish(verts, tris, uvs, groups)


def gen_cone(segments: int = 64, stacks: int = 1, cap_rings: int = 1) -> TriMesh:
    """Unit base radius, unit height cone along y (apex up); groups: side, base."""
    if segments < 3 or stacks < 1 or cap_rings < 1:
        raise InvalidParameter("cone needs segments >= 3, stacks >= 1, cap_rings >= 1")
    side = np.concatenate([_ring(1 - i / stacks, -0.5 + i / stacks, segments) for i in range(stacks)])
    apex = len(side)
    side = np.concatenate([side, [[0.0, 0.5, 0.0]]])
    tris = [_band(i * segments, (i + 1) * segments, segments) for i in range(stacks - 1)]
    uvs = [_band_uv(segments, i / stacks, (i + 1) / stacks) for i in range(stacks - 1)]
    tris.append(_fan(apex, (stacks - 1) * segments, segments, reverse=True))
    uvs.append(_fan_uv_polar(segments, 1.0, (stacks - 1) / stacks, reverse=True))
    side_tris = np.concatenate(tris)
    base_v, base_t = _disk(segments, cap_rings, -0.5, 0, len(side), top=False)
    verts = np.concatenate([side, base_v])
    all_tris = np.concatenate([side_tris, base_t])
    all_uv = np.concatenate([np.concatenate(uvs), _planar_uv(verts, base_t, flip=True)])
    groups = np.concatenate([np.zeros(len(side_tris)), np.ones(len(base_t))])
    return _finish(verts, all_tris, all_uv, groups)


def gen_torus(major_segments: int = 48, minor_segments: int = 24, major_r: float = 1.0, minor_r: float = 0.35) -> TriMesh:
    """Torus around the y axis with tube radius ``minor_r``."""
    if major_segments < 3 or minor_segments < 3:
        raise InvalidParameter("torus needs at least 3 segments in each direction")
    if not 0 < minor_r < major_r:
        raise InvalidParameter("torus needs 0 < minor_r < major_r")
    M, m = major_segments, minor_segments
    phi = 2 * np.pi * np.arange(M) / M
    theta = 2 * np.pi * np.arange(m) / m
    P, T = np.meshgrid(phi, theta, indexing="ij")
    ring = major_r + minor_r * np.cos(T)
    verts = np.stack([ring * np.cos(P), minor_r * np.sin(T), ring * np.sin(P)], -1).reshape(-1, 3)
    i, j = np.meshgrid(np.arange(M), np.arange(m), indexing="ij")
    i, j = i.ravel(), j.ravel()
    idx = lambda a, b: (a % M) * m + (b % m)  # noqa: E731
    a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
    tris = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    ua, ub = i / M, (i + 1) / M
    va, vb = j / m, (j + 1) / m
    uv_a, uv_b = np.stack([ua, va], 1), np.stack([ub, va], 1)
    uv_c, uv_d = np.stack([ub, vb], 1), np.stack([ua, vb], 1)
    uvs = np.concatenate([np.stack([uv_a, uv_b, uv_c], 1), np.stack([uv_a, uv_c, uv_d], 1)])
    return _finish(verts, tris, uvs, np.zeros(len(tris), np.int64))


@dataclass(frozen=True)
class Tessellation:
    """Per-primitive mesh resolution used when building objects."""

    cube: int = 16
    sphere_rings: int = 32
    sphere_segments: int = 64
    round_segments: int = 64
    round_stacks: int = 16
    cap_rings: int = 8
    torus_major: int = 48
    torus_minor: int = 24
    torus_radii: tuple = (1.0, 0.35)


COARSE_TESSELLATION = Tessellation(
    cube=2, sphere_rings=8, sphere_segments=16, round_segments=16, round_stacks=1, cap_rings=1,
    torus_major=16, torus_minor=8,
)
CUTTER_TESSELLATION = Tessellation(
    cube=1, sphere_rings=12, sphere_segments=24, round_segments=24, round_stacks=1, cap_rings=1,
    torus_major=24, torus_minor=12,
)


@lru_cache(maxsize=64)
def primitive_mesh(kind: str, tess: Tessellation = Tessellation()) -> TriMesh:
    """Canonical mesh of one primitive kind (cached; treat as read-only)."""
    if kind == "cube":
        return gen_cube(tess.cube)
    if kind == "sphere":
        return gen_sphere(tess.sphere_rings, tess.sphere_segments)
    if kind == "cylinder":
        return gen_cylinder(tess.round_segments, tess.round_stacks, tess.cap_rings)
    if kind == "cone":
        return gen_cone(tess.round_segments, tess.round_stacks, tess.cap_rings)
    if kind == "torus":
        return gen_torus(tess.torus_major, tess.torus_minor, *tess.torus_radii)
    raise InvalidParameter(f"unknown primitive kind {kind!r}")


# native UV parameterization of each surface group, in generator group order
PRIMITIVE_CHARTS = {
    "cube": ("planar",) * 6,
    "sphere": ("spherical",),
    "cylinder": ("cylindrical", "planar", "planar"),
    "cone": ("conical", "planar"),
    "torus": ("toroidal",),
}
