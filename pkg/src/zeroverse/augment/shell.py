"""Solidify, midpoint subdivision and wireframe conversion."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter
from ..mesh import TriMesh, face_normals, gen_cube, vertex_normals
from .csg import WELD_TOL


def solidify(mesh: TriMesh, thickness: float) -> TriMesh:
    """Give a surface thickness by adding an inward offset copy.

    The copy is moved against the vertex normals and reversed.  Boundary
    edges, if any, are closed with rim quads, so an open manifold becomes
    closed; a closed input gains an inner shell.

    Raises:
        InvalidParameter: ``thickness`` is not above the weld tolerance.
    """
    if not thickness > WELD_TOL:
        raise InvalidParameter(f"solidify thickness must exceed {WELD_TOL}, got {thickness}")
    if mesh.n_triangles == 0:
        return mesh
    nv = mesh.n_vertices
    inner_v = mesh.vertices - thickness * vertex_normals(mesh)
    inner_t = mesh.triangles[:, ::-1] + nv
    inner_uv = mesh.uvs[:, ::-1]

    # rims on boundary edges, oriented against the outer edge a->b
    directed = mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    key = np.sort(directed, axis=1)
    _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    boundary = counts[inverse.ravel()] == 1
    tris, uvs, groups = [mesh.triangles, inner_t], [mesh.uvs, inner_uv], [mesh.groups, mesh.groups]
    if boundary.any():
        ab = directed[boundary]
        face = np.nonzero(boundary)[0] // 3
        slot = np.nonzero(boundary)[0] % 3
        uv_a = mesh.uvs[face, slot]
        uv_b = mesh.uvs[face, (slot + 1) % 3]
        a, b = ab[:, 0], ab[:, 1]
        rim = np.concatenate([np.stack([b, a, a + nv], 1), np.stack([b, a + nv, b + nv], 1)])
        rim_uv = np.concatenate([np.stack([uv_b, uv_a, uv_a], 1), np.stack([uv_b, uv_a, uv_b], 1)])
        tris.append(rim)
        uvs.append(rim_uv)
        groups.append(np.concatenate([mesh.groups[face], mesh.groups[face]]))
    return TriMesh(
        np.concatenate([mesh.vertices, inner_v]),
        np.concatenate(tris),
        np.concatenate(uvs),
        np.concatenate(groups),
    )


def subdivide(mesh: TriMesh, levels: int = 1) -> TriMesh:
    """Split every triangle into four at its edge midpoints, ``levels`` times."""
    if levels < 0:
        raise InvalidParameter("levels must be non-negative")
    for _ in range(levels):
        if mesh.n_triangles == 0:
            break
        t = mesh.triangles
        edges = np.sort(t[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
        mid = (mesh.n_vertices + inverse.ravel()).reshape(-1, 3)  # midpoints of edges 01, 12, 20
        verts = np.concatenate([mesh.vertices, 0.5 * (mesh.vertices[uniq[:, 0]] + mesh.vertices[uniq[:, 1]])])
        v0, v1, v2 = t[:, 0], t[:, 1], t[:, 2]
        m01, m12, m20 = mid[:, 0], mid[:, 1], mid[:, 2]
        new_t = np.concatenate([
            np.stack([v0, m01, m20], 1),
            np.stack([m01, v1, m12], 1),
            np.stack([m20, m12, v2], 1),
            np.stack([m01, m12, m20], 1),
        ])
        uv = mesh.uvs
        u0, u1, u2 = uv[:, 0], uv[:, 1], uv[:, 2]
        h01, h12, h20 = 0.5 * (u0 + u1), 0.5 * (u1 + u2), 0.5 * (u2 + u0)
        new_uv = np.concatenate([
            np.stack([u0, h01, h20], 1),
            np.stack([h01, u1, h12], 1),
            np.stack([h20, h12, u2], 1),
            np.stack([h01, h12, h20], 1),
        ])
        mesh = TriMesh(verts, new_t, new_uv, np.tile(mesh.groups, 4))
    return mesh


_BOX = gen_cube(1)  # 8 corners in [-0.5, 0.5]^3, outward triangles


def wireframe(mesh: TriMesh, thickness: float, subdiv_level: int = 1) -> TriMesh:
    """Replace every edge of the (subdivided) mesh by a square beam.

    Each beam is a closed box of side ``thickness`` running along its edge
    and overhanging both ends by ``thickness / 2`` so that beams meeting at a
    vertex overlap.  Beams take the surface group of an adjacent face and the
    UVs of the edge endpoints.
    """
    if not thickness > 0:
        raise InvalidParameter("wire thickness must be positive")
    mesh = subdivide(mesh, subdiv_level)
    if mesh.n_triangles == 0:
        return mesh
    t = mesh.triangles
    directed = t[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    key = np.sort(directed, axis=1)
    edges, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    n_edges = len(edges)
    face = first // 3
    slot = first % 3

    # beam frame: along the edge, the mean adjacent face normal, and their cross product
    fn = np.repeat(face_normals(mesh), 3, axis=0)
    normal = np.zeros((n_edges, 3))
    np.add.at(normal, inverse, fn)
    a_pos, b_pos = mesh.vertices[directed[first, 0]], mesh.vertices[directed[first, 1]]
    axis = b_pos - a_pos
    length = np.linalg.norm(axis, axis=1)
    d = axis / np.where(length > 0, length, 1.0)[:, None]
    normal -= np.einsum("ij,ij->i", normal, d)[:, None] * d
    nl = np.linalg.norm(normal, axis=1)
    fallback = np.cross(d, np.where(np.abs(d[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]]))
    normal = np.where((nl > 1e-12)[:, None], normal / np.where(nl > 0, nl, 1.0)[:, None], fallback / np.linalg.norm(fallback, axis=1, keepdims=True))
    w = np.cross(d, normal)

    box = _BOX.vertices  # (8, 3): x along the edge, y along the normal, z along w
    mid = 0.5 * (a_pos + b_pos)
    span = (length + thickness)[:, None, None]
    verts = (
        mid[:, None, :]
        + box[None, :, :1] * span * d[:, None, :]
        + box[None, :, 1:2] * thickness * normal[:, None, :]
        + box[None, :, 2:3] * thickness * w[:, None, :]
    ).reshape(-1, 3)
    tris = (_BOX.triangles[None] + 8 * np.arange(n_edges)[:, None, None]).reshape(-1, 3)
    uv_a = mesh.uvs[face, slot]
    uv_b = mesh.uvs[face, (slot + 1) % 3]
    at_b = box[:, 0] > 0  # per box corner
    corner_b = at_b[_BOX.triangles]  # (12, 3)
    uvs = np.where(corner_b[None, :, :, None], uv_b[:, None, None, :], uv_a[:, None, None, :]).reshape(-1, 3, 2)
    groups = np.repeat(mesh.groups[face], len(_BOX.triangles))
    return TriMesh(verts, tris, uvs, groups)
