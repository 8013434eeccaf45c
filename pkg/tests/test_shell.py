import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroverse.augment import solidify, subdivide, wireframe
from zeroverse.augment.csg import WELD_TOL
from zeroverse.errors import InvalidParameter
from zeroverse.mesh import (
    TriMesh,
    euler_characteristic,
    gen_cube,
    gen_sphere,
    is_closed,
    is_consistently_oriented,
    primitive_mesh,
    signed_volume,
    unique_edges,
)


def unit_square(n=1):
    s = np.linspace(0, 1, n + 1)
    x, y = np.meshgrid(s, s, indexing="ij")
    verts = np.stack([x.ravel(), y.ravel(), np.zeros(x.size)], axis=1)
    tris = []
    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j
            b = a + n + 1
            tris += [[a, b, b + 1], [a, b + 1, a + 1]]
    tris = np.array(tris)
    return TriMesh(verts, tris, verts[tris][:, :, :2], np.zeros(len(tris), int))


@pytest.mark.parametrize("t", [0.01, 0.05, 0.2])
def test_solidified_square_is_a_closed_slab(t):
    out = solidify(unit_square(3), t)
    assert is_closed(out) and is_consistently_oriented(out)
    assert abs(signed_volume(out)) == pytest.approx(t, rel=0.05)


def test_solidify_guards_thickness():
    for t in (0.0, -0.1, WELD_TOL / 2):
        with pytest.raises(InvalidParameter):
            solidify(unit_square(), t)


def test_solidified_closed_mesh_is_a_hollow_shell():
    out = solidify(gen_cube(2), 0.1)
    assert is_closed(out) and is_consistently_oriented(out)
    # outer unit cube minus an inner cube shrunk along vertex normals
    assert 0.0 < signed_volume(out) < 1.0
    assert euler_characteristic(out) == 4


def test_single_triangle_wireframe_has_three_box_beams():
    tri = TriMesh(np.eye(3), [[0, 1, 2]], np.zeros((1, 3, 2)), [0])
    out = wireframe(tri, 0.01, subdiv_level=0)
    assert out.n_triangles == 36
    assert is_closed(out)


def test_wireframe_volume_is_edge_length_times_area():
    cube = gen_cube(1)
    t = 0.01
    edges, _ = unique_edges(cube)
    lengths = np.linalg.norm(cube.vertices[edges[:, 0]] - cube.vertices[edges[:, 1]], axis=1)
    out = wireframe(cube, t, subdiv_level=0)
    assert signed_volume(out) == pytest.approx(lengths.sum() * t * t, rel=0.10)


@pytest.mark.parametrize("mesh", [gen_cube(1), gen_sphere(4, 6), primitive_mesh("torus")])
def test_subdivision_quadruples_triangles_and_keeps_topology(mesh):
    once = subdivide(mesh, 1)
    assert once.n_triangles == 4 * mesh.n_triangles
    assert euler_characteristic(once) == euler_characteristic(mesh)
    assert is_closed(once)
    edges, _ = unique_edges(once)
    assert wireframe(mesh, 0.01, subdiv_level=1).n_triangles == 12 * len(edges)


@given(t=st.floats(0.005, 0.05), level=st.integers(0, 1))
def test_wireframe_output_is_closed(t, level):
    out = wireframe(gen_cube(1), t, level)
    assert is_closed(out) and is_consistently_oriented(out)
    assert out.groups.max() < 6


def test_wireframe_rejects_bad_thickness():
    with pytest.raises(InvalidParameter):
        wireframe(gen_cube(1), 0.0)
    with pytest.raises(InvalidParameter):
        subdivide(gen_cube(1), -1)
