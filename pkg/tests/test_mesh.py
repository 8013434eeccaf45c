import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroverse.errors import InvalidParameter
from zeroverse.mesh import (
    Transform,
    TriMesh,
    apply_transform,
    bounds,
    compact,
    connected_components,
    euler_characteristic,
    gen_cone,
    gen_cube,
    gen_cylinder,
    gen_sphere,
    gen_torus,
    is_closed,
    is_consistently_oriented,
    merge,
    normalize_to_sphere,
    primitive_mesh,
    signed_volume,
    triangle_areas,
    unique_edges,
)
from zeroverse.sampler import random_quaternion

ANALYTIC_VOLUME = {
    "cube": 1.0,
    "sphere": 4 * math.pi / 3,
    "cylinder": math.pi,
    "cone": math.pi / 3,
    "torus": 2 * math.pi**2 * 1.0 * 0.35**2,
}

# three tessellation settings per generator
SETTINGS = {
    "cube": [lambda: gen_cube(1), lambda: gen_cube(3), lambda: gen_cube(16)],
    "sphere": [lambda: gen_sphere(2, 3), lambda: gen_sphere(5, 7), lambda: gen_sphere(32, 64)],
    "cylinder": [lambda: gen_cylinder(3), lambda: gen_cylinder(17, 4, 3), lambda: gen_cylinder(64, 16, 8)],
    "cone": [lambda: gen_cone(3), lambda: gen_cone(17, 4, 3), lambda: gen_cone(64, 16, 8)],
    "torus": [lambda: gen_torus(3, 3), lambda: gen_torus(11, 5), lambda: gen_torus(48, 24)],
}


def edge_degrees(m):
    _, counts = unique_edges(m)
    return counts


@pytest.mark.parametrize("kind", list(SETTINGS))
@pytest.mark.parametrize("setting", range(3))
def test_generators_are_closed_oriented_with_expected_euler_characteristic(kind, setting):
    m = SETTINGS[kind][setting]()
    assert np.all(edge_degrees(m) == 2)
    assert is_consistently_oriented(m)
    assert euler_characteristic(m) == (0 if kind == "torus" else 2)
    assert triangle_areas(m).min() > 0
    assert m.uvs.min() >= 0 and m.uvs.max() <= 1
    assert set(np.unique(m.groups)) == set(range(m.n_groups))
    assert m.triangles.max() < m.n_vertices


def test_cube_counts():
    c1 = gen_cube(1)
    assert c1.n_vertices == 8 and c1.n_triangles == 12
    assert gen_cube(2).n_triangles == 48
    assert gen_cube(5).n_triangles == 12 * 25
    assert c1.n_groups == 6


def test_small_generator_counts():
    assert gen_sphere(3, 4).n_triangles == 16
    assert gen_cylinder(3).n_triangles == 12
    assert gen_torus(3, 3).n_triangles == 18
    assert gen_torus(7, 5).n_triangles == 2 * 7 * 5
    assert gen_cylinder(8).n_groups == 3
    assert gen_cone(8).n_groups == 2


@pytest.mark.parametrize(
    "call",
    [
        lambda: gen_cube(0),
        lambda: gen_sphere(1, 8),
        lambda: gen_sphere(4, 2),
        lambda: gen_cylinder(2),
        lambda: gen_cone(2),
        lambda: gen_torus(2, 3),
        lambda: gen_torus(8, 8, 0.5, 0.5),
        lambda: merge([]),
        lambda: normalize_to_sphere(gen_cube(1), 0.0),
    ],
)
def test_invalid_parameters(call):
    with pytest.raises(InvalidParameter):
        call()


@pytest.mark.parametrize(
    "kind, mesh",
    [
        ("cube", gen_cube(4)),
        ("sphere", gen_sphere(32, 64)),
        ("cylinder", gen_cylinder(128)),
        ("cone", gen_cone(128)),
        ("torus", gen_torus(128, 128)),
    ],
)
def test_fine_volume_within_two_percent_of_analytic(kind, mesh):
    assert signed_volume(mesh) == pytest.approx(ANALYTIC_VOLUME[kind], rel=0.02)


@pytest.mark.parametrize(
    "kind, coarse, fine",
    [
        ("sphere", gen_sphere(6, 12), gen_sphere(24, 48)),
        ("cylinder", gen_cylinder(8), gen_cylinder(64)),
        ("cone", gen_cone(8), gen_cone(64)),
        ("torus", gen_torus(8, 6), gen_torus(48, 24)),
    ],
)
def test_volume_converges_with_tessellation(kind, coarse, fine):
    exact = ANALYTIC_VOLUME[kind]
    assert abs(signed_volume(fine) - exact) < abs(signed_volume(coarse) - exact)


def test_unit_cube_volume_and_transforms():
    c = gen_cube(1)
    assert signed_volume(c) == pytest.approx(1.0, abs=1e-9)
    assert signed_volume(apply_transform(c, Transform(scale=(2, 1, 1)))) == pytest.approx(2.0, abs=1e-9)
    assert signed_volume(apply_transform(c, Transform(translation=(5, 5, 5)))) == pytest.approx(1.0, abs=1e-9)
    same = apply_transform(c, Transform())
    assert np.array_equal(same.vertices, c.vertices)


@given(
    scale=st.tuples(*[st.floats(0.1, 3.0)] * 3),
    seed=st.integers(0, 2**32 - 1),
    translation=st.tuples(*[st.floats(-5, 5)] * 3),
)
def test_transform_scales_volume_by_scale_product(scale, seed, translation):
    q = random_quaternion(np.random.default_rng(seed))
    m = primitive_mesh("cylinder")
    moved = apply_transform(m, Transform(scale, q, translation))
    assert signed_volume(moved) == pytest.approx(signed_volume(m) * np.prod(scale), rel=1e-9)
    assert euler_characteristic(moved) == 2


def test_euler_characteristic_is_additive_under_merge():
    c = gen_cube(2)
    far = apply_transform(gen_cube(2), Transform(translation=(3, 0, 0)))
    assert euler_characteristic(merge([c, far])) == 4
    t = gen_torus(12, 6)
    both = merge([c, t])
    assert euler_characteristic(both) == 2
    assert signed_volume(both) == pytest.approx(signed_volume(c) + signed_volume(t), rel=1e-12)
    assert both.n_groups == c.n_groups + t.n_groups
    assert len(np.unique(connected_components(merge([c, far])))) == 2


def test_merge_offsets_group_ids():
    m = merge([gen_cube(1), gen_cylinder(5), gen_sphere(3, 5)])
    assert m.n_groups == 6 + 3 + 1
    assert set(np.unique(m.groups)) == set(range(10))


@given(seed=st.integers(0, 2**32 - 1), radius=st.floats(0.1, 5.0))
def test_normalize_to_sphere_puts_farthest_vertex_on_radius(seed, radius):
    rng = np.random.default_rng(seed)
    t = Transform(tuple(rng.uniform(0.2, 2, 3)), random_quaternion(rng), tuple(rng.uniform(-3, 3, 3)))
    m = normalize_to_sphere(apply_transform(primitive_mesh("torus"), t), radius)
    assert np.linalg.norm(m.vertices, axis=1).max() == pytest.approx(radius, abs=1e-6)
    assert np.allclose(bounds(m).center, 0, atol=1e-9)


def test_compact_drops_unused_vertices_and_renumbers_groups():
    c = gen_cube(1)
    extra = TriMesh(np.vstack([c.vertices, [[9, 9, 9]]]), c.triangles, c.uvs, c.groups + 3)
    out = compact(extra)
    assert out.n_vertices == 8
    assert out.groups.min() == 0 and out.n_groups == 6


def test_closedness_check_detects_holes():
    c = gen_cube(2)
    opened = TriMesh(c.vertices, c.triangles[1:], c.uvs[1:], c.groups[1:])
    assert is_closed(c) and not is_closed(opened)
    assert not is_consistently_oriented(TriMesh(c.vertices, np.vstack([c.triangles[:1, ::-1], c.triangles[1:]]), c.uvs, c.groups))


def test_mesh_rejects_bad_indices():
    with pytest.raises(InvalidParameter):
        TriMesh(np.zeros((3, 3)), [[0, 1, 3]], np.zeros((1, 3, 2)), [0])
    with pytest.raises(InvalidParameter):
        TriMesh(np.zeros((3, 3)), [[0, 1, 2]], np.zeros((2, 3, 2)), [0])
