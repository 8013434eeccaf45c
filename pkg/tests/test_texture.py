import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from PIL import Image

from zeroverse.config import TEXTURE_FAMILIES, Config
from zeroverse.errors import InvalidParameter
from zeroverse.sampler import compose
from zeroverse.seeding import stream
from zeroverse.texture import Texture, TextureSource, assign_textures, gen_texture, sample_texture, uv_charts


@pytest.mark.parametrize("family", TEXTURE_FAMILIES)
def test_textures_are_deterministic(family):
    a = gen_texture(17, 64, family)
    b = gen_texture(17, 64, family)
    assert np.array_equal(a.pixels, b.pixels)
    assert a.pixels.shape == (64, 64, 3) and a.pixels.dtype == np.uint8
    assert not np.array_equal(a.pixels, gen_texture(18, 64, family).pixels)


def test_two_cell_black_white_checker():
    t = gen_texture(0, 128, "checker", cells=2, colors=[[0, 0, 0], [255, 255, 255]])
    assert not np.array_equal(t.pixels[0, 0], t.pixels[0, 64])


def test_value_noise_is_not_flat():
    for seed in range(10):
        px = gen_texture(seed, 128, "value-noise").pixels.astype(float)
        lum = px @ [0.299, 0.587, 0.114]
        assert lum.std() > 5


def test_resolution_must_be_power_of_two_in_range():
    for res in (32, 100, 2048):
        with pytest.raises(InvalidParameter):
            gen_texture(0, res)
    with pytest.raises(InvalidParameter):
        gen_texture(0, 64, "plaid")


def test_constant_texture_samples_constant(rng):
    tex = Texture(0, np.full((64, 64, 3), 77, np.uint8), "flat", 0)
    out = sample_texture(tex, rng.uniform(-3, 3, 500), rng.uniform(-3, 3, 500))
    assert np.all(out == 77)


def test_texel_center_lookup_and_wrap(rng):
    px = rng.integers(0, 256, (64, 64, 3)).astype(np.uint8)
    tex = Texture(0, px, "random", 0)
    # texel (column i, row j) sits at u = i / R, v = 1 - j / R
    for i, j in [(0, 0), (5, 9), (63, 1)]:
        u, v = i / 64, 1 - j / 64
        assert np.allclose(sample_texture(tex, u, v), px[j % 64, i])
    u, v = rng.random(100), rng.random(100)
    assert np.allclose(sample_texture(tex, u + 1, v), sample_texture(tex, u, v))
    assert np.allclose(sample_texture(tex, 1.25, 0.5), sample_texture(tex, 0.25, 0.5))


@given(u=st.floats(-5, 5), v=st.floats(-5, 5))
def test_bilinear_lookup_stays_within_texel_range(u, v):
    px = np.random.default_rng(0).integers(0, 256, (64, 64, 3)).astype(np.uint8)
    out = sample_texture(Texture(0, px, "random", 0), u, v)
    assert np.all(out >= px.min(axis=(0, 1)) - 1e-9) and np.all(out <= px.max(axis=(0, 1)) + 1e-9)


def test_one_independent_texture_per_surface():
    cfg = Config(count_weights=(1,), primitive_pool=("cube",))
    obj = compose(np.random.default_rng(0), cfg)
    out = assign_textures(np.random.default_rng(1), obj)
    assert len(out.textures) == 6
    assert len(uv_charts(out)) == 6 and set(uv_charts(out).values()) == {"planar"}
    again = assign_textures(np.random.default_rng(1), obj)
    assert out.textures == again.textures


def test_texture_ids_of_two_surfaces_are_uncorrelated():
    cfg = Config(count_weights=(1,), primitive_pool=("cone",))
    obj = compose(np.random.default_rng(0), cfg)
    rng = np.random.default_rng(2)
    ids = np.array([assign_textures(rng, obj).textures for _ in range(10_000)])
    assert abs(np.corrcoef(ids[:, 0], ids[:, 1])[0, 1]) < 0.05


def test_texture_source_is_procedural_or_reads_a_directory(tmp_path):
    src = TextureSource(Config(texture_res=64))
    a = src.get(12)
    assert a.pixels.shape == (64, 64, 3) and a.family in TEXTURE_FAMILIES
    assert np.array_equal(a.pixels, TextureSource(Config(texture_res=64)).get(12).pixels)
    Image.new("RGB", (32, 16), (10, 200, 30)).save(tmp_path / "green.png")
    files = TextureSource(Config(texture_res=64, texture_dir=str(tmp_path)))
    assert files.pool_size == 1
    t = files.get(0)
    assert t.pixels.shape == (64, 64, 3) and np.all(t.pixels == [10, 200, 30])
    with pytest.raises(InvalidParameter):
        TextureSource(Config(texture_dir=str(tmp_path / "missing")))


def test_composed_uvs_are_in_unit_square():
    for seed in range(20):
        obj = compose(stream(seed, "compose"))
        assert obj.mesh.uvs.min() >= 0 and obj.mesh.uvs.max() <= 1
