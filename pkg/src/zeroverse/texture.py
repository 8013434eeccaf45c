"""Procedural textures, per-surface texture assignment, and texture lookup."""
from __future__ import annotations

import colorsys
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .config import TEXTURE_FAMILIES, Config
from .errors import InvalidParameter
from .seeding import hash64, stream

CHART_TAGS = ("planar", "spherical", "cylindrical", "conical", "toroidal")


@dataclass(frozen=True, eq=False)
class Texture:
    id: int
    pixels: np.ndarray  # (R, R, 3) uint8, row 0 is the top of the image (v = 1)
    family: str
    seed: int

    @property
    def res(self) -> int:
        return self.pixels.shape[0]


def _check_res(res: int) -> None:
    if res < 64 or res > 1024 or res & (res - 1):
        raise InvalidParameter(f"texture resolution must be a power of two in [64, 1024], got {res}")


def _palette(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` colors spread in value so neighbouring colors always contrast."""
    values = np.linspace(0.15, 0.95, n)[rng.permutation(n)]
    out = []
    for v in values:
        h, s = rng.random(), rng.uniform(0.3, 1.0)
        out.append(colorsys.hsv_to_rgb(h, s, v))
    return np.asarray(out) * 255.0


def _lerp_colors(t: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """Piecewise-linear color ramp through ``colors`` for t in [0, 1]."""
    t = np.clip(t, 0.0, 1.0) * (len(colors) - 1)
    i = np.minimum(t.astype(int), len(colors) - 2)
    f = (t - i)[..., None]
    return colors[i] * (1 - f) + colors[i + 1] * f


def _gradient_noise(rng: np.random.Generator, res: int, period: int) -> np.ndarray:
    """Periodic Perlin-style gradient noise with ``period`` lattice cells across the image."""
    angles = rng.uniform(0, 2 * np.pi, (period, period))
    gx, gy = np.cos(angles), np.sin(angles)
    coord = (np.arange(res) + 0.5) * period / res
    x, y = np.meshgrid(coord, coord, indexing="xy")
    x0, y0 = np.floor(x).astype(int), np.floor(y).astype(int)
    fx, fy = x - x0, y - y0

    def corner(dx, dy):
        ix, iy = (x0 + dx) % period, (y0 + dy) % period
        return gx[iy, ix] * (fx - dx) + gy[iy, ix] * (fy - dy)

    fade = lambda t: t * t * t * (t * (t * 6 - 15) + 10)  # noqa: E731
    u, v = fade(fx), fade(fy)
    top = corner(0, 0) * (1 - u) + corner(1, 0) * u
    bottom = corner(0, 1) * (1 - u) + corner(1, 1) * u
    return top * (1 - v) + bottom * v


def _checker(rng, res, cells=None, colors=None):
    cells = int(rng.integers(2, 17)) if cells is None else int(cells)
    colors = _palette(rng, 2) if colors is None else np.asarray(colors, dtype=float)
    idx = np.arange(res) * cells // res
    parity = (idx[:, None] + idx[None, :]) % 2
    return colors[parity]


def _value_noise(rng, res, octaves=4):
    base = int(rng.integers(2, 9))
    total = np.zeros((res, res))
    for o in range(octaves):
        total += _gradient_noise(rng, res, base * 2**o) * 0.5**o
    lo, hi = total.min(), total.max()
    t = (total - lo) / (hi - lo) if hi > lo else np.zeros_like(total)
    return _lerp_colors(t, _palette(rng, 3))


def _gradient(rng, res):
    kx, ky = 0, 0
    while kx == 0 and ky == 0:
        kx, ky = rng.integers(-4, 5, 2)
    phase = rng.uniform(0, 2 * np.pi)
    c = (np.arange(res) + 0.5) / res
    x, y = np.meshgrid(c, c, indexing="xy")
    t = 0.5 + 0.5 * np.sin(2 * np.pi * (kx * x + ky * y) + phase)
    return _lerp_colors(t, _palette(rng, 3))


def _voronoi(rng, res):
    n = int(rng.integers(8, 65))
    sites = rng.uniform(0, 1, (n, 2))
    colors = _palette(rng, n)
    c = (np.arange(res) + 0.5) / res
    x, y = np.meshgrid(c, c, indexing="xy")
    tree = cKDTree(sites, boxsize=1.0)  # periodic distance
    d, idx = tree.query(np.stack([x.ravel(), y.ravel()], axis=1), k=2)
    label = idx[:, 0].reshape(res, res)
    edge = np.clip((d[:, 1] - d[:, 0]).reshape(res, res) * res / 3.0, 0.0, 1.0)[..., None]
    return colors[label] * (0.35 + 0.65 * edge)


def gen_texture(seed: int, res: int = 256, family: str = "value-noise", **params) -> Texture:
    """Deterministic RGB texture from ``(seed, family, res)``.

    ``params`` pins otherwise random choices (``cells``/``colors`` for checker).
    """
    _check_res(res)
    rng = stream(seed, f"texture/{family}")
    if family == "checker":
        img = _checker(rng, res, **params)
    elif family == "value-noise":
        img = _value_noise(rng, res, **params)
    elif family == "gradient":
        img = _gradient(rng, res)
    elif family == "voronoi":
        img = _voronoi(rng, res)
    else:
        raise InvalidParameter(f"unknown texture family {family!r}")
    pixels = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return Texture(id=-1, pixels=pixels, family=family, seed=int(seed))


def sample_texture(tex: Texture, u, v) -> np.ndarray:
    """Bilinear lookup with wrap addressing; returns float RGB in [0, 255], shape (..., 3).

    Texel ``(i, j)`` (column, row) sits at ``u = i / R``, ``v = 1 - j / R``.
    """
    img = tex.pixels
    r = img.shape[0]
    x = np.asarray(u, dtype=float) * r
    y = (1.0 - np.asarray(v, dtype=float)) * r
    x0, y0 = np.floor(x), np.floor(y)
    fx, fy = (x - x0)[..., None], (y - y0)[..., None]
    x0 = x0.astype(np.int64) % r
    y0 = y0.astype(np.int64) % r
    x1, y1 = (x0 + 1) % r, (y0 + 1) % r
    img = img.astype(np.float64)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bottom * fy


class TextureSource:
    """Maps texture ids to textures: procedural by default, or PNG files from a directory."""

    def __init__(self, cfg: Config = Config()):
        self.res = cfg.texture_res
        _check_res(self.res)
        self.families = tuple(cfg.texture_families)
        self.files = None
        if cfg.texture_dir:
            self.files = sorted(Path(cfg.texture_dir).glob("*.png"))
            if not self.files:
                raise InvalidParameter(f"no PNG textures found in {cfg.texture_dir}")
        self.pool_size = len(self.files) if self.files else cfg.texture_pool_size
        self._get = lru_cache(maxsize=128)(self._load)

    def get(self, tex_id: int) -> Texture:
        return self._get(int(tex_id))

    def _load(self, tex_id: int) -> Texture:
        if self.files is not None:
            from PIL import Image

            with Image.open(self.files[tex_id]) as im:
                im = im.convert("RGB")
                if im.size != (self.res, self.res):
                    im = im.resize((self.res, self.res), Image.BILINEAR)
                pixels = np.asarray(im, dtype=np.uint8).copy()
            return Texture(tex_id, pixels, "file", tex_id)
        seed = hash64(tex_id, "texture-seed")
        family = self.families[hash64(tex_id, "texture-family") % len(self.families)]
        t = gen_texture(seed, self.res, family)
        return Texture(tex_id, t.pixels, family, seed)


def assign_textures(rng: np.random.Generator, obj, pool_size: int = Config().texture_pool_size):
    """Independently draw one texture id per surface group."""
    ids = rng.integers(pool_size, size=obj.mesh.n_groups)
    return obj.replace(textures=tuple(int(i) for i in ids))


def uv_charts(obj) -> dict:
    """Surface group -> parameterization tag."""
    return dict(enumerate(obj.charts))


__all__ = [
    "CHART_TAGS",
    "TEXTURE_FAMILIES",
    "Texture",
    "TextureSource",
    "assign_textures",
    "gen_texture",
    "sample_texture",
    "uv_charts",
]
