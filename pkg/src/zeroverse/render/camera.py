"""Pinhole cameras: look-at construction, structural rigs, random sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter

# (elevation, azimuth) in degrees
RIG_ANGLES = {
    8: ((0, 0), (0, 90), (0, 180), (0, 270), (40, 45), (40, 135), (40, 225), (40, 315)),
    4: ((20, 0), (20, 90), (20, 180), (20, 270)),
}


@dataclass(frozen=True, eq=False)
class Camera:
    """Camera-to-world rigid transform; the camera looks down its local -z with +y up."""

    c2w: np.ndarray  # (4, 4)
    fov_y_deg: float = 60.0
    width: int = 512
    height: int = 512

    def __post_init__(self):
        m = np.asarray(self.c2w, dtype=np.float64)
        if m.shape != (4, 4):
            raise InvalidParameter("c2w must be 4x4")
        r = m[:3, :3]
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-6) or abs(np.linalg.det(r) - 1) > 1e-6:
            raise InvalidParameter("c2w rotation block must be orthonormal and right-handed")
        if not np.allclose(m[3], [0, 0, 0, 1]):
            raise InvalidParameter("c2w bottom row must be (0, 0, 0, 1)")
        if not 0 < self.fov_y_deg < 120:
            raise InvalidParameter(f"fov_y must be in (0, 120) degrees, got {self.fov_y_deg}")
        if self.width <= 0 or self.height <= 0:
            raise InvalidParameter("image size must be positive")
        object.__setattr__(self, "c2w", m)

    @property
    def position(self) -> np.ndarray:
        return self.c2w[:3, 3]

    @property
    def focal(self) -> float:
        """Focal length in pixels."""
        return 0.5 * self.height / math.tan(math.radians(self.fov_y_deg) / 2)

    def w2c(self) -> np.ndarray:
        r, t = self.c2w[:3, :3], self.c2w[:3, 3]
        out = np.eye(4)
        out[:3, :3] = r.T
        out[:3, 3] = -r.T @ t
        return out

    def to_json(self) -> dict:
        return {"c2w": [float(x) for x in self.c2w.ravel()], "width": self.width, "height": self.height}

    def with_size(self, width: int, height: int) -> "Camera":
        return Camera(self.c2w, self.fov_y_deg, width, height)


def look_at(position, target=(0.0, 0.0, 0.0), up=(0.0, 1.0, 0.0)) -> np.ndarray:
    """Camera-to-world matrix for a camera at ``position`` looking at ``target``."""
    position = np.asarray(position, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - position
    n = np.linalg.norm(forward)
    if n == 0:
        raise InvalidParameter("camera position coincides with the target")
    forward /= n
    right = np.cross(forward, up)
    rn = np.linalg.norm(right)
    if rn < 1e-9:
        raise InvalidParameter("view direction is parallel to the up vector")
    right /= rn
    true_up = np.cross(right, forward)
    m = np.eye(4)
    m[:3, 0], m[:3, 1], m[:3, 2], m[:3, 3] = right, true_up, -forward, position
    return m


def orbit_position(elevation_deg: float, azimuth_deg: float, distance: float) -> np.ndarray:
    """Azimuth 0 sits on +z, 90 on +x; elevation lifts toward +y."""
    e, a = math.radians(elevation_deg), math.radians(azimuth_deg)
    return distance * np.array([math.cos(e) * math.sin(a), math.sin(e), math.cos(e) * math.cos(a)])


def structural_rig(n: int, distance: float = 2.5, fov_y_deg: float = 60.0, width: int = 512, height: int | None = None) -> list:
    """Fixed evaluation views: 8 (two elevation rings) or 4 (one ring at 20 degrees)."""
    if n not in RIG_ANGLES:
        raise InvalidParameter(f"structural rig supports 4 or 8 views, got {n}")
    if not distance > 0:
        raise InvalidParameter("distance must be positive")
    height = width if height is None else height
    return [Camera(look_at(orbit_position(e, a, distance)), fov_y_deg, width, height) for e, a in RIG_ANGLES[n]]


def sample_camera(rng: np.random.Generator, distance_range=(2.0, 3.0), fov_y_deg: float = 60.0, width: int = 512, height: int | None = None) -> Camera:
    """Uniform direction on the sphere, uniform distance, looking at the origin."""
    while True:
        d = rng.normal(size=3)
        n = np.linalg.norm(d)
        if n > 1e-12:
            d /= n
            if abs(d[1]) <= 0.999:  # look-at with +y up is undefined at the poles
                break
    distance = rng.uniform(*distance_range)
    height = width if height is None else height
    return Camera(look_at(distance * d), fov_y_deg, width, height)
