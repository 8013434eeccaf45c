"""Cameras, rasterization and image metrics."""
from .camera import RIG_ANGLES, Camera, look_at, orbit_position, sample_camera, structural_rig
from .metrics import IDENTICAL, format_psnr, psnr
from .raster import Fragments, RenderOptions, RenderOut, rasterize, render

__all__ = [
    "IDENTICAL",
    "RIG_ANGLES",
    "Camera",
    "Fragments",
    "RenderOptions",
    "RenderOut",
    "format_psnr",
    "look_at",
    "orbit_position",
    "psnr",
    "rasterize",
    "render",
    "sample_camera",
    "structural_rig",
]
