"""Shape augmentations: height fields, boolean difference with solidify, wireframe."""
from .csg import boolean_difference, winding_numbers
from .heightfield import HeightField, displace_surface, displace_surfaces, eval_bicubic, face_size, make_heightfield, surface_vertices
from .policy import (
    KINDS,
    AugPlan,
    AugRecord,
    apply_augmentation,
    augment_object,
    bounding_radius,
    choose_augmentation,
    plan_augmentation,
)
from .shell import solidify, subdivide, wireframe

__all__ = [
    "KINDS",
    "AugPlan",
    "AugRecord",
    "HeightField",
    "apply_augmentation",
    "augment_object",
    "boolean_difference",
    "bounding_radius",
    "choose_augmentation",
    "displace_surface",
    "displace_surfaces",
    "eval_bicubic",
    "face_size",
    "make_heightfield",
    "plan_augmentation",
    "solidify",
    "subdivide",
    "surface_vertices",
    "winding_numbers",
    "wireframe",
]
