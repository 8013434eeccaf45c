"""Shape augmentations on a single cube.

Shows the three geometric operators one at a time: a height field on one
face, a boolean difference with a solidified cutter, and a wireframe.
Each result is written as OBJ so it can be opened in any mesh viewer.

    python demos/02_augmentations.py --out /tmp/demo02
"""
import argparse
from pathlib import Path

import numpy as np

from zeroverse.augment import boolean_difference, displace_surface, make_heightfield, solidify, wireframe
from zeroverse.mesh import Transform, apply_transform, euler_characteristic, gen_cube, gen_sphere, signed_volume
from zeroverse.pipeline.objio import obj_text


def describe(name, mesh):
    print(f"{name:22s} {mesh.n_triangles:6d} triangles  chi {euler_characteristic(mesh):3d}  volume {signed_volume(mesh):.4f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="demo_out/02")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    cube = gen_cube(16)
    describe("cube", cube)

    # height field on the +x face; amplitude 0.15 of the face size
    hf = make_heightfield(rng, 8, 8, face_size=1.0)
    bumpy = displace_surface(cube, 0, hf)
    describe("height field on face 0", bumpy)

    # exact oracle: a unit cube minus a corner cube leaves 7/8
    corner = apply_transform(gen_cube(1), Transform(translation=(0.5, 0.5, 0.5)))
    describe("cube minus corner", boolean_difference(gen_cube(1), corner))

    # the augmentation proper: the cutter is a thin shell, so the hole has walls
    shell = solidify(apply_transform(gen_sphere(12, 24), Transform((0.4, 0.4, 0.4), translation=(0.5, 0.3, 0.2))), 0.05)
    cut = boolean_difference(bumpy, shell, seed=args.seed)
    describe("cut by sphere shell", cut)

    wire = wireframe(gen_cube(2), 0.03)
    describe("wireframe", wire)

    for name, mesh in (("bumpy", bumpy), ("cut", cut), ("wire", wire)):
        (out / f"{name}.obj").write_text(obj_text(mesh))
    print(f"wrote OBJ files to {out}")


if __name__ == "__main__":
    main()
