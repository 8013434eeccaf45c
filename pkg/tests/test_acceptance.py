"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criterion 1 checks the decision statistics of 35,000 objects through their
plans (the exact draws generation makes); set ZEROVERSE_FULL_ACCEPTANCE=1 to
generate and render all 35,000 objects instead.
"""
import math
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import ndimage

from zeroverse.augment import HeightField, KINDS, boolean_difference, displace_surface, eval_bicubic, make_heightfield
from zeroverse.config import Config
from zeroverse.mesh import (
    Transform,
    apply_transform,
    euler_characteristic,
    gen_cone,
    gen_cube,
    gen_cylinder,
    gen_sphere,
    gen_torus,
    signed_volume,
)
from zeroverse.pipeline import (
    derive_job,
    format_report,
    load_manifest,
    plan_row,
    read_png,
    run_shard,
    stats,
    synthesize,
    tree_digest,
)
from zeroverse.render import RenderOptions, psnr, render, sample_camera, structural_rig
from zeroverse.seeding import stream

FULL = os.environ.get("ZEROVERSE_FULL_ACCEPTANCE") == "1"
COUNT_TARGET = np.array([5, 5, 5, 5, 5, 4, 3, 2, 1]) / 35


@pytest.fixture
def verdict(capsys):
    def report(n, title, checks, details=""):
        failed = [k for k, ok in checks.items() if not ok]
        line = f"criterion {n} ({title}): {'PASS' if not failed else 'FAIL'}"
        if details:
            line += f" | {details}"
        if failed:
            line += f" | failed: {', '.join(failed)}"
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return report


def digests(out):
    out = Path(out)
    return {p.name: tree_digest(p) for p in out.iterdir() if p.is_dir() and (p / "done.marker").exists()}


@pytest.fixture(scope="module")
def render_run(tmp_path_factory):
    """1,000 objects at 256 pixels, one random view each at distance 2."""
    cfg = Config(count=1000, seed=606, resolution=256, views=1, distance_range=(2.0, 2.0))
    out = tmp_path_factory.mktemp("render_run")
    t0 = time.perf_counter()
    run_shard(cfg, out)
    return cfg, out, time.perf_counter() - t0


def test_criterion_1_distribution_fidelity(verdict, tmp_path, render_run):
    n = 35_000
    cfg = Config(count=n, seed=1, resolution=256, views=4)
    if FULL:
        run_shard(cfg, tmp_path)
        rows = load_manifest(tmp_path)
        assert len(rows) == n
    else:
        rows = [plan_row(derive_job(cfg.seed, i, cfg), cfg) for i in range(n)]
    counts = np.bincount([r["primitive_count"] for r in rows], minlength=10)[1:] / n
    kinds = [r["aug_kind"] if FULL else r["planned_aug"] for r in rows]
    aug = {k: kinds.count(k) / n for k in KINDS}
    both = sum(1 for k in kinds if k not in KINDS)  # every object carries exactly one kind
    hf_rate = sum(r["n_heightfield"] for r in rows) / sum(r["n_surfaces"] for r in rows)
    # plans must predict what generation actually did, checked on 1,000 generated objects
    run_cfg, run_out, _ = render_run
    generated = load_manifest(run_out)
    fields = ("uuid", "planned_aug", "primitive_count", "n_surfaces", "n_heightfield")
    predicted = sum(
        all(plan_row(derive_job(run_cfg.seed, r["index"], run_cfg), run_cfg)[k] == r[k] for k in fields)
        for r in generated
    )
    realized = sum(r["aug_kind"] == r["planned_aug"] or r["status"] == "failed-boolean-fallback" for r in generated)
    n_fallback = sum(r["status"] == "failed-boolean-fallback" for r in generated)
    fallback = n_fallback / max(1, sum(r["planned_aug"] == "boolean" for r in generated))  # per planned boolean
    realized_boolean = aug["boolean"] if FULL else aug["boolean"] * (1 - fallback)
    count_err = float(np.abs(counts - COUNT_TARGET).max())
    checks = {
        "primitive counts within 0.005": count_err <= 0.005,
        "boolean 0.4": abs(aug["boolean"] - 0.4) <= 0.015,
        "wireframe 0.2": abs(aug["wireframe"] - 0.2) <= 0.015,
        "none 0.4": abs(aug["none"] - 0.4) <= 0.015,
        "no boolean and wireframe together": both == 0,
        "height-field rate 0.5": abs(hf_rate - 0.5) <= 0.02,
        "plans match 1,000 generated objects": predicted == len(generated) == 1000,
        "realized kind is the planned one or a boolean fallback": realized == len(generated),
        "boolean rate still within tolerance after fallbacks": abs(realized_boolean - 0.4) <= 0.015,
    }
    mode = "generated" if FULL else "planned"
    details = (
        f"{n} objects {mode}; max count-bin error {count_err:.4f}; aug "
        f"{aug['boolean']:.3f}/{aug['wireframe']:.3f}/{aug['none']:.3f}; height-field rate {hf_rate:.4f}; "
        f"plans predict {predicted}/{len(generated)} generated rows, {100 * fallback:.1f}% of booleans fall back"
    )
    verdict(1, "distribution fidelity", checks, details)


def box(lo, hi):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    return apply_transform(gen_cube(1), Transform(tuple(hi - lo), translation=tuple((lo + hi) / 2)))


def test_criterion_2_geometry_oracles(verdict):
    settings = {
        "cube": ([gen_cube(t) for t in (1, 4, 16)], 2),
        "sphere": ([gen_sphere(r, s) for r, s in ((2, 3), (8, 16), (32, 64))], 2),
        "cylinder": ([gen_cylinder(s) for s in (3, 16)] + [gen_cylinder(64, 16, 8)], 2),
        "cone": ([gen_cone(s) for s in (3, 16)] + [gen_cone(64, 16, 8)], 2),
        "torus": ([gen_torus(m, n) for m, n in ((3, 3), (16, 8), (48, 24))], 0),
    }
    chi_ok = all(euler_characteristic(m) == chi for meshes, chi in settings.values() for m in meshes)
    analytic = {
        "cube": (gen_cube(4), 1.0),
        "sphere": (gen_sphere(32, 64), 4 * math.pi / 3),
        "cylinder": (gen_cylinder(128), math.pi),
        "cone": (gen_cone(128), math.pi / 3),
        "torus": (gen_torus(128, 128), 2 * math.pi**2 * 0.35**2),
    }
    vol_err = max(abs(signed_volume(m) / v - 1) for m, v in analytic.values())
    corner = signed_volume(boolean_difference(box([0, 0, 0], [1, 1, 1]), box([0.5] * 3, [1.5] * 3)))
    rng = np.random.default_rng(7)
    worst = 0.0
    ok_pairs = 0
    for _ in range(100):
        lo_a = rng.uniform(-1, 0, 3)
        hi_a = lo_a + rng.uniform(0.3, 1.5, 3)
        c = rng.uniform(lo_a, hi_a)
        h = rng.uniform(0.05, 0.8, 3)
        overlap = np.clip(np.minimum(hi_a, c + h) - np.maximum(lo_a, c - h), 0, None)
        v_a = float(np.prod(hi_a - lo_a))
        expected = v_a - float(np.prod(overlap))
        got = signed_volume(boolean_difference(box(lo_a, hi_a), box(c - h, c + h), seed=int(rng.integers(1 << 30))))
        err = abs(got - expected)
        worst = max(worst, err)
        ok_pairs += err <= max(1e-3, 1e-3 * v_a)
    checks = {
        "euler characteristics": chi_ok,
        "volumes within 2%": vol_err <= 0.02,
        "cube corner 0.875": abs(corner - 0.875) <= 1e-3,
        "100 box pairs": ok_pairs == 100,
    }
    details = f"max volume error {100 * vol_err:.2f}%; corner {corner:.6f}; box pairs {ok_pairs}/100, worst {worst:.2e}"
    verdict(2, "geometry oracles", checks, details)


def test_criterion_3_interpolation(verdict):
    rng = np.random.default_rng(3)
    node_err = 0.0
    for _ in range(50):
        hf = make_heightfield(rng, 8, 8, 1.0)
        v, u = np.meshgrid(np.arange(8) / 7, np.arange(8) / 7, indexing="ij")
        node_err = max(node_err, float(np.abs(eval_bicubic(hf, u, v) - hf.grid).max()))
    const = HeightField(np.full((8, 8), -0.0625), 0.1)
    pu, pv = rng.random(5000), rng.random(5000)
    const_ok = bool(np.all(eval_bicubic(const, pu, pv) == -0.0625))
    cubic_err = 0.0
    s = np.linspace(0, 1, 8)
    for _ in range(20):
        a, b = rng.normal(size=4), rng.normal(size=4)
        f = lambda x, y: np.polyval(a, x) * np.polyval(b, y)  # noqa: E731
        grid = f(s[None, :], s[:, None])
        hf = HeightField(grid, float(np.abs(grid).max()))
        cubic_err = max(cubic_err, float(np.abs(eval_bicubic(hf, pu, pv) - f(pu, pv)).max()))
    dense = np.linspace(0, 1, 301)
    du, dv = np.meshgrid(dense, dense)
    ratio = 0.0
    cube = gen_cube(16)
    for k in range(100):
        hf = make_heightfield(rng, 8, 8, rng.uniform(0.1, 2.0))
        ratio = max(ratio, float(np.abs(hf.height(du, dv)).max()) / hf.amp_max)
        moved = displace_surface(cube, k % 6, hf)
        ratio = max(ratio, float(np.linalg.norm(moved.vertices - cube.vertices, axis=1).max()) / hf.amp_max)
    checks = {
        "nodes exact to 1e-9": node_err <= 1e-9,
        "constants exact": const_ok,
        "cubics within 1e-6": cubic_err <= 1e-6,
        "displacement at most 1.25 amp_max": ratio <= 1.25,
    }
    details = f"node error {node_err:.1e}; cubic error {cubic_err:.1e}; max displacement / amp_max {ratio:.4f}"
    verdict(3, "interpolation", checks, details)


def test_criterion_4_camera_protocol(verdict):
    def angles(c):
        p = c.position / np.linalg.norm(c.position)
        return round(math.degrees(math.asin(p[1])), 9), round(math.degrees(math.atan2(p[0], p[2])) % 360, 9)

    rig8 = [angles(c) for c in structural_rig(8)]
    rig4 = [angles(c) for c in structural_rig(4)]
    rng = np.random.default_rng(4)
    pos = np.array([sample_camera(rng).position for _ in range(100_000)])
    d = np.linalg.norm(pos, axis=1)
    iso = float(np.linalg.norm((pos / d[:, None]).mean(axis=0)))
    checks = {
        "8-view rig angles": rig8 == [(0, 0), (0, 90), (0, 180), (0, 270), (40, 45), (40, 135), (40, 225), (40, 315)],
        "4-view rig angles": rig4 == [(20, 0), (20, 90), (20, 180), (20, 270)],
        "distances in [2, 3]": bool(d.min() >= 2 and d.max() <= 3),
        "mean distance 2.5": abs(d.mean() - 2.5) <= 0.01,
        "isotropy": iso < 0.02,
    }
    details = f"distance range [{d.min():.4f}, {d.max():.4f}], mean {d.mean():.4f}; mean direction norm {iso:.4f}"
    verdict(4, "camera protocol", checks, details)


def test_criterion_5_determinism_and_resume(verdict, tmp_path):
    cfg = Config(count=200, seed=505, resolution=256, views=4)
    t0 = time.perf_counter()
    run_shard(cfg, tmp_path / "full")
    full_s = time.perf_counter() - t0
    for i in range(4):
        run_shard(cfg, tmp_path / "sharded", i, 4)

    crash = tmp_path / "crash"
    rows_dir = crash / "manifests" / "rows"
    cmd = [sys.executable, "-m", "zeroverse", "generate", "--out", str(crash), "--count", "200",
           "--seed", "505", "--resolution", "256", "--views", "4"]
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    deadline = time.time() + 600
    while time.time() < deadline and proc.poll() is None:
        if rows_dir.is_dir() and len(list(rows_dir.glob("*.json"))) >= 40:
            break
        time.sleep(0.2)
    killed_mid_run = proc.poll() is None
    os.kill(proc.pid, signal.SIGKILL)
    proc.wait()
    before = len(list(rows_dir.glob("*.json")))
    resumed = run_shard(cfg, crash)

    ref = digests(tmp_path / "full")
    job = derive_job(cfg.seed, 3, cfg)
    obj = synthesize(job, cfg).obj
    cam = structural_rig(4, width=256)[1]
    a = render(obj.mesh, None, cam, RenderOptions(flat_colors=True)).rgba
    b = render(obj.mesh, None, cam, RenderOptions(flat_colors=True)).rgba
    checks = {
        "full run has 200 objects": len(ref) == 200,
        "4-shard run identical": digests(tmp_path / "sharded") == ref,
        "killed mid-run": killed_mid_run and 0 < before < 200,
        "restart finished the rest": resumed.skipped == before and resumed.generated == 200 - before,
        "crash-restart run identical": digests(crash) == ref,
        "no temporary directories left": not list(crash.glob(".tmp-*")),
        "manifest has 200 rows": len(load_manifest(crash)) == 200,
        "repeated render identical": bool(np.array_equal(a, b)),
    }
    details = f"full run {full_s:.0f} s on {os.cpu_count()} core(s); killed after {before} objects"
    verdict(5, "determinism and resume", checks, details)


def test_criterion_6_render_sanity(verdict, render_run):
    cfg, out, _ = render_run
    touching = checked = 0
    for view in sorted(out.glob("*/renders/view_*.png")):
        alpha = read_png(view)[..., 3] > 0
        checked += 1
        touching += bool(alpha[0].any() or alpha[-1].any() or alpha[:, 0].any() or alpha[:, -1].any())

    rng = np.random.default_rng(6)
    holes = 0
    for _ in range(50):
        q = rng.normal(size=4)
        cube = apply_transform(gen_cube(8), Transform(tuple(rng.uniform(0.5, 1.2, 3)), tuple(q / np.linalg.norm(q))))
        mask = render(cube, None, sample_camera(rng, width=256), RenderOptions(flat_colors=True)).rgba[..., 3] > 0
        holes += int((ndimage.binary_fill_holes(mask) & ~mask).sum())

    scores, area_err = [], 0.0
    flat = RenderOptions(flat_colors=True)
    for i in range(100):
        obj = synthesize(derive_job(cfg.seed, i, cfg), cfg).obj
        cam = sample_camera(stream(i, "psnr-camera"), (2.0, 2.0), width=256)
        native = render(obj.mesh, None, cam, flat).rgba
        big = render(obj.mesh, None, cam.with_size(512, 512), flat).rgba.astype(float)
        down = np.rint(big.reshape(256, 2, 256, 2, 4).mean(axis=(1, 3))).astype(np.uint8)
        scores.append(psnr(down, native))
        covered = (native[..., 3] > 0).sum()
        area_err = max(area_err, abs(covered - (big[..., 3] > 0).sum() / 4) / covered)
    scores = np.array(scores)
    checks = {
        "1,000 objects rendered": checked == 1000,
        "no silhouette touches the border": touching == 0,
        "closed cubes have no holes": holes == 0,
        "covered area agrees across resolutions": area_err < 0.01,
        "256 vs downsampled 512 above 30 dB": bool(scores.min() > 30),
    }
    details = (
        f"{checked} renders, {touching} touching the border; hole pixels {holes}; PSNR over 100 objects: "
        f"worst {scores.min():.2f} dB, median {np.median(scores):.2f} dB, {np.mean(scores > 30):.0%} above 30 dB; "
        f"max area difference {100 * area_err:.2f}%"
    )
    verdict(6, "render sanity", checks, details)


def test_criterion_7_throughput_report(verdict, render_run, capsys):
    _, out, wall = render_run
    rep = stats(load_manifest(out / "manifests" / "shard-0-of-1.jsonl"))
    with capsys.disabled():
        print("\n" + format_report(rep))
    checks = {
        "1,000 rows": rep.rows == 1000,
        "synthesis time nonzero": rep.synth_ms > 0,
        "render time nonzero": rep.render_ms > 0,
    }
    details = (
        f"synthesis {100 * rep.synth_fraction:.1f}% / rendering {100 * rep.render_fraction:.1f}% "
        f"(reference 5% / 95%); wall {wall:.0f} s"
    )
    verdict(7, "throughput report", checks, details)
