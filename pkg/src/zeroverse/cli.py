"""Command line interface: generate, preview, stats, verify."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import RIGS, Config
from .errors import ZeroverseError


def _load_config(args) -> Config:
    cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
    overrides = {}
    for key in ("count", "seed", "resolution", "views", "rig", "texture_dir"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return cfg.replace(**overrides) if overrides else cfg


def cmd_generate(args) -> int:
    from .pipeline import format_report, parse_shard, run_shard, stats

    cfg = _load_config(args)
    i, n = parse_shard(args.shard)
    res = run_shard(cfg, args.out, i, n, workers=args.workers, upload_cmd=args.upload_cmd)
    print(f"shard {i}/{n}: generated {res.generated}, skipped {res.skipped}, failed {res.failed}")
    if res.rows:
        print(format_report(stats(res.rows)))
    return 0


def cmd_preview(args) -> int:
    from .pipeline import derive_job, first_view, write_png

    cfg = _load_config(args)
    job = derive_job(cfg.seed, args.index, cfg)
    out = first_view(job, cfg, view=args.view)
    write_png(args.out, out.rgba)
    print(f"{job.uuid} -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    from .pipeline import format_report, load_manifest, stats

    print(format_report(stats(load_manifest(args.manifest))))
    return 0


def cmd_verify(args) -> int:
    from .pipeline import verify

    res = verify(args.out, sample=args.sample, seed=args.sample_seed)
    for uuid in res.checked:
        print(f"{'MISMATCH' if uuid in res.mismatched else 'ok      '} {uuid}")
    print(f"{len(res.checked) - len(res.mismatched)}/{len(res.checked)} objects reproduced byte for byte")
    return 0 if res.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zeroverse", description="Procedural multi-view shape dataset generator.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate one shard of a dataset")
    g.add_argument("--config", help="JSON config; missing keys take their defaults")
    g.add_argument("--out", required=True, help="dataset output directory")
    g.add_argument("--count", type=int, help="number of objects in the whole dataset")
    g.add_argument("--seed", type=int, help="dataset seed")
    g.add_argument("--shard", default="0/1", help="i/n: process indices with index mod n == i")
    g.add_argument("--workers", type=int, default=1, help="worker processes")
    g.add_argument("--resolution", type=int, help="render width and height")
    g.add_argument("--views", type=int, help="random views per object")
    g.add_argument("--rig", choices=RIGS, help="camera rig")
    g.add_argument("--texture-dir", dest="texture_dir", help="use PNG textures from this directory")
    g.add_argument("--upload-cmd", help="command run per finished object; {dir} and {uuid} are substituted")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("preview", help="render one object from one structural camera")
    v.add_argument("--config")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--index", type=int, default=0)
    v.add_argument("--view", type=int, default=0, choices=range(4), help="camera of the 4-view rig")
    v.add_argument("--resolution", type=int)
    v.add_argument("--texture-dir", dest="texture_dir")
    v.add_argument("--out", required=True, help="output PNG")
    v.set_defaults(func=cmd_preview)

    s = sub.add_parser("stats", help="summarize a manifest")
    s.add_argument("--manifest", required=True, help="shard .jsonl, rows directory or dataset directory")
    s.set_defaults(func=cmd_stats)

    c = sub.add_parser("verify", help="re-derive a sample of objects and byte-compare")
    c.add_argument("--out", required=True, help="dataset output directory")
    c.add_argument("--sample", type=int, default=8)
    c.add_argument("--sample-seed", type=int, default=0)
    c.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(asctime)s %(message)s")
    try:
        return args.func(args)
    except ZeroverseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
