"""Sharded, resumable dataset generation.

Shard ``i`` of ``n`` owns the indices ``k`` with ``k mod n == i``.  Objects
that already have a complete directory and a matching manifest row are
skipped, so a shard can be killed at any point and simply run again.
"""
from __future__ import annotations

import json
import logging
import shlex
import shutil
import subprocess
import time
import traceback
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path

from ..config import Config
from ..errors import InvalidConfig, InvalidParameter
from ..texture import TextureSource
from .jobs import derive_job, shard_indices
from .manifest import append_row, atomic_write, read_rows, shard_manifest_path, write_jsonl
from .synth import COMPLETE, STATUS_FAILED, object_is_complete, write_object

log = logging.getLogger(__name__)

CONFIG_FILE = "config.json"


@dataclass
class ShardResult:
    rows: list  # manifest rows of this shard's indices, by index
    generated: int
    skipped: int
    failed: int


def _ensure_output(out: Path, cfg: Config) -> None:
    """Create the output directory and pin its config; refuse to mix configs."""
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InvalidParameter(f"cannot create output directory {out}: {e}") from e
    path = out / CONFIG_FILE
    doc = cfg.to_dict()
    doc.pop("count")
    if path.exists():
        existing = Config.from_dict({**json.loads(path.read_text()), "count": cfg.count})
        if existing.digest() != cfg.digest():
            raise InvalidConfig(f"{out} holds a dataset made with a different config; use another --out")
        return
    try:
        atomic_write(path, (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode())
    except OSError as e:
        raise InvalidParameter(f"output directory {out} is not writable: {e}") from e


def _is_done(out: Path, row: dict | None, config_hash: str) -> bool:
    return (
        row is not None
        and row.get("status") in COMPLETE
        and row.get("config_hash") == config_hash
        and object_is_complete(out / row["uuid"])
    )


# worker state, set once per process
_SOURCE: TextureSource | None = None
_CFG: Config | None = None


def _init_worker(cfg: Config) -> None:
    global _SOURCE, _CFG
    _CFG, _SOURCE = cfg, TextureSource(cfg)


def _run_job(out: str, index: int) -> dict:
    job = derive_job(_CFG.seed, index, _CFG)
    try:
        return write_object(out, job, _CFG, _SOURCE)
    except Exception as e:  # recorded in the manifest; never aborts the shard
        log.warning("object %d (%s) failed: %s", index, job.uuid, e)
        return {
            "uuid": job.uuid,
            "index": index,
            "status": STATUS_FAILED,
            "error": "".join(traceback.format_exception_only(type(e), e)).strip(),
            "config_hash": f"{job.config_hash:016x}",
        }


def _upload(cmd: str, out: Path, row: dict) -> None:
    """Run the per-object hook; ``{dir}`` and ``{uuid}`` in ``cmd`` are substituted."""
    args = [a.format(dir=str(out / row["uuid"]), uuid=row["uuid"]) for a in shlex.split(cmd)]
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        log.warning("upload hook failed for %s (exit %d): %s", row["uuid"], proc.returncode, proc.stderr.strip())


def _clean_stale(out: Path, uuids: set) -> None:
    for tmp in out.glob(".tmp-*"):
        parts = tmp.name.split("-")
        if len(parts) >= 3 and parts[1] in uuids and tmp.is_dir():
            shutil.rmtree(tmp, ignore_errors=True)


def run_shard(
    cfg: Config,
    out,
    shard_index: int = 0,
    shard_count: int = 1,
    workers: int = 1,
    upload_cmd: str | None = None,
) -> ShardResult:
    """Generate every missing object of one shard and record it in the manifest."""
    if workers < 1:
        raise InvalidParameter("workers must be at least 1")
    out = Path(out)
    indices = shard_indices(cfg.count, shard_index, shard_count)
    _ensure_output(out, cfg)
    config_hash = f"{cfg.digest():016x}"

    jobs = {i: derive_job(cfg.seed, i, cfg).uuid for i in indices}
    _clean_stale(out, set(jobs.values()))
    rows = read_rows(out)
    todo = [i for i, u in jobs.items() if not _is_done(out, rows.get(u), config_hash)]
    skipped = len(jobs) - len(todo)
    log.info("shard %d/%d: %d objects, %d already done", shard_index, shard_count, len(jobs), skipped)

    failed = 0
    t0 = time.perf_counter()

    def finish(row: dict) -> None:
        nonlocal failed
        append_row(out, row)
        rows[row["uuid"]] = row
        if row["status"] == STATUS_FAILED:
            failed += 1
        elif upload_cmd:
            _upload(upload_cmd, out, row)
        n = len(rows_done)
        rows_done.append(row["uuid"])
        if (n + 1) % 50 == 0 or n + 1 == len(todo):
            log.info("%d/%d generated (%.1f s)", n + 1, len(todo), time.perf_counter() - t0)

    rows_done: list = []
    if workers == 1:
        _init_worker(cfg)
        for i in todo:
            finish(_run_job(str(out), i))
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            pending = set()
            queue = iter(todo)
            for i in queue:
                pending.add(pool.submit(_run_job, str(out), i))
                if len(pending) >= 2 * workers:
                    done, pending = wait(pending, return_when=FIRST_COMPLETED)
                    for f in done:
                        finish(f.result())
            for f in pending:
                finish(f.result())

    shard_rows = [rows[u] for i, u in jobs.items() if u in rows]
    write_jsonl(shard_manifest_path(out, shard_index, shard_count), shard_rows)
    return ShardResult(shard_rows, len(todo), skipped, failed)
