"""Append-only manifest of finished objects.

Each row lives in its own file ``<out>/manifests/rows/<uuid>.json``, written
to a temporary name and renamed into place, so a row is either fully present
or absent and concurrent shards never contend for one file.  A run also
leaves a consolidated ``shard-<i>-of-<n>.jsonl`` (same atomic write) for
downstream tools.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

from ..errors import InvalidInput

ROW_FIELDS = (
    "uuid", "index", "status", "synth_ms", "render_ms", "triangle_count", "aug_kind",
    "planned_aug", "primitive_count", "n_surfaces", "n_heightfield", "config_hash",
)


def manifest_dir(out) -> Path:
    return Path(out) / "manifests"


def rows_dir(out) -> Path:
    return manifest_dir(out) / "rows"


def shard_manifest_path(out, shard_index: int, shard_count: int) -> Path:
    return manifest_dir(out) / f"shard-{shard_index}-of-{shard_count}.jsonl"


def atomic_write(path, data: bytes) -> None:
    """Write ``data`` to ``path`` via a same-directory temp file, fsync and rename."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    with open(tmp, "wb") as f:
        f.write(data)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def append_row(out, row: dict) -> None:
    d = rows_dir(out)
    d.mkdir(parents=True, exist_ok=True)
    atomic_write(d / f"{row['uuid']}.json", (json.dumps(row, sort_keys=True) + "\n").encode())


def read_rows(out) -> dict:
    """uuid -> row for every row recorded under ``out``."""
    rows = {}
    d = rows_dir(out)
    if d.is_dir():
        for p in d.glob("*.json"):
            row = json.loads(p.read_text())
            rows[row["uuid"]] = row
    return rows


def write_jsonl(path, rows) -> None:
    body = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
    atomic_write(path, body.encode())


def load_manifest(path) -> list[dict]:
    """Rows from a ``.jsonl`` manifest, a rows directory, or a dataset output directory.

    Rows are returned sorted by object index.  A truncated final line in a
    ``.jsonl`` file (from a copy interrupted mid-write) is ignored.
    """
    p = Path(path)
    if p.is_file():
        rows = []
        lines = p.read_text().splitlines()
        for k, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError:
                if k == len(lines) - 1:
                    break
                raise InvalidInput(f"corrupt manifest line {k + 1} in {p}") from None
    elif (p / "manifests" / "rows").is_dir():
        rows = list(read_rows(p).values())
    elif p.is_dir():
        rows = [json.loads(q.read_text()) for q in p.glob("*.json")]
    else:
        raise InvalidInput(f"no manifest at {p}")
    return sorted(rows, key=lambda r: r.get("index", 0))
