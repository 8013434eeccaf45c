"""Re-derive stored objects and compare them byte for byte."""
from __future__ import annotations

import json
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import Config
from ..errors import InvalidInput
from ..texture import TextureSource
from .jobs import derive_job
from .shard import CONFIG_FILE
from .synth import object_is_complete, read_marker, tree_digest, write_object


@dataclass
class VerifyResult:
    checked: list  # uuids
    mismatched: list  # uuids whose regenerated bytes differ

    @property
    def ok(self) -> bool:
        return not self.mismatched


def load_output_config(out) -> Config:
    path = Path(out) / CONFIG_FILE
    if not path.is_file():
        raise InvalidInput(f"{out} has no {CONFIG_FILE}; not a dataset directory")
    return Config.from_dict(json.loads(path.read_text()))


def verify(out, sample: int = 8, seed: int = 0) -> VerifyResult:
    """Regenerate ``sample`` randomly chosen finished objects and compare their digests."""
    out = Path(out)
    cfg = load_output_config(out)
    done = sorted(p.name for p in out.iterdir() if p.is_dir() and object_is_complete(p))
    if not done:
        raise InvalidInput(f"no finished objects in {out}")
    rng = np.random.default_rng(seed)
    pick = sorted(rng.choice(len(done), size=min(sample, len(done)), replace=False))
    source = TextureSource(cfg)
    checked, bad = [], []
    with tempfile.TemporaryDirectory() as scratch:
        for k in pick:
            uuid = done[k]
            marker = read_marker(out / uuid)
            job = derive_job(marker["dataset_seed"], marker["index"], cfg)
            if job.uuid != uuid:
                bad.append(uuid)
                continue
            write_object(scratch, job, cfg, source)
            checked.append(uuid)
            if tree_digest(Path(scratch) / uuid) != tree_digest(out / uuid):
                bad.append(uuid)
    return VerifyResult(checked, bad)
