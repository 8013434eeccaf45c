"""Deterministic, sharded, resumable dataset generation."""
from .jobs import JobSpec, derive_job, parse_shard, shard_indices, uuid_pairs
from .manifest import load_manifest, read_rows
from .objio import mtl_text, obj_text, read_obj, read_png, write_png
from .shard import ShardResult, run_shard
from .stats import REFERENCE_SPLIT, Report, format_report, stats
from .synth import (
    COMPLETE,
    STATUS_DONE,
    STATUS_FAILED,
    STATUS_FALLBACK,
    cameras_for,
    first_view,
    plan_job,
    plan_row,
    synthesize,
    tree_digest,
    write_object,
)
from .verify import VerifyResult, verify

__all__ = [
    "COMPLETE",
    "REFERENCE_SPLIT",
    "STATUS_DONE",
    "STATUS_FAILED",
    "STATUS_FALLBACK",
    "JobSpec",
    "Report",
    "ShardResult",
    "VerifyResult",
    "cameras_for",
    "derive_job",
    "first_view",
    "format_report",
    "load_manifest",
    "mtl_text",
    "obj_text",
    "parse_shard",
    "plan_job",
    "plan_row",
    "read_obj",
    "read_png",
    "read_rows",
    "run_shard",
    "shard_indices",
    "stats",
    "synthesize",
    "tree_digest",
    "uuid_pairs",
    "verify",
    "write_object",
    "write_png",
]
