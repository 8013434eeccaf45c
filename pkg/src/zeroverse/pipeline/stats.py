"""Aggregate report over a manifest."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..augment import KINDS
from ..errors import InvalidInput
from .synth import STATUS_FAILED, STATUS_FALLBACK

# share of wall time spent on shape synthesis vs rendering reported for the
# reference implementation; shown for comparison only
REFERENCE_SPLIT = (0.05, 0.95)


@dataclass
class Report:
    rows: int
    synth_ms: float
    render_ms: float
    synth_fraction: float
    render_fraction: float
    aug_hist: dict = field(default_factory=dict)  # realized kind -> fraction
    planned_aug_hist: dict = field(default_factory=dict)
    primitive_hist: dict = field(default_factory=dict)  # count -> fraction
    heightfield_rate: float = float("nan")  # displaced surfaces / surfaces
    failure_rate: float = 0.0
    fallback_rate: float = 0.0  # planned booleans that were dropped, over all rows
    mean_triangles: float = float("nan")


def _fractions(counter: Counter, n: int, keys=None) -> dict:
    keys = sorted(counter) if keys is None else keys
    return {k: counter.get(k, 0) / n for k in keys}


def stats(rows) -> Report:
    rows = list(rows)
    if not rows:
        raise InvalidInput("manifest is empty")
    n = len(rows)
    ok = [r for r in rows if r.get("status") != STATUS_FAILED]
    synth = float(sum(r.get("synth_ms", 0.0) for r in ok))
    rend = float(sum(r.get("render_ms", 0.0) for r in ok))
    total = synth + rend
    surfaces = sum(r.get("n_surfaces", 0) for r in ok)
    report = Report(
        rows=n,
        synth_ms=synth,
        render_ms=rend,
        synth_fraction=synth / total if total else float("nan"),
        render_fraction=rend / total if total else float("nan"),
        failure_rate=sum(r.get("status") == STATUS_FAILED for r in rows) / n,
        fallback_rate=sum(r.get("status") == STATUS_FALLBACK for r in rows) / n,
    )
    if ok:
        report.aug_hist = _fractions(Counter(r.get("aug_kind") for r in ok), len(ok), list(KINDS))
        if all("planned_aug" in r for r in ok):
            report.planned_aug_hist = _fractions(Counter(r["planned_aug"] for r in ok), len(ok), list(KINDS))
        report.primitive_hist = _fractions(Counter(r.get("primitive_count") for r in ok), len(ok))
        report.mean_triangles = sum(r.get("triangle_count", 0) for r in ok) / len(ok)
    if surfaces:
        report.heightfield_rate = sum(r.get("n_heightfield", 0) for r in ok) / surfaces
    return report


def format_report(rep: Report) -> str:
    ref_s, ref_r = REFERENCE_SPLIT
    lines = [
        f"objects              {rep.rows}",
        f"synthesis time       {rep.synth_ms / 1000:.1f} s ({100 * rep.synth_fraction:.1f}%)",
        f"render time          {rep.render_ms / 1000:.1f} s ({100 * rep.render_fraction:.1f}%)",
        f"reference split      {100 * ref_s:.0f}% synthesis / {100 * ref_r:.0f}% rendering",
        f"failure rate         {100 * rep.failure_rate:.2f}%",
        f"boolean fallbacks    {100 * rep.fallback_rate:.2f}%",
        f"mean triangles       {rep.mean_triangles:.0f}",
        f"height-field rate    {rep.heightfield_rate:.3f} of surfaces",
        "augmentation (realized / planned):",
    ]
    for k in KINDS:
        planned = rep.planned_aug_hist.get(k)
        tail = f" / {planned:.3f}" if planned is not None else ""
        lines.append(f"  {k:<18} {rep.aug_hist.get(k, 0.0):.3f}{tail}")
    lines.append("primitives per object:")
    for k, v in rep.primitive_hist.items():
        lines.append(f"  {k:<18} {v:.3f}")
    return "\n".join(lines)
