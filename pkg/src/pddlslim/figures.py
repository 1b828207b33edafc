"""Render benchmark scatter plots to image files.

One figure per metric: pruned-method value on x, full-grounding baseline on
y, a diagonal for reference, and failed tasks pinned to red dashed sentinel
lines just outside the data range.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .bench import BenchmarkRecord, scatter_pairs

_METRIC_LABELS = {
    "grounded_actions": "grounded actions",
    "grounding_time": "grounding time (s)",
    "plan_cost": "plan cost",
    "solving_time": "solving time (s)",
}

_MARKERS = ("o", "s", "^", "D", "v", "P", "X", "*")


def render_scatter(
    records: Sequence[BenchmarkRecord], metric: str, path: str | Path
) -> Path:
    """Write a PNG for one metric and return its path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    points = scatter_pairs(records, metric)
    values = [v for p in points for v in (p.x, p.y) if v is not None]
    top = max(values) if values else 1.0
    if top <= 0:
        top = 1.0
    sentinel = top * 1.15

    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    families = sorted({p.task.split("-", 1)[0] for p in points})
    marker_of = {
        fam: _MARKERS[i % len(_MARKERS)] for i, fam in enumerate(families)
    }
    for fam in families:
        ok = [p for p in points if not p.failed and p.task.startswith(fam)]
        if ok:
            ax.scatter(
                [p.x for p in ok],
                [p.y for p in ok],
                marker=marker_of[fam],
                s=28,
                alpha=0.75,
                label=fam,
            )
    failed = [p for p in points if p.failed]
    if failed:
        ax.axvline(sentinel, color="red", linestyle="--", linewidth=1)
        ax.axhline(sentinel, color="red", linestyle="--", linewidth=1)
        xs = [p.x if p.x is not None else sentinel for p in failed]
        ys = [p.y if p.y is not None else sentinel for p in failed]
        ax.scatter(xs, ys, marker="x", s=28, color="red", label="failed")
    lim = sentinel * 1.05
    ax.plot([0, lim], [0, lim], color="gray", linewidth=0.8, zorder=0)
    ax.set_xlim(0, lim)
    ax.set_ylim(0, lim)
    label = _METRIC_LABELS.get(metric, metric)
    ax.set_xlabel(f"pruned: {label}")
    ax.set_ylabel(f"baseline: {label}")
    ax.set_title(label)
    if families or failed:
        ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_all(
    records: Sequence[BenchmarkRecord], out_dir: str | Path
) -> list[Path]:
    from .bench import METRICS

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        render_scatter(records, metric, out_dir / f"scatter_{metric}.png")
        for metric in METRICS
    ]
