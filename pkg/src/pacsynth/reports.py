"""Report, trace, and figure writers.

Reports are JSON, traces and tables are CSV, and each report path also
renders a matplotlib figure next to the delimited output.  All serialized
values are deterministic for a fixed (task, flags, seed); counts print in
full decimal with no exponent notation.
"""

from __future__ import annotations

import csv
import json
from typing import Sequence

from .clustering import ClusterMaps
from .dsl import Sort, pretty
from .enumeration import CountTable
from .guarantee import TraceRow

FORMAT_VERSION = 1


def write_json(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trace_csv(trace: Sequence[TraceRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iteration", "samples_seen", "tier", "size_upper", "threshold", "phase"]
        )
        for row in trace:
            writer.writerow(
                [row.iteration, row.samples_seen, row.tier, str(row.size_upper),
                 row.threshold, row.phase]
            )


def write_shrinkage_csv(rows: Sequence[tuple[int, list[int]]], path: str) -> None:
    n_tiers = len(rows[0][1]) if rows else 3
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["samples_seen"] + [f"size_h{t}" for t in range(n_tiers)])
        for seen, sizes in rows:
            writer.writerow([seen] + [str(s) for s in sizes])


def write_table_csv(table: CountTable, path: str) -> None:
    """Debug dump of the straight-line count table."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sort", "size", "count", "representative"])
        for sort in Sort:
            for vec, t, n in table.entries(sort):
                writer.writerow(
                    [sort.value, t, str(n), pretty(table.representative(sort, vec, t))]
                )


def write_cluster_csv(maps: ClusterMaps, path: str) -> None:
    """Debug dump of per-consistency-vector counts; vectors print as 1/0."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["consistency_vector", "count"])
        for c in sorted(maps.count_by_consistency, reverse=True):
            writer.writerow(
                ["".join("1" if b else "0" for b in c), str(maps.count_by_consistency[c])]
            )


def write_suite_rows_csv(rows: Sequence[dict], path: str) -> None:
    fields = [
        "task", "trial", "mode", "outcome", "tier", "total_samples",
        "validation_samples", "held_out_error", "correct", "program", "error",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_trace_figure(trace: Sequence[TraceRow], path: str, title: str) -> None:
    """Consistent-space size and stopping threshold against samples seen."""
    plt = _pyplot()
    fig, (ax_size, ax_thresh) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    tiers = sorted({row.tier for row in trace})
    for tier in tiers:
        rows = [r for r in trace if r.tier == tier]
        xs = [r.samples_seen for r in rows]
        ax_size.plot(xs, [float(r.size_upper) for r in rows], marker="o",
                     label=f"tier {tier}")
        ax_thresh.plot(xs, [r.threshold for r in rows], marker="x",
                       label=f"tier {tier}")
    ax_size.set_yscale("symlog", linthresh=1)
    ax_size.set_ylabel("consistent programs")
    ax_size.legend(fontsize="small")
    ax_size.set_title(title)
    ax_thresh.set_ylabel("stopping threshold n")
    ax_thresh.set_xlabel("samples seen")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_shrinkage_figure(
    rows: Sequence[tuple[int, list[int]]], path: str, title: str
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if rows:
        n_tiers = len(rows[0][1])
        xs = [seen for seen, _ in rows]
        for t in range(n_tiers):
            ax.plot(xs, [float(sizes[t]) for _, sizes in rows], marker="o",
                    label=f"up to {t} condition{'s' if t != 1 else ''}")
    ax.set_yscale("symlog", linthresh=1)
    ax.set_xlabel("samples seen")
    ax.set_ylabel("consistent programs")
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_suite_figure(rows: Sequence[dict], path: str, title: str) -> None:
    """Mean drawn samples per task and mode."""
    plt = _pyplot()
    tasks = sorted({r["task"] for r in rows})
    modes = sorted({r["mode"] for r in rows})
    fig, ax = plt.subplots(figsize=(max(7, 0.9 * len(tasks)), 4.5))
    width = 0.8 / max(1, len(modes))
    for mi, mode in enumerate(modes):
        means = []
        for task in tasks:
            vals = [
                r["total_samples"] for r in rows
                if r["task"] == task and r["mode"] == mode and r["total_samples"] is not None
            ]
            means.append(sum(vals) / len(vals) if vals else 0)
        ax.bar(
            [i + mi * width for i in range(len(tasks))], means, width, label=mode
        )
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(tasks))])
    ax.set_xticklabels(tasks, rotation=30, ha="right", fontsize="small")
    ax.set_ylabel("mean samples drawn")
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
