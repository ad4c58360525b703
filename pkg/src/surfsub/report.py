"""Batch reports: delimited export and summary figures.

The JSON-lines record stream is the source of truth; this module
derives a flat CSV from it and renders a couple of matplotlib overview
figures next to the delimited output.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

CSV_NAME = "records.csv"

_CSV_FIELDS = [
    "ordinal",
    "seed",
    "relator",
    "rank",
    "verdict",
    "detected_index",
    "betti",
    "max_index_audited",
    "budget_exhausted",
    "total_elapsed",
]


def records_to_csv(records, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            verdict = rec["verdict"]
            audit = verdict.get("audit", [])
            writer.writerow(
                {
                    "ordinal": rec.get("ordinal"),
                    "seed": rec.get("seed"),
                    "relator": rec["relator"],
                    "rank": rec["rank"],
                    "verdict": verdict["kind"],
                    "detected_index": verdict.get("index"),
                    "betti": verdict.get("betti"),
                    "max_index_audited": audit[-1]["index"] if audit else None,
                    "budget_exhausted": any(a.get("exhausted") for a in audit),
                    "total_elapsed": rec.get("total_elapsed"),
                }
            )
    return path


def render_figures(records, rank: int, outdir) -> list[Path]:
    """Write the verdict-breakdown and Betti-audit figures; returns the
    file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    kinds = Counter(rec["verdict"]["kind"] for rec in records)
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = sorted(kinds, key=lambda k: -kinds[k])
    ax.bar(range(len(labels)), [kinds[k] for k in labels], color="#4878b0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("relators")
    ax.set_title(f"verdicts over {len(records)} relators (rank {rank})")
    fig.tight_layout()
    p = outdir / "verdict_breakdown.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)

    per_index: dict[int, list[int]] = defaultdict(list)
    detected = []
    for rec in records:
        verdict = rec["verdict"]
        for a in verdict.get("audit", []):
            if a.get("max_betti") is not None:
                per_index[a["index"]].append(a["max_betti"])
        if verdict["kind"] == "surface_detected":
            detected.append(verdict["index"])
    if per_index:
        fig, ax = plt.subplots(figsize=(7, 4))
        indices = sorted(per_index)
        ax.boxplot(
            [per_index[i] for i in indices], positions=indices, widths=0.6
        )
        threshold = [1 + i * (rank - 2) for i in indices]
        ax.plot(indices, threshold, "r--", label="surface threshold 1 + k(n-2)")
        ax.set_xlabel("index k")
        ax.set_ylabel("max Betti number per relator")
        ax.set_title("audited Betti numbers vs the detection threshold")
        ax.legend()
        fig.tight_layout()
        p = outdir / "betti_audit.png"
        fig.savefig(p, dpi=150)
        plt.close(fig)
        paths.append(p)

    if detected:
        fig, ax = plt.subplots(figsize=(7, 4))
        counts = Counter(detected)
        xs = sorted(counts)
        ax.bar(xs, [counts[x] for x in xs], color="#6aa84f")
        ax.set_xlabel("detection index")
        ax.set_ylabel("relators")
        ax.set_title("index at which the surface condition fired")
        fig.tight_layout()
        p = outdir / "detection_index.png"
        fig.savefig(p, dpi=150)
        plt.close(fig)
        paths.append(p)

    return paths
