"""Post-hoc analysis of trajectory logs: coordination reports and tables.

Groups episodes by velocity ratio and emits, per ratio: capture success,
mutual-information coordination for every ordered pursuer pair (pooled over
all episodes at that ratio), high-influence fractions, and capture-angle
histograms. Pointwise ("per time-step") influence is a declared reading of a
distribution-level quantity; the report flags it as such.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import displacement, wrap
from .metrics import (
    CaptureAngleHistogram,
    capture_angle_histogram,
    capture_success_rate,
    ic_report,
)
from .trajectory import EpisodeTrace, read_many

IC_REPORT_SCHEMA_VERSION = 1
ANGLES_SCHEMA = "pursuit-capture-angles-v1"
ANGLES_HEADER = "ratio,agent,bin,bin_start_rad,count"
ANGLE_STATS_SCHEMA = "pursuit-capture-angle-stats-v1"
ANGLE_STATS_HEADER = "ratio,agent,captures,circular_mean,circular_variance"
SUCCESS_SCHEMA = "pursuit-success-v1"
SUCCESS_HEADER = "ratio,episodes,captures,success_rate"

POINTWISE_NOTE = (
    "high_influence_fraction uses pointwise mutual information per step pair; "
    "the mean pointwise value equals the plug-in MI"
)


def group_by_ratio(traces: Sequence[EpisodeTrace]) -> dict[float, list[EpisodeTrace]]:
    groups: dict[float, list[EpisodeTrace]] = {}
    for t in traces:
        groups.setdefault(t.ratio, []).append(t)
    return dict(sorted(groups.items()))


def capture_bearings(trace: EpisodeTrace) -> list[float]:
    """Evader-to-pursuer bearings at the capture step, in [0, 2*pi)."""
    t = trace.steps - 1
    e = wrap(float(trace.evader_xy[t, 0]), float(trace.evader_xy[t, 1]))
    angles = []
    for i in range(trace.n_pursuers):
        p = wrap(float(trace.pursuer_xy[t, i, 0]), float(trace.pursuer_xy[t, i, 1]))
        angles.append(displacement(e, p).bearing() % (2.0 * math.pi))
    return angles


def analyze_logs(
    log_paths: Iterable[str | Path],
    out_dir: str | Path,
    heading_bins: int = 16,
    angle_bins: int = 36,
) -> dict:
    """Run the full metrics suite; writes the reports and returns the IC doc."""
    traces = read_many(log_paths)
    if not traces:
        raise ValueError("no episodes found in the supplied logs")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups = group_by_ratio(traces)

    per_ratio = []
    success_rows = []
    angle_rows = []
    angle_stat_rows = []
    for ratio, eps in groups.items():
        n_agents = eps[0].n_pursuers
        success = capture_success_rate([e.captured for e in eps])
        success_rows.append((ratio, len(eps), sum(e.captured for e in eps), success))

        logs = [e.actions for e in eps if e.steps >= 2]
        report = ic_report(logs, n_agents, heading_bins) if logs else None
        pair_docs = []
        if report is not None:
            for (i, j), vals in sorted(report.pairs.items()):
                pair_docs.append(
                    {
                        "i": i,
                        "j": j,
                        "mi_bits": vals["mi_bits"],
                        "high_influence_fraction": vals["high_influence_fraction"],
                        "n_pairs": int(vals["n_pairs"]),
                    }
                )
        per_ratio.append(
            {
                "ratio": ratio,
                "episodes": len(eps),
                "success_rate": success,
                "pairs": pair_docs,
                "mean_mi_bits": report.mean_mi_bits if report is not None else 0.0,
                "mean_high_influence_fraction": (
                    float(np.mean([p["high_influence_fraction"] for p in pair_docs]))
                    if pair_docs
                    else 0.0
                ),
            }
        )

        captured_eps = [e for e in eps if e.captured]
        hist = capture_angle_histogram(
            [capture_bearings(e) for e in captured_eps], angle_bins
        )
        angle_rows.extend(_angle_rows(ratio, hist))
        angle_stat_rows.extend(_angle_stat_rows(ratio, hist))

    doc = {
        "schema_version": IC_REPORT_SCHEMA_VERSION,
        "heading_bins": heading_bins,
        "note": POINTWISE_NOTE,
        "per_ratio": per_ratio,
    }
    (out / "ic_report.json").write_text(json.dumps(doc, indent=2) + "\n")

    with open(out / "success.csv", "w", newline="") as fh:
        fh.write(f"# schema={SUCCESS_SCHEMA}\n{SUCCESS_HEADER}\n")
        for ratio, n, caps, rate in success_rows:
            fh.write(f"{ratio:.9g},{n},{caps},{rate:.9g}\n")

    with open(out / "capture_angles.csv", "w", newline="") as fh:
        fh.write(f"# schema={ANGLES_SCHEMA}\n{ANGLES_HEADER}\n")
        for row in angle_rows:
            fh.write(",".join(row) + "\n")

    with open(out / "capture_angle_stats.csv", "w", newline="") as fh:
        fh.write(f"# schema={ANGLE_STATS_SCHEMA}\n{ANGLE_STATS_HEADER}\n")
        for row in angle_stat_rows:
            fh.write(",".join(row) + "\n")
    return doc


def _angle_rows(ratio: float, hist: CaptureAngleHistogram) -> list[tuple[str, ...]]:
    rows = []
    width = 2.0 * math.pi / hist.angle_bins
    for agent in range(hist.counts.shape[0]):
        for b in range(hist.angle_bins):
            rows.append(
                (
                    f"{ratio:.9g}",
                    f"p{agent}",
                    str(b),
                    f"{b * width:.9g}",
                    str(int(hist.counts[agent, b])),
                )
            )
    return rows


def _angle_stat_rows(ratio: float, hist: CaptureAngleHistogram) -> list[tuple[str, ...]]:
    rows = []
    for agent in range(hist.counts.shape[0]):
        rows.append(
            (
                f"{ratio:.9g}",
                f"p{agent}",
                str(hist.n_captures),
                f"{hist.circular_mean[agent]:.9g}",
                f"{hist.circular_variance[agent]:.9g}",
            )
        )
    return rows
