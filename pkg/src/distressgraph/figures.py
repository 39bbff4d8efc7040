"""File rendering for metric and simulation reports.

Report paths write three artifacts side by side: the canonical JSON
report, a flat CSV for spreadsheet use, and a PNG figure.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .graph import canonical_json_bytes
from .metrics import EfficiencyReport, GraphMetrics

Curve = Sequence[tuple]


def _flatten_metrics(metrics: GraphMetrics) -> list[tuple[str, float]]:
    rows: list[tuple[str, float]] = []
    for kind, count in sorted(metrics.node_counts.items()):
        rows.append((f"nodes.{kind}", count))
    for name, count in sorted(metrics.edge_counts_by_type.items()):
        rows.append((f"edges.type.{name}", count))
    for name, count in sorted(metrics.edge_counts_by_status.items()):
        rows.append((f"edges.status.{name}", count))
    rows.append(("weakly_connected_components", metrics.weakly_connected_components))
    rows.append(("mean_degree", metrics.mean_degree))
    rows.append(("isolated_expression_ratio", metrics.isolated_expression_ratio))
    rows.append(("concept_coverage", metrics.concept_coverage))
    return rows


def write_metrics_csv(metrics: GraphMetrics, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        writer.writerows(_flatten_metrics(metrics))


def save_metrics_figure(metrics: GraphMetrics, path: Union[str, Path]) -> None:
    fig, (ax_status, ax_nodes, ax_ratios) = plt.subplots(1, 3, figsize=(12.0, 4.0))

    statuses = sorted(metrics.edge_counts_by_status.items())
    ax_status.bar([name for name, _ in statuses], [n for _, n in statuses])
    ax_status.set_title("Edges by status")
    ax_status.tick_params(axis="x", rotation=60)

    structure = [
        ("expressions", metrics.node_counts.get("expression", 0)),
        ("concepts", metrics.node_counts.get("concept", 0)),
        ("components", metrics.weakly_connected_components),
    ]
    ax_nodes.bar([name for name, _ in structure], [n for _, n in structure])
    ax_nodes.set_title("Graph structure")

    ratios = [
        ("coverage", metrics.concept_coverage),
        ("isolated", metrics.isolated_expression_ratio),
    ]
    ax_ratios.bar([name for name, _ in ratios], [v for _, v in ratios])
    ax_ratios.set_ylim(0.0, 1.0)
    ax_ratios.set_title(f"Ratios (mean degree {metrics.mean_degree:.2f})")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_metrics_report(
    metrics: GraphMetrics,
    out_dir: Union[str, Path],
    stem: str = "metrics",
    coherence: Optional[float] = None,
) -> dict:
    """Write <stem>.json, <stem>.csv, and <stem>.png under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = metrics.to_dict()
    doc["semantic_coherence"] = coherence
    json_path = out / f"{stem}.json"
    json_path.write_bytes(canonical_json_bytes(doc))
    csv_path = out / f"{stem}.csv"
    write_metrics_csv(metrics, csv_path)
    png_path = out / f"{stem}.png"
    save_metrics_figure(metrics, png_path)
    return {"json": str(json_path), "csv": str(csv_path), "png": str(png_path)}


def write_curve_csv(curves: Mapping[str, Curve], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["policy", "decisions_used", "f1"])
        for policy in sorted(curves):
            for decisions, f1 in curves[policy]:
                writer.writerow([policy, decisions, f1])


def save_curve_figure(curves: Mapping[str, Curve], path: Union[str, Path]) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for policy in sorted(curves):
        curve = list(curves[policy])
        if not curve:
            continue
        xs = [point[0] for point in curve]
        ys = [point[1] for point in curve]
        ax.step(xs, ys, where="post", label=policy)
    ax.set_xlabel("Validator decisions")
    ax.set_ylabel("F1 on accepted edges")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.set_title("Review efficiency")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_simulation_report(
    reports: Mapping[str, EfficiencyReport],
    curves: Mapping[str, Curve],
    out_dir: Union[str, Path],
    stem: str = "simulation",
) -> dict:
    """Write <stem>.json, <stem>.csv, and <stem>.png under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {policy: reports[policy].to_dict() for policy in sorted(reports)}
    json_path = out / f"{stem}.json"
    json_path.write_bytes(canonical_json_bytes(doc))
    csv_path = out / f"{stem}.csv"
    write_curve_csv(curves, csv_path)
    png_path = out / f"{stem}.png"
    save_curve_figure(curves, png_path)
    return {"json": str(json_path), "csv": str(csv_path), "png": str(png_path)}


__all__ = [
    "save_curve_figure",
    "save_metrics_figure",
    "write_curve_csv",
    "write_metrics_csv",
    "write_metrics_report",
    "write_simulation_report",
]
