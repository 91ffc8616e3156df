"""Report emission: per-record CSV, aggregate JSON, and an SVG scatter plot.

Numbers are written at full precision so the JSON round-trips exactly; the
one-decimal percentage formatting used on the CLI is display-only and lives
in :func:`format_percent`.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from matplotlib.figure import Figure

from .errors import ConfigurationError, EnvironmentFailure
from .harness import AggregateReport

CSV_NAME = "per_record.csv"
JSON_NAME = "aggregate.json"
SVG_NAME = "vs_vs_cbb.svg"
MARKER_GROUP_ID = "record-markers"

ALL_FORMATS = ("csv", "json", "svg")

_CSV_COLUMNS = ("id", "render_status", "vs", "cbb", "rounds_used", "failure")


def format_percent(value: float) -> str:
    """One-decimal display form of a percentage."""
    return f"{value:.1f}"


def aggregate_to_dict(report: AggregateReport) -> dict:
    """JSON-ready view of a report; NaN-free by construction."""
    return {
        "mean_vs": report.mean_vs,
        "mean_cbb": report.mean_cbb,
        "rsr": report.rsr,
        "n": report.n,
        "correlations": {
            "spearman_rho": report.spearman_rho,
            "kendall_tau": report.kendall_tau,
        },
        "per_record": [
            {
                "id": record.id,
                "final_code": record.final_code,
                "render_status": record.render_status,
                "vs": record.vs,
                "cbb": record.cbb,
                "rounds_used": record.rounds_used,
                "failure": record.failure,
            }
            for record in report.per_record
        ],
    }


def _write_csv(report: AggregateReport, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_COLUMNS)
        for record in report.per_record:
            writer.writerow(
                [
                    record.id,
                    record.render_status,
                    record.vs,
                    record.cbb,
                    record.rounds_used,
                    record.failure,
                ]
            )


def _write_json(report: AggregateReport, path: Path) -> None:
    path.write_text(
        json.dumps(aggregate_to_dict(report), indent=2) + "\n", encoding="utf-8"
    )


def _write_svg(report: AggregateReport, path: Path) -> None:
    fig = Figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(111)
    xs = [record.vs for record in report.per_record]
    ys = [record.cbb for record in report.per_record]
    markers = ax.scatter(xs, ys, s=36, alpha=0.8, edgecolors="none")
    markers.set_gid(MARKER_GROUP_ID)
    ax.set_xlabel("Visual Similarity")
    ax.set_ylabel("CodeBERTBLEU")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"VS vs CBB (n={report.n})")
    ax.grid(True, alpha=0.3)
    fig.savefig(path, format="svg")


def emit_report(
    report: AggregateReport,
    out_dir: str | Path,
    formats: tuple[str, ...] = ALL_FORMATS,
) -> list[Path]:
    """Write the selected report artifacts into ``out_dir``; returns the paths."""
    unknown = [f for f in formats if f not in ALL_FORMATS]
    if unknown:
        raise ConfigurationError(f"unknown report formats: {unknown}")
    target = Path(out_dir)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EnvironmentFailure(f"cannot create report directory {target}: {exc}") from exc
    written: list[Path] = []
    writers = {"csv": (CSV_NAME, _write_csv), "json": (JSON_NAME, _write_json), "svg": (SVG_NAME, _write_svg)}
    for fmt in ALL_FORMATS:
        if fmt not in formats:
            continue
        name, writer = writers[fmt]
        path = target / name
        try:
            writer(report, path)
        except OSError as exc:
            raise EnvironmentFailure(f"cannot write report file {path}: {exc}") from exc
        written.append(path)
    return written
