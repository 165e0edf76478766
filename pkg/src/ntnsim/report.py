"""CSV output and SVG line charts for sweep records."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .engine import MetricsRecord  # noqa: E402

CSV_HEADER = (
    "scheme", "condition", "axis", "axis_value", "sum_rate_mean", "sum_rate_ci95", "energy_efficiency",
    "coverage_all_users", "coverage_per_user_mean", "trials", "master_seed",
)
FLOAT_FIELDS = ("axis_value", "sum_rate_mean", "sum_rate_ci95", "energy_efficiency",
                "coverage_all_users", "coverage_per_user_mean")
METRICS = {
    "sum_rate_mean": "Sum rate [bit/s/Hz]",
    "energy_efficiency": "Energy efficiency [bit/J]",
    "coverage_all_users": "Coverage probability (all users)",
    "coverage_per_user_mean": "Coverage probability (per user)",
}
AXIS_LABELS = {"tx_power_dbm": "Transmit power [dBm]", "rho": r"RIS amplitude coefficient $\rho$"}

STYLE = {
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": "--",
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "legend.fontsize": 7,
    "svg.fonttype": "none",
    "svg.hashsalt": "ntnsim",
}
MARKERS = {"I": "o", "II": "s", "III": "^", "IV": "D"}


def fmt(value: float) -> str:
    return format(value, ".9g")


def format_csv(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([fmt(getattr(r, k)) if k in FLOAT_FIELDS else getattr(r, k) for k in CSV_HEADER])
    return buf.getvalue()


def write_csv(records: Sequence[MetricsRecord], path: Path) -> Path:
    path = Path(path)
    path.write_text(format_csv(records), encoding="utf-8", newline="")
    return path


def read_csv(path: Path) -> list[dict]:
    """Rows as dicts with float/int fields converted."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            for k in FLOAT_FIELDS:
                row[k] = float(row[k])
            row["trials"] = int(row["trials"])
            row["master_seed"] = int(row["master_seed"])
            rows.append(row)
    return rows


def series(rows: Sequence[dict], metric: str) -> dict[str, tuple[list[float], list[float]]]:
    """``"<scheme> <condition>" -> (x, y)`` in CSV order."""
    out: dict[str, tuple[list[float], list[float]]] = {}
    for row in rows:
        xs, ys = out.setdefault(f"Scheme {row['scheme']} {row['condition']}", ([], []))
        xs.append(row["axis_value"])
        ys.append(row[metric])
    return out


def plot_metric(rows: Sequence[dict], metric: str):
    """Line chart of one metric for every scheme/condition series."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for label, (xs, ys) in series(rows, metric).items():
            scheme, condition = label.split()[1:]
            ax.plot(xs, ys, marker=MARKERS.get(scheme, "o"),
                    linestyle="-" if condition == "ideal" else "--", label=label, gid=label.replace(" ", "_"))
        ax.set_xlabel(AXIS_LABELS.get(rows[0]["axis"], rows[0]["axis"]) if rows else "")
        ax.set_ylabel(METRICS[metric])
        ax.legend(ncol=2)
        fig.tight_layout()
    return fig


def write_figures(csv_path: Path, out_dir: Path, stem: str) -> list[Path]:
    """One SVG per metric, plotted from the values as written to ``csv_path``."""
    rows = read_csv(csv_path)
    paths = []
    for metric in METRICS:
        fig = plot_metric(rows, metric)
        path = Path(out_dir) / f"{stem}_{metric}.svg"
        with plt.rc_context(STYLE):
            fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
