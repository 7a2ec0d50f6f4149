"""SVG line charts of sweep results.

Plots are cosmetic; the CSV written next to them is the result contract.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from src.core.logging.setup import get_logger  # noqa: E402

logger = get_logger(__name__)

# Fixed ids keep the SVG output identical between runs
plt.rcParams["svg.hashsalt"] = "rac-lab"

Series = Tuple[str, str]


def _grouped(rows: Sequence[Dict], group_by: Optional[str]) -> Dict[str, List[Dict]]:
    groups: Dict[str, List[Dict]] = {}
    for row in rows:
        key = str(row.get(group_by, "")) if group_by else ""
        groups.setdefault(key, []).append(row)
    return groups


def plot_sweep(rows: Sequence[Dict], x: str, series: Sequence[Series], path: str, title: str,
               xlabel: str, ylabel: str, references: Sequence[Series] = (),
               group_by: Optional[str] = None, logx: bool = False) -> str:
    """Draws one line per (series, group) against ``x`` and dashed reference lines.

    Args:
        rows: Sweep rows as produced by ``SweepResult.to_rows``.
        x: Column on the horizontal axis.
        series: ``(column, legend label)`` pairs drawn as solid lines with markers.
        path: Output ``.svg`` path.
        references: ``(column, legend label)`` pairs drawn dashed (benchmarks).
        group_by: Column splitting the rows into separate lines, e.g. ``label``.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for group, group_rows in _grouped(rows, group_by).items():
        group_rows = sorted(group_rows, key=lambda row: row[x])
        xs = [row[x] for row in group_rows]
        suffix = f" [{group}]" if group else ""
        for column, label in series:
            ys = [row.get(column) for row in group_rows]
            if any(value is None for value in ys):
                continue
            ax.plot(xs, ys, marker="o", linewidth=1.5, label=label + suffix)
        for column, label in references:
            ys = [row.get(column) for row in group_rows]
            if any(value is None for value in ys):
                continue
            ax.plot(xs, ys, linestyle="--", linewidth=1.0, label=label + suffix)
    if logx:
        ax.set_xscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path
