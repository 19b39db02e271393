"""Deterministic SVG rendering for report figures.

Everything goes through the Agg backend with a fixed hash salt and no
embedded creation date, so rerunning a command on the same inputs produces
byte-identical files. A CSV of the plotted numbers is always written by the
caller alongside the figure; the SVG is presentation only.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

matplotlib.rcParams["svg.hashsalt"] = "infill-bench"

__all__ = ["ecdf_plot", "histogram_plot", "grouped_bar_plot"]


def _finish(fig, ax, path: str | Path, description: str) -> None:
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(
        Path(path),
        format="svg",
        metadata={"Date": None, "Description": description},
    )
    plt.close(fig)


def ecdf_plot(
    xs: Sequence[float],
    ys: Sequence[float],
    path: str | Path,
    *,
    xlabel: str = "value",
    title: str = "",
    description: str = "",
) -> None:
    """Right-continuous step plot of an empirical CDF, with a zero marker."""
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.step(list(xs), list(ys), where="post")
    ax.axvline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("cumulative fraction")
    ax.set_ylim(0.0, 1.05)
    if title:
        ax.set_title(title)
    _finish(fig, ax, path, description)


def histogram_plot(
    counts: Sequence[int],
    path: str | Path,
    *,
    value_range: tuple[float, float] = (0.0, 1.0),
    xlabel: str = "value",
    title: str = "",
    description: str = "",
) -> None:
    """Bars over equal-width bins spanning ``value_range``."""
    n = len(counts)
    lo, hi = value_range
    width = (hi - lo) / n if n else 1.0
    centers = [lo + (i + 0.5) * width for i in range(n)]
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.bar(centers, list(counts), width=width * 0.95)
    ax.set_xlim(lo, hi)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    _finish(fig, ax, path, description)


def grouped_bar_plot(
    categories: Sequence[str],
    series: Mapping[str, Sequence[float | None]],
    path: str | Path,
    *,
    ylabel: str = "value",
    title: str = "",
    description: str = "",
) -> None:
    """One bar group per category, one bar per series; None plots as zero."""
    n_cat = len(categories)
    n_ser = max(len(series), 1)
    width = 0.8 / n_ser
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for si, (label, values) in enumerate(series.items()):
        xs = [i + (si - (n_ser - 1) / 2) * width for i in range(n_cat)]
        ax.bar(xs, [0.0 if v is None else v for v in values], width=width * 0.95,
               label=label)
    ax.set_xticks(range(n_cat))
    ax.set_xticklabels(list(categories))
    ax.set_ylabel(ylabel)
    ax.set_ylim(0.0, 1.05)
    if series:
        ax.legend(fontsize="small")
    if title:
        ax.set_title(title)
    _finish(fig, ax, path, description)
