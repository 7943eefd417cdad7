"""Report figures rendered to image files next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .common_info import ComponentPartition
from .reports import FeasibilityReport


def save_partition_figure(partition: ComponentPartition, path) -> Path:
    """Bar chart of the component weights (the distribution of K)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    idx = range(len(partition.weights))
    ax.bar(idx, partition.weights, color="#4878d0")
    ax.set_xticks(list(idx))
    ax.set_xlabel("component index")
    ax.set_ylabel("weight")
    ax.set_title("Common-information component weights")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_ak_figure(report: FeasibilityReport, path) -> Path:
    """Rate curves of the helper-assisted sweep, with the cut levels."""
    w = report.witnesses
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    g = w["gamma_grid"]
    ax.plot(g, w["source_rate_curve"], label="source rate H(X|U)", color="#4878d0")
    ax.plot(g, w["helper_rate_curve"], label="helper rate H(U)", color="#d65f5f")
    ax.plot(
        g,
        w["time_sharing_helper"],
        label="time-sharing helper rate",
        color="#d65f5f",
        linestyle="--",
        alpha=0.6,
    )
    ax.axhline(w["cut_source"], color="#4878d0", linestyle=":", label="source cut")
    ax.axhline(w["cut_helper"], color="#d65f5f", linestyle=":", label="helper cut")
    ax.axvline(w["gamma"], color="gray", alpha=0.5)
    ax.set_xlabel("duty cycle gamma")
    ax.set_ylabel("bits per symbol")
    ax.set_title(f"Helper-assisted region sweep ({report.verdict})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_rate_figure(rates: dict, path, title: str = "Stream rates") -> Path:
    """Measured vs target bits per symbol, one bar pair per stream."""
    path = Path(path)
    names = list(rates)
    measured = [rates[n][0] for n in names]
    targets = [rates[n][1] for n in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    pos = range(len(names))
    ax.bar([p - 0.2 for p in pos], measured, width=0.4, label="measured", color="#4878d0")
    ax.bar([p + 0.2 for p in pos], targets, width=0.4, label="entropy target", color="#6acc64")
    ax.set_xticks(list(pos))
    ax.set_xticklabels(names)
    ax.set_ylabel("bits per symbol")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
