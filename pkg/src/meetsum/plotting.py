"""Figures written next to the result tables."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

METRICS = ("ROUGE-1 F", "ROUGE-2 F", "ROUGE-L F")

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "meetsum",
}


def rouge_bars(rows, path, title=None):
    """Grouped bars: one group per metric, one bar per model row.

    ``rows`` is a sequence of ``(label, (r1, r2, rl))``.  PNG metadata is
    stripped so identical inputs give identical bytes.
    """
    labels = [label for label, _ in rows]
    values = np.array([vals for _, vals in rows], dtype=float).reshape(len(rows), len(METRICS))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(4.0, 1.2 + 0.9 * len(rows)), 3.0))
        x = np.arange(len(METRICS))
        width = 0.8 / max(1, len(rows))
        for i, label in enumerate(labels):
            bars = ax.bar(x + (i - (len(rows) - 1) / 2) * width, values[i], width, label=label)
            ax.bar_label(bars, fmt="%.3f", fontsize=6, padding=1)
        ax.set_xticks(x, METRICS)
        ax.set_ylabel("F score")
        ax.set_ylim(0, max(0.05, float(values.max()) * 1.2))
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, loc="upper right")
        fig.tight_layout()
        fig.savefig(path, dpi=150, metadata={"Software": None})
        plt.close(fig)
    return path
