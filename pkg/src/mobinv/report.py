"""Figure rendering for the experiment reports.

Figures are written next to the CSV tables; the CSVs stay the authoritative,
byte-reproducible output.  Rendering is headless (Agg).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Exact zeros cannot sit on a log axis; show them at the floor instead.
LOG_FLOOR = 1e-16


def render_error_figure(results, path):
    """Grouped log-scale bars of the per-expression average errors."""
    labels = results[0].error.labels
    names = [r.name for r in results]
    n_rows = len(labels)
    width = 0.8 / max(len(names), 1)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    x = np.arange(n_rows)
    for k, r in enumerate(results):
        vals = np.maximum(np.asarray(r.error.errors, dtype=float), LOG_FLOOR)
        ax.bar(x + (k - (len(names) - 1) / 2) * width, vals, width, label=r.name)
    ax.set_yscale("log")
    ax.set_ylabel("average error (%)")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.axhline(LOG_FLOOR, color="0.7", lw=0.8, ls=":")
    ax.legend(title="deformation", fontsize=8)
    ax.set_title("Descriptor stability under domain deformations")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_match_figure(results, path):
    """Bar chart of the vertex-matching error rate per deformation."""
    names = [r.name for r in results]
    rates = [r.match.error_rate for r in results]
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.bar(names, rates, color="tab:blue")
    ax.set_ylabel("matching error rate (%)")
    ax.set_ylim(0, max(max(rates) * 1.25, 1.0))
    for i, v in enumerate(rates):
        ax.text(i, v, f"{v:.2f}", ha="center", va="bottom", fontsize=8)
    ax.set_title("Nearest-neighbor vertex matching")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
