"""Figures for CLI reports, written straight to files (Agg backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (6.0, 4.0),
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.bbox": "tight",
    "savefig.dpi": 120,
    # fixed metadata keeps re-runs byte-stable for png/svg
    "svg.hashsalt": "twistconj",
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"Software": None} if path.suffix.lower() in (".png", ".svg", ".pdf") else None
    if path.suffix.lower() == ".pdf":
        meta = {"Creator": None, "Producer": None, "CreationDate": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def class_size_chart(labels: Sequence[str], sizes: Sequence[int], path: str | Path,
                     title: str = "") -> Path:
    """Bar chart of twisted class sizes, one bar per class representative."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        x = np.arange(len(sizes))
        ax.bar(x, sizes, color="0.35", width=0.7)
        ax.set_xticks(x)
        ax.set_xticklabels(labels, rotation=45 if len(labels) > 8 else 0, ha="right"
                           if len(labels) > 8 else "center")
        ax.set_xlabel("class representative")
        ax.set_ylabel("class size")
        ax.set_title(title or f"{len(sizes)} twisted classes")
        return _save(fig, path)


def burnside_scatter(R: Sequence[int], S: Sequence[int], path: str | Path,
                     title: str = "") -> Path:
    """R(phi) against the number of phi-fixed ordinary classes; points on
    the diagonal agree."""
    R = np.asarray(R)
    S = np.asarray(S)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        top = int(max(R.max(initial=1), S.max(initial=1))) + 1
        ax.plot([0, top], [0, top], color="0.7", lw=1, zorder=0)
        # jitter-free counts: size encodes multiplicity
        pts, counts = np.unique(np.stack([S, R], axis=1), axis=0, return_counts=True)
        ax.scatter(pts[:, 0], pts[:, 1], s=20 + 12 * counts, color="k", alpha=0.8)
        ax.set_xlim(0, top)
        ax.set_ylim(0, top)
        ax.set_xlabel("phi-fixed conjugacy classes")
        ax.set_ylabel("R(phi)")
        ax.set_title(title or f"{len(R)} automorphisms")
        return _save(fig, path)
