from __future__ import annotations
from pathlib import Path as FilePath
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from src.modules.Reconstruction import ReconstructionResult  # noqa: E402

logger = logging.getLogger(__name__)


def plot_reconstruction(result: ReconstructionResult, out: FilePath, title: str = "") -> FilePath:
    """Scatter of recovered points with every consumed path drawn as a polyline."""
    cfg = result.Configuration
    if cfg.Dim != 2:
        raise ValueError(f"Plots are only drawn for d=2, got d={cfg.Dim}")

    points = cfg.array()
    fig, ax = plt.subplots(figsize=(6, 6))
    for explanation in result.Labeling:
        trace = points[[v - 1 for v in explanation.Path.Vertices]]
        ax.plot(trace[:, 0], trace[:, 1], color="tab:gray", alpha=0.35, linewidth=0.8)
    ax.scatter(points[:, 0], points[:, 1], color="tab:blue", zorder=3)
    for label, (x, y) in enumerate(points, start=1):
        ax.annotate(str(label), (x, y), textcoords="offset points", xytext=(4, 4))

    ax.set_aspect("equal")
    ax.set_title(title or f"{cfg.n} points, {result.ExplainedCount} values explained")
    FilePath(out).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Plot written to {out}")
    return FilePath(out)
