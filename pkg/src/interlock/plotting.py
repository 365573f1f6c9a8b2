"""Static figures written next to the CSV and JSON reports.

Figures are built on a bare :class:`~matplotlib.figure.Figure` with the Agg
canvas, so nothing here touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .model import Scene


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def plot_scene(scene: Scene, path: str | Path, title: str | None = None) -> Path:
    """3D polyline view of every chain, with joint labels and frame corner centers."""
    fig = Figure(figsize=(6.5, 6.0))
    ax = fig.add_subplot(projection="3d")
    for c in scene.chains:
        J = c.joints
        ax.plot(J[:, 0], J[:, 1], J[:, 2], marker="o", markersize=2.5, linewidth=1.2, label=c.name)
        if len(c.labels) <= 12:
            for lab, p in zip(c.labels, J):
                ax.text(p[0], p[1], p[2], lab, fontsize=7)
    if scene.frame is not None:
        C = scene.frame.corner_centers
        ax.scatter(C[:, 0], C[:, 1], C[:, 2], marker="x", color="k", label="corner centers")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(title or f"scene (eps = {scene.eps:g})")
    return _save(fig, path)


def plot_sweep(rows: Sequence, path: str | Path) -> Path:
    """Observed |vN| envelope against the lower and upper bounds, per eps."""
    rows = [r for r in rows if r.feasible and math.isfinite(r.observed_min)]
    fig = Figure(figsize=(6.5, 4.5))
    ax = fig.add_subplot()
    if rows:
        eps = np.array([r.epsilon for r in rows])
        ax.fill_between(eps, [r.observed_min for r in rows], [r.observed_max for r in rows],
                        alpha=0.4, label="observed |vN|")
        ax.plot(eps, [r.lo for r in rows], "v--", label="lower bound")
        ax.plot(eps, [r.hi for r in rows], "^--", label="upper bound")
        ax.axhline(math.sqrt(3.0) / 2.0, color="k", linewidth=0.8, label="h (unit equilateral)")
        ax.set_xscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("|vN|")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_campaign(reports: Sequence, path: str | Path) -> Path:
    """Best separation reached per seed, with the separation radius for reference."""
    fig = Figure(figsize=(6.5, 4.0))
    ax = fig.add_subplot()
    if reports:
        seeds = [r.seed for r in reports]
        best = [r.best_separation for r in reports]
        colors = ["tab:green" if r.separated else "tab:red" for r in reports]
        ax.bar([str(s) for s in seeds], best, color=colors)
        R = reports[0].R_sep
        if math.isfinite(R):
            ax.axhline(R, color="k", linestyle="--", linewidth=0.8, label="R_sep")
            ax.legend(fontsize=8)
        ax.set_yscale("log")
    ax.set_xlabel("seed")
    ax.set_ylabel("best separation")
    ax.set_title("unlock campaign (green: separated)")
    if len(reports) > 20:
        ax.tick_params(axis="x", labelsize=6, rotation=90)
    return _save(fig, path)
