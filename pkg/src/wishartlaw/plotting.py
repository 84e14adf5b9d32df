"""Figure rendering for the CLI report paths.

Every renderer writes a PNG next to the delimited data it illustrates; the
CLI calls these unless --no-plot is given.  The Agg backend keeps rendering
headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectra import HistogramResult

_FIGSIZE = (6.4, 4.0)
_DPI = 150


def render_curves(
    path: str,
    x: np.ndarray,
    curves: dict[str, np.ndarray],
    xlabel: str = "x",
    ylabel: str = "density",
    title: str | None = None,
) -> str:
    """Line plot of one or more curves over a common grid."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, y in curves.items():
        ax.plot(x, y, lw=1.5, label=label)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_histogram_overlay(
    path: str,
    hist: HistogramResult,
    curves: dict[str, tuple[np.ndarray, np.ndarray]] | None = None,
    title: str | None = None,
) -> str:
    """Spectral histogram with optional theoretical overlays (the Figure-1
    style comparison)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(
        hist.centers,
        hist.density,
        width=hist.width,
        color="0.8",
        edgecolor="0.55",
        linewidth=0.3,
        label="empirical",
    )
    for label, (x, y) in (curves or {}).items():
        ax.plot(x, y, lw=1.6, label=label)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_curve_with_band(
    path: str,
    x: np.ndarray,
    y: np.ndarray,
    stderr: np.ndarray | None = None,
    label: str = "population dynamics",
    title: str | None = None,
) -> str:
    """Curve with a +-2 stderr band, for Monte Carlo estimates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(x, y, lw=1.5, label=label)
    if stderr is not None:
        err = 2.0 * np.asarray(stderr, dtype=float)
        ax.fill_between(x, y - err, y + err, alpha=0.25, linewidth=0)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
