"""Figures rendered from the same data the CLI writes as CSV.

Matplotlib is imported lazily so the library and the CSV outputs work without
it; only ``--plot`` needs it.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("plotting requires matplotlib (pip install matplotlib)") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    fig.clf()
    return path


def plot_curves(x, curves: dict, path, xlabel: str = "", ylabel: str = "", title: str = "") -> Path:
    """Line plot of one or more named curves sharing an abscissa."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in curves.items():
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_comparison(comparison, path, curve=None) -> Path:
    """Histogram heights with error bars against the reference.

    ``curve`` is an optional ``(x, y)`` pair drawn as a smooth line; the
    cell-averaged reference is always drawn as dots.
    """
    plt = _pyplot()
    h = comparison.hist
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(h.centers, h.heights, width=h.widths, alpha=0.35, color="tab:blue",
           edgecolor="none", label=f"sample ({h.total} eigenvalues)")
    ax.errorbar(h.centers, h.heights, yerr=h.errors, fmt="none", ecolor="tab:blue", lw=0.8)
    ax.plot(h.centers, comparison.reference_heights, "o", ms=3, color="tab:red",
            label=f"{comparison.reference} (cell average)")
    if curve is not None:
        ax.plot(curve[0], curve[1], "-", color="k", lw=1, label=comparison.reference)
    ax.set_xlabel({"im": "Im z", "r": "|z|"}[comparison.region.variable])
    ax.set_ylabel("density")
    p = comparison.pvalue
    ax.set_title(f"{comparison.region.kind}: chi2={comparison.chi2:.1f}, dof={comparison.dof}"
                 + ("" if p is None else f", p={p:.3g}"))
    ax.legend(fontsize=8)
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_sphere(points: np.ndarray, path, rings: list[np.ndarray] = (), max_points: int = 20000) -> Path:
    """Scatter of unit-sphere points with boundary rings."""
    plt = _pyplot()
    pts = np.asarray(points)
    if len(pts) > max_points:
        pts = pts[np.linspace(0, len(pts) - 1, max_points).astype(int)]
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=0.5, c="tab:red", alpha=0.5, depthshade=False)
    for ring in rings:
        ax.plot(ring[:, 0], ring[:, 1], ring[:, 2], color="tab:blue", lw=2)
    ax.set_box_aspect((1, 1, 1))
    for setter in (ax.set_xlim, ax.set_ylim, ax.set_zlim):
        setter(-1, 1)
    ax.set_axis_off()
    out = _save(fig, path)
    plt.close(fig)
    return out
