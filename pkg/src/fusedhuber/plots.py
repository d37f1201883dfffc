"""Figure rendering for the CLI report paths.

Every function writes a PNG next to the delimited output and returns the
path.  matplotlib's Agg backend is forced so rendering works headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def coefficient_profile(path, beta_star, fits: dict, title: str = "") -> Path:
    """Truth (circles) vs fitted coefficient profiles (crosses)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 4))
    idx = range(1, len(beta_star) + 1)
    ax.plot(idx, beta_star, "o", mfc="none", label="truth", color="k", ms=4)
    for name, beta in fits.items():
        ax.plot(range(1, len(beta) + 1), beta, "+", label=name, ms=5)
    ax.set_xlabel("coefficient index")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def residual_history(path, history, tol: float | None = None, title: str = "") -> Path:
    """KKT residual (max of the five components) per iteration, log scale."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy([r.res for r in history], lw=1)
    if tol is not None:
        ax.axhline(tol, ls="--", color="r", lw=0.8, label=f"tol = {tol:g}")
        ax.legend()
    ax.set_xlabel("iteration")
    ax.set_ylabel("KKT residual")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def kurtosis_histogram(path, values, title: str = "") -> Path:
    """Histogram of per-column kurtosises with the normal reference at 3."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=40, color="steelblue", edgecolor="white")
    ax.axvline(3.0, color="k", lw=2, label="normal (3)")
    ax.axvline(9.0, color="r", lw=1, ls="--", label="severe (9)")
    ax.set_xlabel("kurtosis")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def score_scatter(path, table, title: str = "") -> Path:
    """Validation MAE across the tuning grid, one point per combination."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [row["lambda1"] for row in table]
    ys = [row["mae"] for row in table]
    cs = [row["lambda2"] for row in table]
    sc = ax.scatter(xs, ys, c=cs, cmap="viridis", s=18)
    ax.set_xscale("log")
    ax.set_xlabel("lambda1")
    ax.set_ylabel("validation MAE")
    fig.colorbar(sc, ax=ax, label="lambda2")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
