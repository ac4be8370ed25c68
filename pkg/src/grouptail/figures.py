"""Figure rendering for the analysis and Monte Carlo report paths."""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

_DPI = 150


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", label).strip("-") or "group"


def render_analysis_figures(maxima, results, out_base) -> list:
    """One scatter per analyzed pair plus a coefficient summary bar chart.

    Files land next to the report: ``<stem>_<i1>_vs_<i2>.png`` and
    ``<stem>_coefficients.png``.  Scatter axes are the per-month group
    maxima (max over the group's columns) on the raw return scale.
    """
    out_base = Path(out_base)
    stem = out_base.parent / out_base.stem
    written = []
    for r in results:
        m1 = np.max(maxima.maxima[:, [c - 1 for c in r.cols_i1]], axis=1)
        m2 = np.max(maxima.maxima[:, [c - 1 for c in r.cols_i2]], axis=1)
        fig, ax = plt.subplots(figsize=(4.2, 4.0))
        ax.scatter(m1, m2, s=14, alpha=0.6, color="tab:blue", edgecolors="none")
        ax.set_xlabel(f"monthly max, {r.label_i1}")
        ax.set_ylabel(f"monthly max, {r.label_i2}")
        ax.set_title(f"eps = {r.eps_pair.value:.3f}  (n = {r.n})", fontsize=10)
        fig.tight_layout()
        path = Path(f"{stem}_{_slug(r.label_i1)}_vs_{_slug(r.label_i2)}.png")
        fig.savefig(path, dpi=_DPI)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    labels = [f"{r.label_i1}\nvs {r.label_i2}" for r in results]
    values = [r.eps_pair.value for r in results]
    ax.bar(range(len(results)), values, color="tab:blue", alpha=0.85)
    ax.set_xticks(range(len(results)))
    ax.set_xticklabels(labels, fontsize=7)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("extremal coefficient of dependence")
    fig.tight_layout()
    path = Path(f"{stem}_coefficients.png")
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    written.append(path)
    return written


def render_mc_figure(report, n: int, out_path) -> Path:
    """Histogram of sqrt(n)(estimate - truth)/sigma with the N(0,1) density."""
    out_path = Path(out_path)
    standardized = (
        np.sqrt(n) * (np.asarray(report.estimates) - report.truth)
        / np.sqrt(report.theory_var)
    )
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.hist(standardized, bins=40, density=True, alpha=0.65, color="tab:blue")
    grid = np.linspace(-4.0, 4.0, 401)
    ax.plot(grid, stats.norm.pdf(grid), color="black", linewidth=1.2)
    ax.set_xlabel("standardized estimate")
    ax.set_ylabel("density")
    ax.set_title(
        f"var ratio {report.var_ratio:.3f}, KS {report.ks_distance:.4f}", fontsize=10
    )
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path
