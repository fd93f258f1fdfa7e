"""Matplotlib rendering of reports and replication tables.

Every renderer returns a Figure; :func:`save_figure` writes it next to the
delimited output. The Agg backend is forced so rendering works headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dl import Variant  # noqa: E402
from .report import MetabloxReport  # noqa: E402

VARIANT_COLORS = {
    "ndc": "#4c72b0",
    "dc": "#55a868",
    "pp_uniform": "#c44e52",
    "pp_nonuniform": "#8172b2",
}

_BEST_EDGE = "#d62728"


def save_figure(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=200, bbox_inches="tight")
    plt.close(fig)
    return path


def _rows_where(rows, **conditions):
    out = rows
    for key, value in conditions.items():
        out = [r for r in out if r[key] == value]
    return out


def _values(rows, column):
    return np.array([r[column] for r in rows if r[column] is not None], dtype=float)


def plot_report(report: MetabloxReport, title: str = "") -> plt.Figure:
    """Bar chart of gamma per variant, with the best-compressing variant marked."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    keys, gammas, colors, edges = [], [], [], []
    for variant, outcome in report.outcomes.items():
        keys.append(variant.tag)
        gammas.append(outcome.gamma if outcome.gamma is not None else np.nan)
        colors.append(VARIANT_COLORS.get(variant.key, "#999999"))
        best = report.best_compressing_variant is variant
        edges.append(_BEST_EDGE if best else "none")
    xs = np.arange(len(keys))
    bars = ax.bar(xs, gammas, color=colors, edgecolor=edges, linewidth=2.0)
    for x, g, bar in zip(xs, gammas, bars):
        if np.isnan(g):
            ax.text(x, 0.05, "undefined", ha="center", va="bottom", rotation=90,
                    fontsize=8, color="#666666")
    ax.axhline(1.0, color="#444444", linestyle="--", linewidth=1.0)
    ax.set_xticks(xs)
    ax.set_xticklabels(keys)
    ax.set_ylabel(r"$\gamma$")
    if title:
        ax.set_title(title, fontsize=10)
    ax.annotate("relevance threshold", xy=(len(keys) - 0.5, 1.0),
                xytext=(0, 4), textcoords="offset points",
                ha="right", fontsize=7, color="#444444")
    fig.tight_layout()
    return fig


def plot_gamma_vs_rho(rows, pvalue_variant: str = "dc") -> plt.Figure:
    """Correlation sweep: gamma per variant and the permutation p-value."""
    kinds = sorted({r["metadata_kind"] for r in rows})
    fig, axes = plt.subplots(1, len(kinds), figsize=(5.0 * len(kinds), 3.4),
                             sharey=True, squeeze=False)
    for ax, kind in zip(axes[0], kinds):
        sub = _rows_where(rows, metadata_kind=kind)
        variants = sorted({r["variant"] for r in sub})
        for tag in variants:
            vrows = sorted(_rows_where(sub, variant=tag), key=lambda r: r["rho"])
            rho = [r["rho"] for r in vrows if r["gamma"] is not None]
            gam = [r["gamma"] for r in vrows if r["gamma"] is not None]
            key = tag.replace("-", "_")
            ax.plot(rho, gam, "o-", ms=3, lw=1,
                    color=VARIANT_COLORS.get(key, "#999999"),
                    label=rf"$\gamma^{{{tag}}}$")
        pv = sorted(_rows_where(sub, variant=pvalue_variant), key=lambda r: r["rho"])
        if pv:
            twin = ax.twinx()
            twin.plot([r["rho"] for r in pv], [r["pvalue"] for r in pv],
                      "s--", ms=3, lw=1, color="#777777", label="p-value")
            twin.set_yscale("log")
            twin.set_ylabel("permutation p-value", fontsize=8)
        ax.axhline(1.0, color="#444444", linestyle=":", linewidth=1)
        ax.set_xlabel(r"correlation $\rho$")
        ax.set_title(kind, fontsize=10)
        ax.legend(fontsize=8, loc="upper right")
    axes[0][0].set_ylabel(r"$\gamma$")
    fig.tight_layout()
    return fig


def plot_gamma_vs_size(rows) -> plt.Figure:
    """Mean gamma with 95% CI against network size, per variant and rho."""
    variants = sorted({r["variant"] for r in rows})
    rhos = sorted({r["rho"] for r in rows})
    fig, axes = plt.subplots(1, len(variants), figsize=(4.0 * len(variants), 3.2),
                             sharey=True, squeeze=False)
    for ax, tag in zip(axes[0], variants):
        for rho in rhos:
            sub = _rows_where(rows, variant=tag, rho=rho)
            sizes = sorted({r["num_nodes"] for r in sub})
            means, halfs = [], []
            for n in sizes:
                vals = _values(_rows_where(sub, num_nodes=n), "gamma")
                means.append(vals.mean())
                halfs.append(1.96 * vals.std(ddof=1) / np.sqrt(vals.size)
                             if vals.size > 1 else 0.0)
            means = np.array(means)
            halfs = np.array(halfs)
            ax.plot(sizes, means, "o-", ms=3, lw=1, label=rf"$\rho={rho}$")
            ax.fill_between(sizes, means - halfs, means + halfs, alpha=0.2)
        ax.set_title(tag, fontsize=10)
        ax.set_xlabel("N")
        ax.axhline(1.0, color="#444444", linestyle=":", linewidth=1)
    axes[0][0].set_ylabel(r"$\gamma$")
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def plot_gamma_boxes(rows, group_column: str, group_label: str) -> plt.Figure:
    """Box plots of gamma grouped by rho and a structural parameter."""
    rhos = sorted({r["rho"] for r in rows})
    groups = sorted({r[group_column] for r in rows})
    fig, axes = plt.subplots(1, len(rhos), figsize=(3.4 * len(rhos), 3.2),
                             sharey=True, squeeze=False)
    for ax, rho in zip(axes[0], rhos):
        data = [_values(_rows_where(rows, rho=rho, **{group_column: g}), "gamma")
                for g in groups]
        ax.boxplot([d for d in data], tick_labels=[str(g) for g in groups])
        ax.axhline(1.0, color="#444444", linestyle=":", linewidth=1)
        ax.set_title(rf"$\rho={rho}$", fontsize=10)
        ax.set_xlabel(group_label)
    axes[0][0].set_ylabel(r"$\gamma$")
    fig.tight_layout()
    return fig


def plot_gamma_vs_compression(rows, group_column: str, group_label: str) -> plt.Figure:
    """Scatter of gamma against edge compression, one panel per rho."""
    rhos = sorted({r["rho"] for r in rows})
    groups = sorted({r[group_column] for r in rows})
    cmap = plt.get_cmap("viridis")
    fig, axes = plt.subplots(1, len(rhos), figsize=(3.6 * len(rhos), 3.2),
                             sharey=True, squeeze=False)
    for ax, rho in zip(axes[0], rhos):
        for gi, g in enumerate(groups):
            sub = [r for r in _rows_where(rows, rho=rho, **{group_column: g})
                   if r["gamma"] is not None and r["edge_compression"] is not None]
            ax.scatter([r["edge_compression"] for r in sub],
                       [r["gamma"] for r in sub],
                       s=12, color=cmap(gi / max(1, len(groups) - 1)),
                       label=f"{group_label}={g}")
        ax.set_xlabel("edge compression c (nats/edge)")
        ax.set_title(rf"$\rho={rho}$", fontsize=10)
    axes[0][0].set_ylabel(r"$\gamma$")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    return fig


def plot_landscape(sample_points, metadata_points) -> plt.Figure:
    """Partition landscape: sampled partitions (grey) and metadata stars."""
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    if sample_points:
        xs = [p["sigma_dc"] for p in sample_points]
        ys = [p["sigma_pp"] for p in sample_points]
        ax.scatter(xs, ys, s=10, color="#888888", alpha=0.6, label="sampled partitions")
    families = sorted({p["metadata_kind"] for p in metadata_points})
    palettes = {"bicommunity": plt.get_cmap("Reds"), "core-periphery": plt.get_cmap("Blues")}
    for fam in families:
        pts = sorted((p for p in metadata_points if p["metadata_kind"] == fam),
                     key=lambda p: p["rho"])
        cmap = palettes.get(fam, plt.get_cmap("Greens"))
        for p in pts:
            ax.scatter(p["sigma_dc"], p["sigma_pp"], marker="*", s=60,
                       color=cmap(0.25 + 0.7 * p["rho"]))
        ax.scatter([], [], marker="*", s=60, color=cmap(0.8), label=f"{fam} metadata")
    ax.set_xlabel(r"$\Sigma^{dc}$ (nats)")
    ax.set_ylabel(r"$\Sigma^{pp}$ (nats)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig
