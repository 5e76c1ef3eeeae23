"""Matplotlib renderings of the simulated data products (PNG files)."""

from __future__ import annotations

from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_power_scan_figure(result, path) -> None:
    """Log-log singles and four-fold rates vs pump power with fitted slopes."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.5))
    p = np.asarray(result.powers_mw)
    ax1.loglog(p, result.singles_hz, "o", color="tab:blue")
    ax1.loglog(
        p,
        result.singles_hz[0] * (p / p[0]) ** result.singles_exponent,
        "-",
        color="tab:blue",
        alpha=0.5,
        label=f"slope {result.singles_exponent:.2f}",
    )
    ax1.set_xlabel("pump power (mW)")
    ax1.set_ylabel("singles rate (Hz)")
    ax1.legend(frameon=False)

    ax2.loglog(p, result.fourfold_hz, "s", color="tab:red", label="zero delay")
    ax2.loglog(
        p, result.fourfold_delayed_hz, "^", color="tab:gray", label="delayed"
    )
    ax2.loglog(
        p,
        result.fourfold_hz[0] * (p / p[0]) ** result.fourfold_exponent,
        "-",
        color="tab:red",
        alpha=0.5,
        label=f"slope {result.fourfold_exponent:.2f}",
    )
    ax2.set_xlabel("pump power (mW)")
    ax2.set_ylabel("4-fold rate (Hz)")
    ax2.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(
    theory: Dict[str, Dict[str, float]],
    simulated: Optional[Dict[str, Dict[str, float]]] = None,
    path="fig3.png",
) -> None:
    """Joint detection probabilities per basis; theory boxes, simulated bars."""
    fig, axes = plt.subplots(
        1, len(theory), figsize=(4 * len(theory), 3.2), sharey=True,
        layout="constrained",
    )
    if len(theory) == 1:
        axes = [axes]
    for ax, (name, table) in zip(axes, theory.items()):
        labels = list(table)
        x = np.arange(len(labels))
        if simulated is not None and name in simulated:
            sim = [simulated[name][lab] for lab in labels]
            ax.bar(x, sim, color="0.7", label="simulated")
        ax.bar(
            x,
            [table[lab] for lab in labels],
            fill=False,
            edgecolor="black",
            linewidth=1.0,
            label="theory",
        )
        ax.set_xticks(x)
        ax.set_xticklabels(labels, rotation=90, fontsize=6)
        ax.set_title(name)
    axes[0].set_ylabel("joint probability")
    axes[-1].legend(frameon=False, fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_density_matrix_figure(rho: np.ndarray, path, zmax: float = 0.3) -> None:
    """Modulus of the 16x16 density matrix as a 3d bar plot."""
    rho = np.asarray(rho)
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    n = rho.shape[0]
    xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    heights = np.abs(rho).ravel()
    ax.bar3d(
        xs.ravel() - 0.4,
        ys.ravel() - 0.4,
        np.zeros(n * n),
        0.8,
        0.8,
        heights,
        color=plt.cm.viridis(np.clip(heights / zmax, 0, 1)),
        shade=True,
    )
    labels = [format(i, "04b").replace("0", "R").replace("1", "L") for i in range(n)]
    ax.set_xticks(np.arange(n))
    ax.set_xticklabels(labels, rotation=90, fontsize=5)
    ax.set_yticks(np.arange(n))
    ax.set_yticklabels(labels, rotation=-30, fontsize=5)
    ax.set_zlim(0, zmax)
    ax.set_zlabel(r"$|\rho|$")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
