"""Figure rendering for the experiment tables.

Every function takes already-computed rows and writes a PNG next to the
delimited output; nothing here recomputes geometry.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_lens_table(rows: list[dict], path) -> None:
    ns = [row["n"] for row in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    ax1.plot(ns, [r["ecc_d_measured"] for r in rows], "o-", label="ecc d (measured)")
    ax1.plot(ns, [r["ecc_d_analytic"] for r in rows], "k--", label="ecc d (analytic)")
    ax1.plot(ns, [r["ecc_dprime_measured"] for r in rows], "s-", label="ecc d' (measured)")
    ax1.plot(ns, [r["ecc_dprime_analytic"] for r in rows], "k:", label="ecc d' (analytic)")
    ax1.set_xlabel("n")
    ax1.set_ylabel("eccentricity")
    ax1.set_title("lens eccentricity growth")
    ax1.legend(fontsize=8)
    ax2.plot(ns, [r["quasiball_d"] for r in rows], "o-", label="quasi-ball defect d")
    ax2.plot(ns, [r["quasiball_dprime"] for r in rows], "s-", label="quasi-ball defect d'")
    ax2.set_xlabel("n")
    ax2.set_ylabel("defect")
    ax2.set_title("quasi-ball defect growth")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_grid_table(rows: list[dict], path) -> None:
    sides = [row["side"] for row in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(sides, [r["delta_d"] for r in rows], "o-", label="delta (d)")
    ax.plot(sides, [r["delta_dprime"] for r in rows], "s-", label="delta (d')")
    ax.set_xlabel("grid side")
    ax.set_ylabel("four-point defect")
    ax.set_title("grid defect: growth vs saturation")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_horizon(L: float, C: float, k1: float, k2: float, d_star: float, path) -> None:
    D = np.linspace(0.0, 1.25 * d_star, 400)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(D, np.expm1(D), label="exp(D) - 1")
    ax.plot(D, k1 * D + k2, label=f"{k1:g} D + {k2:g}")
    ax.axvline(d_star, color="k", linestyle="--", linewidth=1, label=f"D* = {d_star:.4f}")
    ax.set_xlabel("D")
    ax.set_ylabel("length bound")
    ax.set_title(f"horizon for L={L:g}, C={C:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
