"""Figure rendering for run reports: conservation, field norms, snapshots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_conservation_figure(records, path: Path) -> None:
    t = np.array([r.t for r in records])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for attr, label in (
        ("mass_dev", "mass"),
        ("momentum_dev", "momentum"),
        ("energy_dev", "energy"),
    ):
        dev = np.abs([getattr(r, attr) for r in records])
        ax.semilogy(t, np.maximum(dev, 1e-18), label=label, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("|relative deviation|")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_field_figure(records, path: Path) -> None:
    t = np.array([r.t for r in records])
    e2 = np.array([r.e_l2 for r in records])
    emax = np.array([r.e_max for r in records])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogy(t, np.maximum(e2, 1e-18), label=r"$E_2$", lw=1.0)
    ax.semilogy(t, np.maximum(emax, 1e-18), label=r"$E_{max}$", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("electric field norm")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_snapshot_figure(f_xv: np.ndarray, x_grid: np.ndarray, v_grid: np.ndarray,
                         t: float, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    img = ax.imshow(
        f_xv.T,
        origin="lower",
        aspect="auto",
        extent=(x_grid[0], x_grid[-1], v_grid[0], v_grid[-1]),
        cmap="viridis",
    )
    fig.colorbar(img, ax=ax, label="f(x, v)")
    ax.set_xlabel("x")
    ax.set_ylabel("v")
    ax.set_title(f"t = {t:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence_figure(rows, path: Path) -> None:
    """rows: (degree, n_cells, error, order) tuples."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    degrees = sorted({r[0] for r in rows})
    for deg in degrees:
        pts = sorted((r[1], r[2]) for r in rows if r[0] == deg)
        n = np.array([p[0] for p in pts], dtype=float)
        err = np.array([p[1] for p in pts])
        ax.loglog(n, err, "o-", label=f"degree {deg}")
        ax.loglog(n, err[0] * (n[0] / n) ** (deg + 1), "k--", alpha=0.4, lw=0.8)
    ax.set_xlabel("cells")
    ax.set_ylabel("L2 error")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
