"""PNG figures for CLI runs (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_front(path, phi, w, aw, history=None, title=""):
    ncols = 2 if history else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.0 * ncols, 3.6), squeeze=False)
    ax = axes[0, 0]
    ax.plot(phi, w, label="W")
    ax.plot(phi, aw, "--", label="AW")
    ax.set_xlim(-6, 6)
    ax.set_xlabel("phi")
    ax.legend()
    ax.set_title(title)
    if history:
        ax = axes[0, 1]
        res = np.array([h.residual for h in history])
        ax.semilogy(np.maximum(res, 1e-300), label="residual")
        ax.set_xlabel("iteration")
        ax2 = ax.twinx()
        ax2.plot([h.action for h in history], color="C1", label="action")
        ax.set_ylabel("residual")
        ax2.set_ylabel("action")
    return _save(fig, path)


def plot_curves(path, curves, bounds=None, title=""):
    fig, ax = plt.subplots(figsize=(4.6, 4.4))
    for c in curves:
        a = c.array
        if a.size:
            ax.plot(a[:, 0], a[:, 1], "-", lw=1.5)
        ax.plot([c.seed], [c.seed], "k.", ms=4)
    if bounds is not None and all(np.isfinite(bounds)):
        ax.plot(bounds, bounds, ":", color="0.6", lw=0.8)
        ax.set_xlim(bounds)
        ax.set_ylim(bounds)
    ax.set_xlabel("r-")
    ax.set_ylabel("r+")
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save(fig, path)


def plot_potential(path, np_, title=""):
    w = np.linspace(-1.0, 1.0, 401)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    axes[0].plot(w, np_.derivative(w, 1), label="Phi'")
    axes[0].plot(w, w, ":", color="0.5", label="identity")
    axes[0].legend()
    axes[0].set_xlabel("w")
    g = np_.derivative(-1.0) - np_.derivative(w) + 0.5 * w * w - 0.5
    axes[1].plot(w, g)
    axes[1].axhline(0.0, color="0.6", lw=0.8)
    axes[1].set_xlabel("w")
    axes[1].set_ylabel("g(w)")
    fig.suptitle(title)
    return _save(fig, path)


def plot_snapshots(path, snapshots, window=60):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for s in snapshots:
        alpha = np.arange(s.n_atoms - 1) - s.origin
        ax.plot(alpha, s.strains, lw=1, label=f"t={s.time:g}")
    fronts = [int(np.argmax(np.abs(np.diff(s.strains)))) - s.origin for s in snapshots]
    ax.set_xlim(min(fronts) - window, max(fronts) + window)
    ax.set_xlabel("alpha - N/2")
    ax.set_ylabel("strain")
    if len(snapshots) <= 6:
        ax.legend(fontsize=7)
    return _save(fig, path)
