"""Figures written next to the CSV output of a scenario run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 0.6,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "pilotwave",
}

MAX_LINES = 60


def _save(fig: Figure, path: Path) -> Path:
    # no Software/date metadata so reruns are byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    return path


def _subset(ensemble) -> np.ndarray:
    """Indices of up to MAX_LINES trajectories spread evenly over the initial positions."""
    order = np.argsort(ensemble.initial, kind="stable")
    if order.size <= MAX_LINES:
        return order
    return order[np.linspace(0, order.size - 1, MAX_LINES).round().astype(int)]


def plot_trajectories(result, path) -> Path:
    ens = result.ensemble
    cfg = result.config
    with rc_context(STYLE):
        fig = Figure(figsize=(6.4, 3.6))
        ax = fig.add_subplot(1, 1, 1)
        for i in _subset(ens):
            color = "C0"
            if result.labels is not None:
                color = "C3" if result.labels[i] == "up" else "C0"
            ax.plot(ens.times, ens.positions[i], color=color)
        if cfg.scenario in ("double_slit", "spin_measurement"):
            ax.axhline(0.0, color="0.5", lw=0.5, ls=":")
        lo, hi = (np.percentile(ens.positions, [0.05, 99.95]) if len(ens) else (cfg.x_min, cfg.x_max))
        pad = 0.05 * (hi - lo)
        ax.set_ylim(lo - pad, hi + pad)
        ax.set_xlabel("t")
        ax.set_ylabel("x" if cfg.scenario != "spin_measurement" else "z")
        ax.set_title(f"{cfg.scenario}: {len(ens)} trajectories (seed {cfg.seed})")
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_density(result, path) -> Path:
    """|psi|^2 at each check time against the ensemble histogram."""
    ens = result.ensemble
    times = list(result.densities)
    with rc_context(STYLE):
        fig = Figure(figsize=(6.4, 1.6 * len(times)))
        axes = fig.subplots(len(times), 1, squeeze=False)[:, 0]
        for ax, t in zip(axes, times):
            rho = result.densities[t]
            ax.plot(result.x, rho, color="k", label="|psi|^2")
            if len(ens):
                xs = ens.at_time(t)
                lo, hi = np.percentile(xs, [0.05, 99.95])
                ax.hist(xs, bins=80, range=(lo, hi), density=True, color="C0", alpha=0.5, label="ensemble")
                pad = 0.1 * (hi - lo)
                ax.set_xlim(lo - pad, hi + pad)
            ax.set_ylabel(f"t = {t:.3g}")
        axes[0].legend(loc="upper right", frameon=False)
        axes[-1].set_xlabel("position")
        fig.tight_layout()
        return _save(fig, Path(path))


def render_figures(result, out_dir) -> list[Path]:
    out = Path(out_dir)
    return [
        plot_trajectories(result, out / "trajectories.png"),
        plot_density(result, out / "density.png"),
    ]
