"""Figure rendering for CLI reports.

Renders PNG companions next to the delimited outputs when requested.
All figures use the non-interactive Agg backend so runs work headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .simulate import HeatmapGrid, MonteCarloResult, Scenario, SweepResult

__all__ = ["render_sweep", "render_montecarlo", "render_heatmap"]


def render_sweep(result: SweepResult, path: str) -> None:
    """Mean error versus noise power, one curve per antenna count."""
    counts = sorted({p.pa_count for p in result.points})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for count in counts:
        series = sorted(
            (p for p in result.points if p.pa_count == count),
            key=lambda p: p.noise_dbm,
        )
        ax.plot(
            [p.noise_dbm for p in series],
            [p.mean_error for p in series],
            marker="o",
            label=f"I = {count}",
        )
    ax.set_xlabel("noise power (dBm)")
    ax.set_ylabel("mean positioning error (m)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_montecarlo(result: MonteCarloResult, path: str) -> None:
    """Histogram of per-trial positioning errors with summary stats."""
    errors = np.array([t.error for t in result.trials])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(errors, bins=40, color="tab:blue", alpha=0.8)
    summary = result.summary
    ax.axvline(summary.mean_error, color="tab:red", linestyle="--",
               label=f"mean = {summary.mean_error:.3f} m")
    ax.set_xlabel("positioning error (m)")
    ax.set_ylabel("trials")
    ax.set_title(f"I = {summary.pa_count}, noise = {summary.noise_dbm:g} dBm, "
                 f"variance = {summary.variance:.3f}")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_heatmap(grid: HeatmapGrid, scenario: Scenario, path: str) -> None:
    """Normalized spatial error map with antenna positions marked."""
    room = scenario.room
    fig, ax = plt.subplots(figsize=(4.0, 6.0))
    image = ax.imshow(
        grid.normalized,
        origin="lower",
        extent=(0.0, room.d1, 0.0, room.d2),
        aspect="equal",
        cmap="jet",
        vmin=0.0,
        vmax=1.0,
    )
    pa_ys = scenario.pa_layout.y_positions
    ax.plot([0.0] * len(pa_ys), pa_ys, linestyle="none", marker="*",
            markersize=12, color="white", markeredgecolor="black")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    fig.colorbar(image, ax=ax, label="normalized error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
