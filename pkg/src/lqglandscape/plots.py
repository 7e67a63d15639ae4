"""Figure rendering for descent traces and controller paths.

Figures are written straight to files (Agg backend, no display), so the
functions here are safe to call from the command line or headless jobs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .cost import lqg_cost  # noqa: E402
from .model import Controller, Plant, is_stabilizing  # noqa: E402

__all__ = ["save_trace_plot", "save_path_plot"]

_RC = {
    "figure.figsize": (7.0, 4.5),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


def _save(fig, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def save_trace_plot(trace, path: str | Path) -> Path:
    """Render a descent trace: cost gap on top, gradient norm below.

    Parameters
    ----------
    trace : Trace
        Result of :func:`lqglandscape.optimizer.descend`.
    path : str or Path
        Output image file; parent directories are created as needed.

    Returns
    -------
    Path
        The written file.
    """
    iters = np.array([r.iteration for r in trace.records])
    J = np.array([r.J for r in trace.records])
    g = np.array([r.grad_norm for r in trace.records])
    with plt.rc_context(_RC):
        fig, (ax_j, ax_g) = plt.subplots(2, 1, sharex=True)
        gap = J - J.min()
        if np.any(gap > 0):
            ax_j.semilogy(iters, np.maximum(gap, np.finfo(float).tiny),
                          color="tab:blue")
            ax_j.set_ylabel("J - best J")
        else:
            ax_j.plot(iters, J, color="tab:blue")
            ax_j.set_ylabel("J")
        ax_j.set_title(
            f"descent ({trace.parameterization.value}), "
            f"terminal: {trace.terminal.value}, final J = {J[-1]:.6g}")
        ax_g.semilogy(iters, np.maximum(g, np.finfo(float).tiny),
                      color="tab:red")
        ax_g.set_ylabel("gradient norm")
        ax_g.set_xlabel("iteration")
        return _save(fig, path)


def save_path_plot(plant: Plant, controllers: list[Controller],
                   path: str | Path) -> Path:
    """Render cost and stability margin along a controller path.

    Parameters
    ----------
    plant : Plant
        The plant every sampled controller is evaluated against.
    controllers : list of Controller
        Path samples, e.g. from :func:`lqglandscape.connectivity.path_between`.
    path : str or Path
        Output image file.

    Returns
    -------
    Path
        The written file.
    """
    idx = np.arange(len(controllers))
    margins = np.array([is_stabilizing(plant, K).margin
                        for K in controllers])
    costs = np.array([lqg_cost(plant, K).J if m < 0 else np.nan
                      for K, m in zip(controllers, margins)])
    with plt.rc_context(_RC):
        fig, (ax_j, ax_m) = plt.subplots(2, 1, sharex=True)
        ax_j.plot(idx, costs, color="tab:blue")
        ax_j.set_ylabel("J along path")
        ax_j.set_title(f"controller path ({len(controllers)} samples)")
        ax_m.plot(idx, margins, color="tab:red")
        ax_m.axhline(0.0, color="k", linewidth=0.8)
        ax_m.set_ylabel("stability margin")
        ax_m.set_xlabel("sample")
        return _save(fig, path)
