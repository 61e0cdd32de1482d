"""Figure rendering for the CLI report paths.

Each scan/evolve command can write a matplotlib figure next to its CSV
artifact.  Rendering is intentionally plain: one axis, one line per state
population, labels P_1..P_N plus P_e for the excited state.
"""

from __future__ import annotations

import numpy as np

__all__ = ["save_population_figure"]


def _axes(path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    return plt, fig, ax


def save_population_figure(path: str, x: np.ndarray, populations: np.ndarray,
                           xlabel: str, title: str | None = None,
                           asymptotes: list | None = None,
                           logx: bool = False) -> None:
    """Plot population columns against a scan variable and save to `path`.

    `populations` has one column per state, the excited state last.
    Optional horizontal `asymptotes` are drawn as dotted guides.
    """
    plt, fig, ax = _axes(path)
    n_states = populations.shape[1]
    for j in range(n_states):
        label = f"P_{j + 1}" if j < n_states - 1 else "P_e"
        ax.plot(x, populations[:, j], lw=1.4, label=label)
    if asymptotes:
        for val in asymptotes:
            ax.axhline(val, color="0.5", lw=0.8, ls=":")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=9, ncol=2)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
