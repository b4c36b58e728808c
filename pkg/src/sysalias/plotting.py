"""Static picture of eigenvalue locations against the no-aliasing strip."""

from __future__ import annotations

import math

import numpy as np


def plot_strip(matrices: dict, h: float, path) -> None:
    """Scatter eigenvalues of each matrix and shade ``|Im z| < pi/h``.

    ``matrices`` maps a legend label to a square matrix.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    bound = math.pi / h
    ax.axhspan(-bound, bound, color="tab:green", alpha=0.12, label=r"$|\mathrm{Im}\,z| < \pi/h$")
    ax.axhline(bound, color="tab:green", lw=0.8)
    ax.axhline(-bound, color="tab:green", lw=0.8)
    for (label, M), marker in zip(matrices.items(), "xo+sd^v"):
        w = np.linalg.eigvals(np.asarray(M))
        ax.scatter(w.real, w.imag, marker=marker, label=label)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
