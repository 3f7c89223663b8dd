"""
SVG line plots of populations (and the entanglement measure) against time
"""

from pathlib import Path
from typing import Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from circuits.qops import basis_label, qubit_count

# Fixed salt keeps SVG element ids stable between runs
SVG_RC = {'svg.hashsalt': 'transmonsim', 'svg.fonttype': 'none'}

MARKERS = ('o', 's', 'p', '*', 'D', '^', 'v', 'x')


def plot_populations(
    path: Path,
    grid: np.ndarray,
    populations: np.ndarray,
    title: str,
    measure: Optional[np.ndarray] = None,
    measure_label: str = '',
    stderr: Optional[np.ndarray] = None,
    labels: Optional[Sequence[str]] = None,
) -> Path:
    """
    Write populations vs t as SVG.

    Args:
        path: output .svg path
        grid: times
        populations: shape (len(grid), 2**n)
        title: figure title
        measure: optional series drawn dashed on the same axes
        measure_label: legend label of the measure
        stderr: optional standard errors drawn as bands
        labels: basis labels; defaults to all basis states

    Returns:
        The written path
    """
    n = qubit_count(populations.shape[1])
    labels = list(labels) if labels is not None else [basis_label(k, n) for k in range(2 ** n)]
    markevery = max(1, len(grid) // 20)

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(8, 5))
        for k in range(populations.shape[1]):
            series = populations[:, k]
            if np.max(np.abs(series)) < 1e-6:
                continue
            ax.plot(
                grid, series,
                marker=MARKERS[k % len(MARKERS)], markevery=markevery, markersize=4,
                label=f'|{labels[k]}>',
            )
            if stderr is not None:
                ax.fill_between(grid, series - stderr[:, k], series + stderr[:, k], alpha=0.2)
        if measure is not None:
            ax.plot(grid, measure, linestyle='--', color='black', label=measure_label)

        ax.set_xlabel('t')
        ax.set_ylabel('population')
        ax.set_title(title)
        ax.set_xlim(grid[0], grid[-1])
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc='best')
        plt.tight_layout()

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        plt.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    return path
