"""
Visualizer Module
Clock heat maps and per-node clock offsets for execution traces
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .engine import Trace


class TraceVisualizer:
    """Creates visualizations for a single execution trace"""

    def __init__(self, trace: Trace, title: str = ""):
        """
        Initialize visualizer

        Args:
            trace: Execution to draw
            title: Figure title, usually the algorithm and graph labels
        """
        self.trace = trace
        self.title = title or trace.algorithm.name

    def offsets(self) -> np.ndarray:
        """(C_i(t) - t) mod P; a synchronized suffix is a constant column block."""
        rounds = np.arange(self.trace.horizon + 1)
        return (self.trace.clocks - rounds[np.newaxis, :]) % self.trace.period

    def plot_clocks(self, save_path=None):
        """Plot the clock matrix and the clock offsets"""
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(14, 8), sharex=True,
                                       gridspec_kw={"height_ratios": [1, 1]})

        im = ax1.imshow(self.trace.clocks, aspect="auto", cmap="viridis",
                        interpolation="nearest", vmin=0, vmax=self.trace.period - 1)
        ax1.set_title(f"{self.title} - clocks", fontsize=16, fontweight="bold")
        ax1.set_ylabel("Node", fontsize=12)
        fig.colorbar(im, ax=ax1, label="C_i(t)")

        offsets = self.offsets()
        for i in range(self.trace.n):
            ax2.step(np.arange(self.trace.horizon + 1), offsets[i], where="post",
                     alpha=0.7, linewidth=1.5, label=f"node {i}" if self.trace.n <= 10 else None)
        ax2.set_ylabel("(C_i(t) - t) mod P", fontsize=12)
        ax2.set_xlabel("Round", fontsize=12)
        ax2.set_yticks(range(self.trace.period))
        ax2.grid(True, alpha=0.3)
        if self.trace.n <= 10:
            ax2.legend(loc="best", fontsize=8)

        plt.tight_layout()

        if save_path:
            plt.savefig(save_path, dpi=150, bbox_inches="tight")
        return fig
