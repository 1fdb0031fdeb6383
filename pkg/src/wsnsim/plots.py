"""Comparison figures: one line per protocol variant, median over seeds."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _median_series(series_list: list[np.ndarray]) -> np.ndarray:
    """Elementwise median after padding shorter series with their last value."""
    length = max(len(s) for s in series_list)
    padded = np.stack(
        [
            np.concatenate([s, np.full(length - len(s), s[-1])]) if len(s) else np.zeros(length)
            for s in series_list
        ]
    )
    return np.median(padded, axis=0)


def plot_metric(
    series_by_variant: dict[str, list[np.ndarray]],
    ylabel: str,
    title: str,
    path,
) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for variant in sorted(series_by_variant):
        med = _median_series(series_by_variant[variant])
        style = "--" if variant.endswith("-ach") else "-"
        ax.plot(np.arange(len(med)), med, style, label=variant)
    ax.set_xlabel("round")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)
