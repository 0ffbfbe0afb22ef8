"""Plots of evaluation results and flow sequences

NB: the pixel content of generated plots is not checked by the unit tests.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from matplotlib import pyplot as plt
from upath import UPath

from mexformer.evaluation.confusion import ConfusionMatrix
from mexformer.flow.flow_field import FlowField
from mexformer.io import file_io


def confusion_fractions(cm: ConfusionMatrix) -> np.ndarray:
    """Counts divided by their row totals; rows without samples stay zero."""
    counts = cm.counts.astype(np.float64)
    support = counts.sum(axis=1, keepdims=True)
    return np.divide(counts, support, out=np.zeros_like(counts), where=support > 0)


def plot_confusion_matrix(cm: ConfusionMatrix, normalize: bool = False, title: str = "", **kwargs):
    """Draw a confusion matrix as a heat map, one annotated cell per (true, predicted) pair.

    Args:
        cm: matrix to display
        normalize: colour and label cells by row fraction instead of count
        title: heading for the plot
        **kwargs: passed on to ``imshow``

    Returns:
        the matplotlib figure and axes
    """
    values = confusion_fractions(cm) if normalize else cm.counts
    fig, ax = plt.subplots(figsize=(1.2 * cm.class_count + 2, 1.2 * cm.class_count + 1))
    kwargs.setdefault("cmap", "Blues")
    if normalize:
        kwargs.setdefault("vmin", 0.0)
        kwargs.setdefault("vmax", 1.0)
    image = ax.imshow(values, **kwargs)
    plt.colorbar(image, ax=ax)
    ticks = np.arange(cm.class_count)
    ax.set_xticks(ticks, labels=list(cm.class_names), rotation=45, ha="right")
    ax.set_yticks(ticks, labels=list(cm.class_names))
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    for row in range(cm.class_count):
        for column in range(cm.class_count):
            text = f"{values[row, column]:.2f}" if normalize else str(values[row, column])
            ax.text(column, row, text, ha="center", va="center")
    ax.set_title(title)
    fig.tight_layout()
    return fig, ax


def plot_flow_magnitudes(
    fields: Sequence[FlowField], apex_index: Optional[int] = None, title: str = "", **kwargs
):
    """Mean flow magnitude of each field in a clip, with the apex position marked.

    Args:
        fields: flow fields in frame order
        apex_index: position of the apex within ``fields``
        title: heading for the plot
        **kwargs: passed on to ``plot``

    Raises:
        ValueError: for an empty sequence or an apex outside it
    """
    if len(fields) == 0:
        raise ValueError("no flow fields to plot")
    if apex_index is not None and not 0 <= apex_index < len(fields):
        raise ValueError(f"apex index {apex_index} outside [0, {len(fields)})")
    magnitudes = [float(np.mean(np.hypot(field.u, field.v))) for field in fields]
    fig, ax = plt.subplots()
    ax.plot(np.arange(len(fields)), magnitudes, marker="o", **kwargs)
    if apex_index is not None:
        ax.axvline(apex_index, color="tab:red", linestyle="--", label="apex")
        ax.legend()
    ax.set_xlabel("frame position")
    ax.set_ylabel("mean flow magnitude (px)")
    ax.set_title(title)
    return fig, ax


def save_figure(fig, file_pointer: str | Path | UPath, dpi: int = 150):
    """Write a figure as PNG and release it."""
    file_path = file_io.get_upath(file_pointer)
    with file_path.open("wb") as _file:
        fig.savefig(_file, format="png", dpi=dpi, bbox_inches="tight")
    plt.close(fig)
