"""SVG figures of a dataset with a fitted model curve."""

from __future__ import annotations

import io
import re

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .data import Dataset, scale_x  # noqa: E402
from .model import PolynomialModel, predict  # noqa: E402

CURVE_POINTS = 400

WANTED_COLOR = "#1f77b4"
UNWANTED_COLOR = "#2ca02c"
CURVE_COLOR = "#d62728"

TITLES = {"before": "Model trained on all data", "after": "Model after unlearning"}

# Fixed hash salt and no date stamp keep the SVG bytes reproducible.
STYLE = {
    "svg.hashsalt": "emse-unlearn",
    "svg.fonttype": "path",
    "figure.figsize": (7.0, 5.0),
    "font.size": 11,
    "axes.labelsize": 12,
    "axes.titlesize": 12,
    "legend.fontsize": 10,
    "legend.frameon": False,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def curve_points(model: PolynomialModel, xs, x_range=None, n: int = CURVE_POINTS):
    """Sample the model on ``n`` evenly spaced points spanning ``[min xs, max xs]``.

    ``xs`` are raw inputs; when ``x_range`` is given the model is evaluated on
    the normalized inputs it was trained on.
    """
    xs = np.asarray(xs, dtype=np.float64)
    grid = np.linspace(xs.min(), xs.max(), n)
    u = grid if x_range is None else scale_x(grid, x_range)
    return grid, predict(model, u)


def plot_fit(ds: Dataset, model: PolynomialModel, path, x_range=None, title: str | None = None):
    """Scatter wanted/unwanted samples of raw-coordinate ``ds`` and overlay ``model``.

    The unwanted series is left out of the legend when there are no unwanted
    samples.
    """
    if ds.x_range is not None:
        raise ValueError("plot_fit expects raw x values; denormalize the dataset first")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            w = ds.wanted
            ax.scatter(ds.xs[w], ds.ys[w], s=16, color=WANTED_COLOR, label="wanted", zorder=2)
            if (~w).any():
                ax.scatter(ds.xs[~w], ds.ys[~w], s=16, color=UNWANTED_COLOR, label="unwanted", zorder=2)
            gx, gy = curve_points(model, ds.xs, x_range)
            ax.plot(gx, gy, color=CURVE_COLOR, lw=2, label=f"model (degree {model.degree})", zorder=3)
            ax.set_xlabel("x")
            ax.set_ylabel("y")
            if title:
                ax.set_title(title)
            ax.legend(loc="best")
            fig.tight_layout()
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_standalone(buf.getvalue()))
    return path


def _standalone(svg: str) -> str:
    # Drop the DOCTYPE so the document does not point at an external DTD.
    svg = re.sub(r"<!DOCTYPE[^>]*>\s*", "", svg, count=1)
    return svg.replace('standalone="no"', 'standalone="yes"', 1)
