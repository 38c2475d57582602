"""FER/BER versus Eb/N0 figures rendered to SVG."""

import logging
from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from pydantic import BaseModel, ConfigDict

from ..core.exceptions import DomainError
from .result import SimResult

logger = logging.getLogger(__name__)

MARKERS = ("o", "s", "^", "v", "D", "P", "X", "<", ">", "*")
SVG_HASHSALT = "unicodec"


class FigureStyle(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    title: Optional[str] = None
    metric: Literal["fer", "ber"] = "fer"
    xlabel: str = "Eb/N0 [dB]"
    ylabel: Optional[str] = None
    width: float = 6.4
    height: float = 4.8
    ylim: Optional[tuple[float, float]] = None
    show_ci: bool = True
    grid: bool = True
    font_size: float = 10.0


# reference coordinates per series label, drawn as bare markers
References = dict[str, Sequence[tuple[float, float]]]


def _series(result: SimResult, metric: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([p.ebn0_db for p in result.points], dtype=float)
    y = np.array([(p.fer if metric == "fer" else (p.ber or 0.0)) for p in result.points], dtype=float)
    # zero error rates have no place on a log axis
    keep = y > 0
    return x[keep], y[keep]


def render_figure(results: Sequence[SimResult], path: Union[str, Path], bound: Optional[SimResult] = None,
                  style: Optional[FigureStyle] = None, references: Optional[References] = None) -> Path:
    """Draw one series per scheme on a log-scale error-rate axis and save it as SVG.

    Args:
        results: Simulation results; entries with ``kind="bound"`` are drawn like ``bound``.
        path: Output file.
        bound: Reference curve, drawn as a line without markers. Skipped on BER figures.
        style: Figure options.
        references: Published points per label, overlaid as unconnected markers.

    Returns:
        The written path. Identical input gives a byte-identical file.
    """
    results = list(results)
    if not results and bound is None:
        raise DomainError("nothing to plot")
    style = style or FigureStyle()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    rc = {"svg.hashsalt": SVG_HASHSALT, "font.size": style.font_size, "svg.fonttype": "path"}
    with matplotlib.rc_context(rc):
        # pyplot-free: no global figure registry, no GUI backend
        fig = Figure(figsize=(style.width, style.height))
        ax = fig.add_subplot()
        curves = [r for r in results if r.kind == "simulation"]
        bounds = [r for r in results if r.kind == "bound"] + ([bound] if bound is not None else [])
        for i, result in enumerate(curves):
            x, y = _series(result, style.metric)
            color = f"C{i % 10}"
            ax.plot(x, y, marker=MARKERS[i % len(MARKERS)], color=color, linewidth=1.5, markersize=5,
                    label=result.scheme)
            if style.show_ci and style.metric == "fer":
                shown = [p for p in result.points if p.fer > 0 and p.ci_low is not None and p.ci_high is not None]
                if len(shown) == x.size and x.size:
                    lo = np.array([p.ci_low for p in shown])
                    hi = np.array([p.ci_high for p in shown])
                    ax.errorbar(x, y, yerr=[y - lo, hi - y], fmt="none", ecolor=color, elinewidth=0.8, capsize=2)
        # bounds are block-error curves
        for result in bounds if style.metric == "fer" else []:
            x, y = _series(result, "fer")
            ax.plot(x, y, color="black", linewidth=1.2, label=result.scheme)
        for j, (label, points) in enumerate(sorted((references or {}).items())):
            if not points:
                continue
            px, py = zip(*points)
            ax.plot(px, py, linestyle="none", marker=MARKERS[j % len(MARKERS)], markerfacecolor="none",
                    color="gray", markersize=6, label=f"{label} (ref.)")

        ax.set_yscale("log")
        ax.set_xlabel(style.xlabel)
        ax.set_ylabel(style.ylabel or style.metric.upper())
        if style.ylim:
            ax.set_ylim(*style.ylim)
        if style.title:
            ax.set_title(style.title)
        if style.grid:
            ax.grid(True, which="both", linewidth=0.4, alpha=0.6)
        ax.legend(fontsize=style.font_size * 0.8, loc="lower left")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.debug("wrote %s", path)
    return path
