"""Canned experiments that regenerate the three comparison figures.

``fig1``: N=256, rate 1/2. ``fig2``: about 64k bits, rate 1/2. ``fig3``: about 64k bits,
rate 8/9. Quick mode keeps every scheme but shrinks SNR grids and frame counts so a run
finishes in minutes.
"""

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..bounds import bound_result
from ..core.config import Config
from ..core.exceptions import ConfigError
from ..core.types import SeedSpec
from .config import ExperimentConfig, SchemeDescriptor, StopRule
from .export import export_csv, export_json
from .plot import FigureStyle, render_figure
from .result import SimResult
from .runner import run_experiment

logger = logging.getLogger(__name__)

FIGURES = ("fig1", "fig2", "fig3")
MASTER_SEED = 0x5EED_2025

QUICK_STOP = StopRule(min_frame_errors=10, max_frames=200)
QUICK_STOP_LONG = StopRule(min_frame_errors=3, max_frames=6)


class FigurePlan(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    title: str
    experiments: list[ExperimentConfig]
    bound_n: int
    bound_k: int
    bound_grid: list[float]
    references: dict[str, list[tuple[float, float]]] = {}
    # published BER points; when present a second BER figure is drawn
    ber_references: dict[str, list[tuple[float, float]]] = {}


@dataclass
class FigureOutputs:
    csv: Path
    json: Path
    svg: Path
    results: list[SimResult]
    ber_svg: Optional[Path] = None


def reference_points(figure: str) -> dict[str, list[tuple[float, float]]]:
    """Published (Eb/N0, error rate) coordinates per scheme label.

    ``<figure>`` holds FER points and ``<figure>_ber`` BER points.
    """
    text = resources.files("unicodec").joinpath("data/reference_points.json").read_text()
    data = json.loads(text)
    return {label: [tuple(p) for p in points] for label, points in data.get(figure, {}).items()}


def _grid(lo: float, hi: float, step: float) -> list[float]:
    return [round(float(x), 4) for x in np.arange(lo, hi + step / 2, step)]


def _experiment(name: str, label: str, family: str, params: dict, snr: list[float], stop: StopRule,
                stream: int) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        scheme=SchemeDescriptor(family=family, label=label, params=params),
        snr_points=snr,
        stop=stop,
        seed=SeedSpec(master_seed=MASTER_SEED, stream_id=stream),
    )


def _fig1(quick: bool) -> FigurePlan:
    stop = QUICK_STOP if quick else StopRule()
    snr = [2.0, 3.0] if quick else _grid(1.0, 4.5, 0.5)
    experiments = [
        _experiment("fig1-polar-sc", "Polar SC", "polar-sc", {"N": 256, "K": 128}, snr, stop, 1),
        _experiment("fig1-ldpc-5g", "LDPC 5G LBP-8", "ldpc-bp",
                    {"code": "nr-bg2", "K": 128, "N": 256, "bp": {"max_iterations": 8}}, snr, stop, 2),
        _experiment("fig1-polar-aed", "Polar AE-SC-8", "polar-aed",
                    {"N": 256, "K": 128, "i_min": [31, 57], "ensemble_size": 8}, snr, stop, 3),
        _experiment("fig1-polar-scl", "Polar 5G CA-SCL-8", "polar-scl",
                    {"N": 256, "K": 128, "crc": "crc11", "list_size": 8},
                    snr if quick else _grid(1.0, 4.0, 0.5), stop, 4),
    ]
    return FigurePlan(name="fig1", title="N=256, R=1/2", experiments=experiments, bound_n=256, bound_k=128,
                      bound_grid=_grid(0.0, 3.9, 0.1), references=reference_points("fig1"))


def _fig2(quick: bool) -> FigurePlan:
    stop = QUICK_STOP_LONG if quick else StopRule()
    lbp8 = {"max_iterations": 8}
    experiments = [
        _experiment("fig2-dvbs2-lbp8", "LDPC DVB-S2 LBP-8", "ldpc-bp", {"code": "dvbs2", "rate": "1/2", "bp": lbp8},
                    [1.9] if quick else _grid(1.4, 2.1, 0.1), stop, 1),
        _experiment("fig2-dvbs2-lbp32", "LDPC DVB-S2 LBP-32", "ldpc-bp",
                    {"code": "dvbs2", "rate": "1/2", "bp": {"max_iterations": 32}},
                    [0.8] if quick else _grid(0.6, 0.9, 0.05), stop, 2),
        _experiment("fig2-dvbs2-bch", "LDPC+BCH DVB-S2 LBP-8", "ldpc-bch-bp", {"rate": "1/2", "bp": lbp8},
                    [1.5258] if quick else [1.2258, 1.3258, 1.4258, 1.5258, 1.6258], stop, 3),
        _experiment("fig2-polar-sc", "Polar SC", "polar-sc", {"N": 65536, "K": 32768},
                    [1.4] if quick else _grid(1.0, 1.7, 0.1), stop, 4),
        _experiment("fig2-sc-ldpc", "SC-LDPC WBP-8", "sc-ldpc-wbp", {"window": {"window_size": 8}},
                    [1.55] if quick else _grid(1.45, 1.65, 0.05), stop, 5),
    ]
    return FigurePlan(name="fig2", title="N=65536, R=1/2", experiments=experiments, bound_n=65536,
                      bound_k=32768, bound_grid=_grid(0.0, 0.5, 0.01), references=reference_points("fig2"),
                      ber_references=reference_points("fig2_ber"))


def _fig3(quick: bool) -> FigurePlan:
    stop = QUICK_STOP_LONG if quick else StopRule()
    lbp8 = {"max_iterations": 8}
    experiments = [
        _experiment("fig3-polar-sc", "Polar SC", "polar-sc", {"N": 65536, "K": 58254},
                    [4.0] if quick else _grid(3.7, 4.2, 0.1), stop, 1),
        _experiment("fig3-dvbs2-lbp8", "LDPC DVB-S2 LBP-8", "ldpc-bp", {"code": "dvbs2", "rate": "8/9", "bp": lbp8},
                    [3.8] if quick else [3.6, 3.7, 3.75, 3.8, 3.85, 3.9], stop, 2),
        _experiment("fig3-dvbs2-bch", "LDPC+BCH DVB-S2 LBP-8", "ldpc-bch-bp", {"rate": "8/9", "bp": lbp8},
                    [3.7758] if quick else [3.6258, 3.6758, 3.7258, 3.7758, 3.8256], stop, 3),
    ]
    return FigurePlan(name="fig3", title="N=65536, R=8/9", experiments=experiments, bound_n=65536,
                      bound_k=58254, bound_grid=_grid(2.5, 4.5, 0.05), references=reference_points("fig3"))


def figure_plan(figure: str, quick: bool = False) -> FigurePlan:
    builders = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3}
    if figure not in builders:
        raise ConfigError(f"unknown figure {figure!r}; choose from {list(FIGURES)}")
    return builders[figure](quick)


def render_plan(plan: FigurePlan, results: list[SimResult], out_dir: Union[str, Path],
                bound: Optional[SimResult] = None) -> tuple[Path, Optional[Path]]:
    """Write ``<figure>.svg`` (FER) and, for plans with BER references, ``<figure>_ber.svg``."""
    out_dir = Path(out_dir)
    svg_path = render_figure(results, out_dir / f"{plan.name}.svg", bound=bound,
                             style=FigureStyle(title=plan.title), references=plan.references)
    if not plan.ber_references:
        return svg_path, None
    ber_path = render_figure(results, out_dir / f"{plan.name}_ber.svg",
                             style=FigureStyle(title=f"{plan.title}, BER", metric="ber"),
                             references=plan.ber_references)
    return svg_path, ber_path


def reproduce(figure: str, out_dir: Union[str, Path], quick: bool = False, config: Optional[Config] = None,
              progress: Optional[bool] = None) -> FigureOutputs:
    """Run every experiment of a figure, then write ``<figure>.csv``, ``.json`` and the SVG figures."""
    plan = figure_plan(figure, quick)
    out_dir = Path(out_dir)
    results = []
    for experiment in plan.experiments:
        logger.info("%s: running %s", plan.name, experiment.name)
        results.append(run_experiment(experiment, config=config, progress=progress))

    bound = bound_result(plan.bound_n, plan.bound_k, plan.bound_grid)
    csv_path = export_csv(results + [bound], out_dir / f"{plan.name}.csv")
    json_path = export_json(results + [bound], out_dir / f"{plan.name}.json")
    svg_path, ber_path = render_plan(plan, results, out_dir, bound=bound)
    return FigureOutputs(csv=csv_path, json=json_path, svg=svg_path, results=results, ber_svg=ber_path)
