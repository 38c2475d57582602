from .config import ExperimentConfig, SchemeDescriptor, StopRule
from .result import PointResult, SimResult, wilson_interval
from .schemes import Codec, ConcatenatedDecoder, Scheme, builtin_schemes
from .registry import SchemeRegistry, default_registry, global_registry
from .runner import resolve_all_zero, run_experiment
from .export import CSV_COLUMNS, export_csv, export_json, load_results
from .plot import FigureStyle, render_figure
from .reproduce import FIGURES, FigurePlan, figure_plan, reference_points, render_plan, reproduce

__all__ = [
    "ExperimentConfig",
    "SchemeDescriptor",
    "StopRule",
    "PointResult",
    "SimResult",
    "wilson_interval",
    "Codec",
    "ConcatenatedDecoder",
    "Scheme",
    "builtin_schemes",
    "SchemeRegistry",
    "default_registry",
    "global_registry",
    "resolve_all_zero",
    "run_experiment",
    "CSV_COLUMNS",
    "export_csv",
    "export_json",
    "load_results",
    "FigureStyle",
    "render_figure",
    "FIGURES",
    "FigurePlan",
    "figure_plan",
    "reference_points",
    "render_plan",
    "reproduce",
]
