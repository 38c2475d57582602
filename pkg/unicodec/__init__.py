# core
from .core.config import Config
from .core.decoder import DecodeOutcome, Decoder
from .core.exceptions import (
    ConfigError,
    ConstructionError,
    DomainError,
    ParseError,
    SimulationError,
    UnicodecException,
)
from .core.types import ChannelSpec, SeedSpec

# bounds
from .bounds import bound_curve, ebn0_at_fer, normal_approx_fer

# simulation
from .sim import ExperimentConfig, SimResult, global_registry, run_experiment

__version__ = "0.1.0"

__all__ = [
    # Core
    "Config",
    "DecodeOutcome",
    "Decoder",
    "ChannelSpec",
    "SeedSpec",
    "UnicodecException",
    "DomainError",
    "ConstructionError",
    "ParseError",
    "ConfigError",
    "SimulationError",

    # Bounds
    "bound_curve",
    "ebn0_at_fer",
    "normal_approx_fer",

    # Simulation
    "ExperimentConfig",
    "SimResult",
    "global_registry",
    "run_experiment",
]
