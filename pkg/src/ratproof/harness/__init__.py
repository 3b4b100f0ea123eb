"""Configuration-driven experiment runner and report writers."""

from .config import ExperimentConfig, load_config, parse_config
from .report import Report
from .runner import ValidationSummary, build_protocol, run_experiment, validate_rip

__all__ = [
    "ExperimentConfig",
    "Report",
    "ValidationSummary",
    "build_protocol",
    "load_config",
    "parse_config",
    "run_experiment",
    "validate_rip",
]
