"""
Experiment Modules

This package contains the orchestration of the three solvers and the
analysis of the resulting time series.
"""

from .experiment_runner import ExperimentRunner
from .series_analyzer import find_extrema, smooth_series

__all__ = [
    "ExperimentRunner",
    "find_extrema",
    "smooth_series",
]
