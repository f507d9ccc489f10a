#!/usr/bin/env python3
"""
Experiment Runner

Orchestrates the three solvers (quantum jump ensemble, exact block master
equation, mean-field GPE) for one configuration or a parameter sweep, and
writes analysis-ready CSV time series, comparison summaries and a text
report.
"""

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from config.config import ExperimentConfig, expand_sweep, resolved_n_max
from physics.fock import SectorState, SystemParams, build_product_state
from physics.master_exact import BlockDensityMatrix, evolve_exact
from physics.meanfield import MeanFieldState, gpe_evolve
from physics.observables import MomentSeries, meanfield_moments, moment_series_observables
from physics.trajectories import TrajectoryConfig, run_ensemble
from utils.data_writer import DataWriter
from utils.logger import LoggerMixin, log_execution_time

from .series_analyzer import (
    COINCIDENCE_TOLERANCE,
    EXTREMUM_FIT_HALF_WIDTH,
    extrema_coincide,
    find_extrema,
    first_minimum_then_maximum,
    max_deviations,
)

logger = logging.getLogger(__name__)

SOLVERS = ("trajectories", "exact", "meanfield")
COMPARED_COLUMNS = ("n_total", "purity", "contrast", "imbalance")


@dataclass
class RunMetrics:
    """Runtime metrics accumulated over all runs"""
    processing_time: float = 0.0
    runs_completed: int = 0
    trajectories_run: int = 0
    total_jumps: int = 0


@dataclass
class RunResult:
    """Output of one (possibly swept) configuration"""
    label: Optional[str]
    config: ExperimentConfig
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: Optional[Dict[str, Any]] = None


def system_params(config: ExperimentConfig) -> SystemParams:
    return SystemParams(J=config.J, g=config.g, N0=config.N0, gamma_loss=config.gamma_loss)


def initial_pair(config: ExperimentConfig, params: SystemParams) -> MeanFieldState:
    """Single-particle mode of the initial state"""
    if config.initial == "product":
        return MeanFieldState(config.c1, config.c2)
    return MeanFieldState.from_named(config.initial, params)


def initial_state(config: ExperimentConfig, params: SystemParams) -> SectorState:
    """Many-body product state built from the initial mode"""
    pair = initial_pair(config, params)
    return build_product_state(pair.c1, pair.c2, config.N0)


class ExperimentRunner(LoggerMixin):
    """
    Runs the configured solvers and collects their time series
    """

    def __init__(self, config: ExperimentConfig):
        """
        Initialize the runner

        Args:
            config: Experiment configuration (validated again per run)
        """
        self.config = config
        self.metrics = RunMetrics()
        self.runs = expand_sweep(config)

    def run_trajectories(self, config: ExperimentConfig) -> pd.DataFrame:
        """Ensemble-averaged observables with the standard error of n_total"""
        params = system_params(config)
        trajectory_config = TrajectoryConfig(
            params=params,
            initial=initial_state(config, params),
            t_final=config.t_final,
            sample_interval=config.sample_interval,
            rk_step=config.rk_step,
            master_seed=config.master_seed,
            n_trajectories=config.n_trajectories,
        )
        ensemble = run_ensemble(trajectory_config, workers=config.workers)
        self.metrics.trajectories_run += ensemble.n_trajectories
        self.metrics.total_jumps += ensemble.total_jumps

        frame = moment_series_observables(ensemble.series)
        frame["stderr_n_total"] = ensemble.stderr_n_total
        return frame

    def run_exact(self, config: ExperimentConfig) -> pd.DataFrame:
        params = system_params(config)
        n_max = resolved_n_max(config)
        rho0 = BlockDensityMatrix.from_pure(initial_state(config, params), n_max)
        series = evolve_exact(rho0, config.t_final, config.rk_step, params, config.sample_interval)
        return moment_series_observables(series)

    def run_meanfield(self, config: ExperimentConfig) -> pd.DataFrame:
        """GPE observables; moments are scaled by N0 to match the many-body number columns"""
        params = system_params(config)
        samples = gpe_evolve(
            initial_pair(config, params), config.t_final, config.rk_step, params, config.sample_interval
        )
        series = MomentSeries.from_records(meanfield_moments(c, t) for t, c in samples)
        return moment_series_observables(series.scaled(config.N0))

    def _run_single(self, label: Optional[str], config: ExperimentConfig) -> RunResult:
        name = label or "single run"
        self.logger.info(f"Starting {config.mode} run ({name})")
        result = RunResult(label=label, config=config)
        solvers = SOLVERS if config.mode == "compare" else (config.mode,)
        for solver in solvers:
            result.frames[solver] = getattr(self, f"run_{solver}")(config)

        if config.mode == "compare":
            exact = result.frames["exact"]
            result.summary = {
                "reference": "exact",
                "N0": config.N0,
                "gamma_loss": config.gamma_loss,
                "n_trajectories": config.n_trajectories,
                "max_abs_deviation": {
                    solver: max_deviations(result.frames[solver], exact, COMPARED_COLUMNS)
                    for solver in ("trajectories", "meanfield")
                },
            }
            self.logger.info(f"Compare summary ({name}): {result.summary['max_abs_deviation']}")

        self.metrics.runs_completed += 1
        return result

    def run(self) -> List[RunResult]:
        """
        Run every configuration of the sweep in order

        Returns:
            One RunResult per sweep value (a single one without a sweep)
        """
        start_time = time.perf_counter()
        self.logger.info(f"Running {len(self.runs)} experiment(s) in {self.config.mode} mode")
        results = []
        try:
            for label, config in self.runs:
                results.append(self._run_single(label, config))
        except Exception as e:
            self.logger.error(f"Experiment failed: {e}")
            raise
        finally:
            self.metrics.processing_time = time.perf_counter() - start_time

        self.logger.info(
            f"Completed {self.metrics.runs_completed} run(s) in {self.metrics.processing_time:.2f} seconds"
        )
        return results

    def _purity_analysis(self, frame: pd.DataFrame) -> List[str]:
        lines = []
        times = frame["t"].to_numpy()
        purity = frame["purity"].to_numpy()
        lines.append(f"  Purity range: {purity.min():.6f} .. {purity.max():.6f}")

        oscillation = first_minimum_then_maximum(times, purity)
        if oscillation is None:
            lines.append("  First purity minimum: none detected")
        else:
            lines.append(f"  First purity minimum: P = {oscillation['value_min']:.6f} at t = {oscillation['t_min']:.2f}")
            if oscillation["t_max"] is not None:
                lines.append(
                    f"  Subsequent maximum:   P = {oscillation['value_max']:.6f} at t = {oscillation['t_max']:.2f}"
                )

        purity_times, _ = find_extrema(times, purity, fit_half_width=EXTREMUM_FIT_HALF_WIDTH)
        number_times, _ = find_extrema(times, frame["n_total"].to_numpy(), fit_half_width=EXTREMUM_FIT_HALF_WIDTH)
        lines.append(f"  Purity extrema at:  {', '.join(f'{t:.2f}' for t in purity_times) or '-'}")
        lines.append(f"  <n> extrema at:     {', '.join(f'{t:.2f}' for t in number_times) or '-'}")
        coincide = extrema_coincide(purity_times, number_times)
        lines.append(f"  Extrema coincide within {COINCIDENCE_TOLERANCE}: {'yes' if coincide else 'no'}")
        return lines

    def generate_report(self, results: List[RunResult]) -> str:
        """
        Generate a plain-text run report

        Args:
            results: Output of run()

        Returns:
            Formatted report string
        """
        config = self.config
        report = []
        report.append("=" * 80)
        report.append("PT-SYMMETRIC DIMER SIMULATION REPORT")
        report.append("=" * 80)
        report.append(f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        report.append(f"Mode: {config.mode}")
        report.append(f"Parameters: J = {config.J}, g = {config.g}, N0 = {config.N0}, gamma_loss = {config.gamma_loss}")
        if config.initial == "product":
            report.append(f"Initial state: product, c1 = {config.c1}, c2 = {config.c2}")
        else:
            report.append(f"Initial state: {config.initial} stationary state")
        report.append(
            f"Time grid: t_final = {config.t_final}, sample_interval = {config.sample_interval}, "
            f"rk_step = {config.rk_step}"
        )
        if config.sweep_key:
            report.append(f"Sweep: {config.sweep_key} over {', '.join(config.sweep_values)}")
        report.append("")

        report.append("PERFORMANCE METRICS:")
        report.append(f"Processing Time: {self.metrics.processing_time:.2f} seconds")
        report.append(f"Runs Completed: {self.metrics.runs_completed}")
        report.append(f"Trajectories Run: {self.metrics.trajectories_run}")
        report.append(f"Total Jumps: {self.metrics.total_jumps}")
        report.append("")

        for result in results:
            report.append("-" * 80)
            report.append(f"RUN: {result.label or 'single'}")
            report.append("-" * 80)
            for solver, frame in result.frames.items():
                report.append(f"{solver}:")
                report.extend(self._purity_analysis(frame))
            if result.summary:
                report.append("Max absolute deviation against exact:")
                for solver, deviations in result.summary["max_abs_deviation"].items():
                    values = ", ".join(f"{column} {value:.3e}" for column, value in deviations.items())
                    report.append(f"  {solver}: {values}")
            report.append("")

        return "\n".join(report)

    def export_results(self, results: List[RunResult], writer: Optional[DataWriter] = None) -> List[Path]:
        """
        Write CSV series, compare summaries and the run report

        Returns:
            Paths written, in order
        """
        writer = writer or DataWriter(self.config.output_path)
        paths = []
        for result in results:
            prefix = f"_{result.label}" if result.label else ""
            for solver, frame in result.frames.items():
                suffix = prefix if result.config.mode != "compare" else f"{prefix}_{solver}"
                paths.append(writer.write_csv(frame, writer.sibling(suffix)))
            if result.summary is not None:
                paths.append(writer.write_json(result.summary, writer.sibling(f"{prefix}_summary", ".json")))
        paths.append(writer.write_text(self.generate_report(results) + "\n", writer.sibling("", ".report.txt")))
        return paths


@log_execution_time
def run_experiment(config: ExperimentConfig) -> List[Path]:
    """
    Run a validated configuration and write every output file

    Returns:
        Paths written (CSV files first, report last)
    """
    runner = ExperimentRunner(config)
    results = runner.run()
    return runner.export_results(results)
