#!/usr/bin/env python3
"""
Simulation Script

Command-line entry point: runs the quantum jump, exact or mean-field solver
(or all three in compare mode) and writes CSV time series.
"""

import sys
import os
import argparse
import logging
import traceback
from typing import List, Optional

# Add src directory and project root to path
project_root = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.join(project_root, 'src'))
sys.path.insert(0, project_root)

from analyzers.experiment_runner import run_experiment
from config.config import (
    MODES,
    ConfigManager,
    ExperimentConfig,
    apply_env_overrides,
    get_config_for_environment,
)
from physics.errors import SimulationError, UsageError
from utils.logger import setup_logger

# Flag name -> ExperimentConfig field
FLAG_OVERRIDES = {
    'mode': 'mode',
    'gamma': 'gamma_loss',
    'g': 'g',
    'n0': 'N0',
    'trajectories': 'n_trajectories',
    'seed': 'master_seed',
    't_final': 't_final',
    'out': 'output_path',
    'workers': 'workers',
    'log_level': 'log_level',
}


class SimulateArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of printing usage and exiting"""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = SimulateArgumentParser(
        prog='simulate',
        description='Many-particle dynamics of a BEC dimer with balanced gain and loss',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python simulate.py                                   # Defaults (500 trajectories, gamma = 0)
  python simulate.py --config config/figures/fig1b.cfg # Purity oscillation at gamma = 0.5
  python simulate.py --config config/compare_n0_6.cfg  # Cross-check all solvers at N0 = 6
  python simulate.py --env testing --workers 1         # Quick smoke run
        """
    )

    parser.add_argument('--config', type=str,
                        help='Experiment file (key = value .cfg, or .yaml)')
    parser.add_argument('--env', type=str, default='default',
                        choices=['default', 'development', 'production', 'testing'],
                        help='Environment preset applied on top of the file')
    parser.add_argument('--mode', type=str, choices=MODES,
                        help='Solver to run')
    parser.add_argument('--gamma', type=float,
                        help='Loss rate gamma_loss (gain follows the balance condition)')
    parser.add_argument('--g', type=float,
                        help='Macroscopic interaction strength g')
    parser.add_argument('--n0', type=int,
                        help='Initial particle number N0')
    parser.add_argument('--trajectories', type=int,
                        help='Number of quantum jump trajectories')
    parser.add_argument('--seed', type=int,
                        help='Master seed of the trajectory ensemble')
    parser.add_argument('--t-final', dest='t_final', type=float,
                        help='Final time in units of 1/J')
    parser.add_argument('--out', type=str,
                        help='Output CSV path (siblings share its stem)')
    parser.add_argument('--workers', type=int,
                        help='Parallel workers for the ensemble (never changes results)')
    parser.add_argument('--log-level', type=str,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level')
    parser.add_argument('--quiet', action='store_true',
                        help='Suppress console logging (errors are still reported)')
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults < settings/config file < environment preset < PTDIMER_* variables < flags"""
    config_manager = ConfigManager(args.config)
    config_manager.config = get_config_for_environment(args.env, config_manager.get_config())
    config_manager.config = apply_env_overrides(config_manager.get_config())
    config_manager.update_config(**{field: getattr(args, flag) for flag, field in FLAG_OVERRIDES.items()})
    config_manager.validate_config()
    return config_manager.get_config()


def report_error(category: str, message: str) -> None:
    # exactly one line, machine-parsable
    first_line = str(message).strip().splitlines()[0] if str(message).strip() else "unknown error"
    print(f"error[{category}]: {first_line}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with command line argument parsing"""
    args = None

    try:
        args = build_parser().parse_args(argv)
        config = build_config(args)

        setup_logger(
            'CRITICAL' if args.quiet else config.log_level,
            log_to_file=config.log_to_file,
            log_directory=config.log_directory,
        )
        logger = logging.getLogger(__name__)
        logger.info("Starting PT-symmetric dimer simulation")
        logger.info(f"Mode: {config.mode}, Environment: {args.env}, Output: {config.output_path}")

        paths = run_experiment(config)

        for path in paths:
            logger.info(f"Wrote {path}")
        logger.info("Simulation complete!")
        return 0

    except KeyboardInterrupt:
        if args is None or not args.quiet:
            print("\nSimulation interrupted by user", file=sys.stderr)
        return 130
    except SimulationError as e:
        report_error(e.category, str(e))
        if args is not None and args.log_level == 'DEBUG':
            traceback.print_exc()
        return 2
    except OSError as e:
        report_error('io', str(e))
        if args is not None and args.log_level == 'DEBUG':
            traceback.print_exc()
        return 3
    except Exception as e:
        report_error('internal', f"{type(e).__name__}: {e}")
        if args is not None and args.log_level == 'DEBUG':
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
