#!/usr/bin/env python3
"""
Configuration Management

Handles experiment configuration loading, validation, parameter sweeps and
environment-specific settings for the dimer simulator.

Experiment files are flat documents, one ``key = value`` per line with ``#``
comments. YAML files with the same keys are accepted as well.
"""

import copy
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from physics.errors import ConfigError, ExistenceError
from physics.master_exact import default_n_max
from physics.meanfield import STATIONARY_NAMES

logger = logging.getLogger(__name__)

MODES = ("trajectories", "exact", "meanfield", "compare")
INITIAL_KINDS = ("product",) + STATIONARY_NAMES
SWEEP_KEYS = ("gamma_loss", "g", "initial", "N0")
DEFAULT_SETTINGS_FILE = "config/settings.yaml"
PAIR_TOLERANCE = 1e-8


@dataclass
class ExperimentConfig:
    """Configuration of one simulation run (defaults mirror the purity-oscillation figures)"""

    # Solver selection
    mode: str = "trajectories"

    # System parameters
    J: float = 1.0
    g: float = 0.5
    N0: int = 100
    gamma_loss: float = 0.0

    # Initial state: 'product' uses (c1, c2), 'ground'/'excited' the stationary states
    initial: str = "product"
    c1_re: float = 0.5
    c1_im: float = 0.5
    c2_re: float = 0.5
    c2_im: float = -0.5

    # Time grid
    t_final: float = 15.0
    sample_interval: float = 0.01
    rk_step: float = 0.001

    # Monte Carlo ensemble
    n_trajectories: int = 500
    master_seed: int = 1
    workers: Optional[int] = None

    # Exact solver sector cap (None: 2*N0 + 10)
    n_max: Optional[int] = None

    # Parameter sweep
    sweep_key: Optional[str] = None
    sweep_values: List[str] = field(default_factory=list)

    # Output settings
    output_path: str = "data/output/simulation.csv"

    # Logging settings
    log_level: str = "INFO"
    log_to_file: bool = False
    log_directory: str = "logs"

    @property
    def c1(self) -> complex:
        return complex(self.c1_re, self.c1_im)

    @property
    def c2(self) -> complex:
        return complex(self.c2_re, self.c2_im)


def _to_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _optional(converter):
    def convert(text: str):
        if text.strip().lower() in ("", "none", "null"):
            return None
        return converter(text)
    return convert


def _to_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


_CONVERTERS = {
    "mode": str,
    "J": float,
    "g": float,
    "N0": _to_int,
    "gamma_loss": float,
    "initial": str,
    "c1_re": float,
    "c1_im": float,
    "c2_re": float,
    "c2_im": float,
    "t_final": float,
    "sample_interval": float,
    "rk_step": float,
    "n_trajectories": _to_int,
    "master_seed": _to_int,
    "workers": _optional(_to_int),
    "n_max": _optional(_to_int),
    "sweep_key": _optional(str),
    "sweep_values": _to_list,
    "output_path": str,
    "log_level": str,
    "log_to_file": _to_bool,
    "log_directory": str,
}


def convert_value(key: str, raw: Any) -> Any:
    """Convert a raw document value to the type of the config field"""
    if key not in _CONVERTERS:
        raise ConfigError(f"Unknown configuration key: {key}")
    if not isinstance(raw, str):
        if key == "sweep_values" and isinstance(raw, (list, tuple)):
            return [str(item) for item in raw]
        raw = "none" if raw is None else str(raw)
    try:
        return _CONVERTERS[key](raw)
    except ValueError as e:
        raise ConfigError(f"Invalid value for {key}: {e}") from e


def parse_flat_document(text: str) -> Dict[str, str]:
    """
    Parse ``key = value`` lines

    Returns:
        Raw string values keyed by configuration key
    """
    values: Dict[str, str] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError(f"Line {line_number}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in content.split("=", 1))
        if key not in _CONVERTERS:
            raise ConfigError(f"Line {line_number}: unknown configuration key {key!r}")
        if key in values:
            raise ConfigError(f"Line {line_number}: duplicate configuration key {key!r}")
        values[key] = raw
    return values


def apply_values(config: ExperimentConfig, values: Dict[str, Any]) -> ExperimentConfig:
    """Return a copy of config with converted values applied (None values are skipped)"""
    updated = copy.deepcopy(config)
    for key, raw in values.items():
        if raw is None:
            continue
        setattr(updated, key, convert_value(key, raw))
    return updated


def validate_experiment(config: ExperimentConfig) -> None:
    """
    Check every solver precondition

    Raises:
        ConfigError: on the first violated precondition
        ExistenceError: for a stationary initial state with |gamma| > 2J
    """
    if config.mode not in MODES:
        raise ConfigError(f"Unknown mode {config.mode!r}, expected one of {MODES}")
    if config.initial not in INITIAL_KINDS:
        raise ConfigError(f"Unknown initial state {config.initial!r}, expected one of {INITIAL_KINDS}")
    if config.N0 < 1:
        raise ConfigError(f"N0 must be at least 1, got {config.N0}")
    if config.N0 == 1 and config.g != 0:
        raise ConfigError("N0 = 1 requires g = 0")
    if config.gamma_loss < 0:
        raise ConfigError(f"gamma_loss must be non-negative, got {config.gamma_loss}")
    if config.J <= 0:
        raise ConfigError(f"J must be positive, got {config.J}")
    if config.initial == "product":
        pair_norm = abs(config.c1) ** 2 + abs(config.c2) ** 2
        if abs(pair_norm - 1.0) > PAIR_TOLERANCE:
            raise ConfigError(f"Initial pair is not normalized: |c1|^2 + |c2|^2 = {pair_norm:.12g}")
    elif abs(config.gamma_loss) > 2.0 * config.J:
        raise ExistenceError(
            f"Initial state '{config.initial}' does not exist for gamma_loss = {config.gamma_loss} > 2J = {2.0 * config.J}"
        )
    if not config.t_final > 0:
        raise ConfigError(f"t_final must be positive, got {config.t_final}")
    if not config.rk_step > 0:
        raise ConfigError(f"rk_step must be positive, got {config.rk_step}")
    if config.sample_interval < config.rk_step:
        raise ConfigError(
            f"sample_interval ({config.sample_interval}) must not be smaller than rk_step ({config.rk_step})"
        )
    if config.n_trajectories < 1:
        raise ConfigError(f"n_trajectories must be positive, got {config.n_trajectories}")
    if config.n_max is not None and config.n_max < config.N0:
        raise ConfigError(f"n_max ({config.n_max}) must not be smaller than N0 ({config.N0})")
    if config.workers == 0:
        raise ConfigError("workers must be non-zero (negative values count back from all cores)")
    if config.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ConfigError(f"Unknown log level {config.log_level!r}")
    _validate_sweep(config)


def _validate_sweep(config: ExperimentConfig) -> None:
    if config.sweep_key is None:
        return
    if config.sweep_key not in SWEEP_KEYS:
        raise ConfigError(f"Cannot sweep {config.sweep_key!r}, expected one of {SWEEP_KEYS}")
    if not config.sweep_values:
        raise ConfigError("sweep_key is set but sweep_values is empty")


def expand_sweep(config: ExperimentConfig) -> List[Tuple[Optional[str], ExperimentConfig]]:
    """
    One (label, config) per sweep value, or [(None, config)] without a sweep

    Every expanded configuration is validated.
    """
    if config.sweep_key is None:
        validate_experiment(config)
        return [(None, config)]
    _validate_sweep(config)
    runs = []
    for raw in config.sweep_values:
        single = replace(config, sweep_key=None, sweep_values=[])
        single = apply_values(single, {config.sweep_key: raw})
        validate_experiment(single)
        runs.append((f"{config.sweep_key}-{raw}", single))
    return runs


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Parse a flat experiment document and apply flag overrides

    Args:
        text: Document text (may be empty)
        overrides: Values from command-line flags; they take precedence

    Returns:
        Validated ExperimentConfig with defaults filled
    """
    config = apply_values(ExperimentConfig(), parse_flat_document(text))
    config = apply_values(config, overrides or {})
    expand_sweep(config)
    return config


class ConfigManager:
    """Manages configuration loading and validation"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file
        self.config = self._load_config()

    def _load_config(self) -> ExperimentConfig:
        """Load configuration from file or use defaults"""
        path = self.config_file
        if path is None:
            if not os.path.exists(DEFAULT_SETTINGS_FILE):
                logger.debug("No settings file found, using defaults")
                return ExperimentConfig()
            path = DEFAULT_SETTINGS_FILE

        if not os.path.exists(path):
            raise ConfigError(f"Configuration file {path} not found")

        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()

        if path.endswith(('.yaml', '.yml')):
            data = yaml.safe_load(text) or {}
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: expected a mapping at the top level")
            config = apply_values(ExperimentConfig(), data)
        else:
            config = apply_values(ExperimentConfig(), parse_flat_document(text))

        logger.info(f"Loaded configuration from {path}")
        return config

    def get_config(self) -> ExperimentConfig:
        """Get the current configuration"""
        return self.config

    def update_config(self, **kwargs):
        """Apply overrides; None values leave the current value in place"""
        self.config = apply_values(self.config, kwargs)

    def validate_config(self) -> List[Tuple[Optional[str], ExperimentConfig]]:
        """Validate the current configuration and return its expanded runs"""
        runs = expand_sweep(self.config)
        logger.debug(f"Configuration validation passed ({len(runs)} run(s))")
        return runs

    def save_config(self, file_path: str):
        """Save current configuration as a flat document"""
        lines = []
        for key, value in asdict(self.config).items():
            if value is None or value == []:
                continue
            if isinstance(value, list):
                value = ", ".join(value)
            lines.append(f"{key} = {value}")
        Path(file_path).parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write("\n".join(lines) + "\n")
        logger.info(f"Configuration saved to {file_path}")


def load_config_from_file(file_path: str) -> ExperimentConfig:
    """Load configuration from a specific file"""
    return ConfigManager(file_path).get_config()


ENVIRONMENT_PRESETS: Dict[str, Dict[str, Any]] = {
    'development': {
        'log_level': 'DEBUG',
        'n_trajectories': 50,
    },
    'production': {
        'log_level': 'INFO',
        'log_to_file': True,
    },
    'testing': {
        'log_level': 'WARNING',
        'n_trajectories': 20,
        't_final': 2.0,
        'log_to_file': False,
    },
}


def get_config_for_environment(env: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Apply the preset of an environment on top of base (or the defaults)"""
    config = base if base is not None else ExperimentConfig()
    if env in ENVIRONMENT_PRESETS:
        config = apply_values(config, ENVIRONMENT_PRESETS[env])
        logger.info(f"Loaded {env} environment configuration")
    elif env != 'default':
        logger.warning(f"Unknown environment: {env}, using configuration unchanged")
    return config


# Environment variable overrides
ENV_MAPPINGS = {
    'PTDIMER_WORKERS': 'workers',
    'PTDIMER_LOG_LEVEL': 'log_level',
    'PTDIMER_OUTPUT': 'output_path',
    'PTDIMER_SEED': 'master_seed',
}


def apply_env_overrides(config: ExperimentConfig) -> ExperimentConfig:
    """Apply environment variable overrides to configuration"""
    for env_var, config_attr in ENV_MAPPINGS.items():
        env_value = os.getenv(env_var)
        if env_value is not None:
            config = apply_values(config, {config_attr: env_value})
            logger.info(f"Applied environment override: {config_attr} = {env_value}")
    return config


def resolved_n_max(config: ExperimentConfig) -> int:
    """Exact-solver sector cap of a configuration"""
    return config.n_max if config.n_max is not None else default_n_max(config.N0)
