#!/usr/bin/env python3
"""
Data Writer Utility

Writes simulation time series (CSV), comparison summaries (JSON) and run
reports (text), and loads them back for analysis.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every 64-bit float
CSV_FLOAT_FORMAT = '%.17g'


class DataWriter:
    """Handles writing and loading simulation results"""

    def __init__(self, output_path: str):
        """
        Initialize data writer

        Args:
            output_path: Primary CSV path; sibling files share its stem
        """
        self.output_path = Path(output_path)
        self.output_directory = self.output_path.parent

    def sibling(self, suffix: str, extension: Optional[str] = None) -> Path:
        """
        Path next to the primary output, e.g. 'run.csv' -> 'run_exact.csv'

        Args:
            suffix: Text appended to the stem (may be empty)
            extension: Replacement extension including the dot
        """
        extension = extension if extension is not None else (self.output_path.suffix or '.csv')
        return self.output_directory / f"{self.output_path.stem}{suffix}{extension}"

    def _ensure_directory(self):
        if str(self.output_directory):
            os.makedirs(self.output_directory, exist_ok=True)

    def write_csv(self, frame: pd.DataFrame, path: Optional[Path] = None) -> Path:
        """
        Save a time series with lossless float formatting

        Returns:
            Path written
        """
        path = Path(path) if path is not None else self.output_path
        try:
            self._ensure_directory()
            frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
            logger.info(f"Saved {len(frame)} rows to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing CSV to {path}: {e}")
            raise

    def write_json(self, data: Dict[str, Any], path: Path) -> Path:
        """Save a summary dictionary as JSON"""
        try:
            self._ensure_directory()
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(data, f, indent=2, sort_keys=True)
            logger.info(f"Saved JSON data to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing JSON to {path}: {e}")
            raise

    def write_text(self, text: str, path: Path) -> Path:
        """Save a plain-text report"""
        try:
            self._ensure_directory()
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text)
            logger.info(f"Saved report to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing report to {path}: {e}")
            raise

    @staticmethod
    def load_csv(path: str) -> pd.DataFrame:
        """
        Load a time series written by write_csv

        Returns:
            DataFrame with float64 columns
        """
        frame = pd.read_csv(path, float_precision='round_trip')
        logger.debug(f"Loaded {path} ({frame.shape[0]} rows, {frame.shape[1]} columns)")
        return frame

    @staticmethod
    def load_json(path: str) -> Dict[str, Any]:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
