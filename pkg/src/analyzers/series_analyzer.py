#!/usr/bin/env python3
"""
Time-Series Analysis

Extremum detection on sampled observables and deviation summaries between
solvers. Extrema are taken from a centered moving average so that Monte
Carlo noise does not produce spurious 3-point extrema.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.signal import find_peaks

from physics.errors import GridMismatchError

logger = logging.getLogger(__name__)

DEFAULT_SMOOTHING_WINDOW = 5
COINCIDENCE_TOLERANCE = 0.25
EXTREMUM_FIT_HALF_WIDTH = 40
EXTREMUM_FIT_PASSES = 3


def smooth_series(values: Sequence[float], window: int = DEFAULT_SMOOTHING_WINDOW) -> np.ndarray:
    """Centered moving average; the edges use the samples available"""
    if window < 1:
        raise ValueError(f"Smoothing window must be positive, got {window}")
    series = pd.Series(np.asarray(values, dtype=np.float64))
    return series.rolling(window=window, center=True, min_periods=1).mean().to_numpy()


def refine_extremum_time(
    times: np.ndarray, values: np.ndarray, index: int, kind: str, half_width: int
) -> float:
    """
    Vertex of a least-squares parabola through the raw samples around index

    The window is re-centred on the nearest sample to the vertex for up to
    EXTREMUM_FIT_PASSES passes. The sample time is kept when the fitted
    curvature has the wrong sign or the vertex leaves the window.
    """
    refined = float(times[index])
    for _ in range(EXTREMUM_FIT_PASSES):
        lo = max(index - half_width, 0)
        hi = min(index + half_width + 1, len(times))
        if hi - lo < 3:
            break
        t0 = times[index]
        a, b, _ = np.polyfit(times[lo:hi] - t0, values[lo:hi], 2)
        if (kind == "max" and a >= 0) or (kind == "min" and a <= 0):
            break
        vertex = t0 - b / (2 * a)
        if not times[lo] <= vertex <= times[hi - 1]:
            break
        refined = float(vertex)
        nearest = int(np.argmin(np.abs(times - vertex)))
        if nearest == index:
            break
        index = nearest
    return refined


def find_extrema(
    times: Sequence[float],
    values: Sequence[float],
    window: int = DEFAULT_SMOOTHING_WINDOW,
    prominence: Optional[float] = None,
    fit_half_width: int = 0,
) -> Tuple[np.ndarray, List[str]]:
    """
    Local extrema of the smoothed series

    Args:
        times: Sample times
        values: Sampled observable
        window: Moving-average window (1 disables smoothing)
        prominence: Minimum peak prominence passed to find_peaks
        fit_half_width: Samples on each side used to refine every detected
            extremum with a parabola fit; 0 keeps the sample times

    Returns:
        (extremum times, kinds) sorted by time, kinds being 'min' or 'max'
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    smoothed = smooth_series(values, window)
    maxima, _ = find_peaks(smoothed, prominence=prominence)
    minima, _ = find_peaks(-smoothed, prominence=prominence)

    indices = np.concatenate([maxima, minima])
    kinds = np.array(["max"] * len(maxima) + ["min"] * len(minima))
    extremum_times = times[indices]
    if fit_half_width > 0:
        extremum_times = np.array([
            refine_extremum_time(times, values, int(index), str(kind), fit_half_width)
            for index, kind in zip(indices, kinds)
        ], dtype=np.float64)
    order = np.argsort(extremum_times, kind="stable")
    return extremum_times[order], [str(kind) for kind in kinds[order]]


def extrema_coincide(
    reference_times: Sequence[float],
    other_times: Sequence[float],
    tolerance: float = COINCIDENCE_TOLERANCE,
) -> bool:
    """True if every reference extremum lies within tolerance of some other extremum"""
    reference_times = np.asarray(reference_times, dtype=np.float64)
    other_times = np.asarray(other_times, dtype=np.float64)
    if len(reference_times) == 0:
        return True
    if len(other_times) == 0:
        return False
    distances = np.abs(reference_times[:, None] - other_times[None, :]).min(axis=1)
    return bool(np.all(distances <= tolerance))


def first_minimum_then_maximum(
    times: Sequence[float],
    values: Sequence[float],
    window: int = DEFAULT_SMOOTHING_WINDOW,
    prominence: Optional[float] = None,
) -> Optional[Dict[str, float]]:
    """
    First detected minimum and the first maximum after it

    Values are read from the raw series at the detected indices.

    Returns:
        Dict with t_min, value_min, t_max, value_max (t_max/value_max are
        None without a later maximum), or None without any minimum
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    smoothed = smooth_series(values, window)
    minima, _ = find_peaks(-smoothed, prominence=prominence)
    if len(minima) == 0:
        return None
    first = int(minima[0])
    result = {"t_min": float(times[first]), "value_min": float(values[first]), "t_max": None, "value_max": None}
    maxima, _ = find_peaks(smoothed, prominence=prominence)
    later = maxima[maxima > first]
    if len(later):
        result["t_max"] = float(times[later[0]])
        result["value_max"] = float(values[later[0]])
    return result


def max_deviations(frame: pd.DataFrame, reference: pd.DataFrame, columns: Sequence[str]) -> Dict[str, float]:
    """
    Maximum absolute pointwise deviation per column on a shared time grid

    Raises:
        GridMismatchError: if the two frames are not sampled on the same times
    """
    if len(frame) != len(reference) or not np.array_equal(frame["t"].to_numpy(), reference["t"].to_numpy()):
        raise GridMismatchError("Series must share one time grid to be compared pointwise")
    deviations = {}
    for column in columns:
        deviations[column] = float(np.max(np.abs(frame[column].to_numpy() - reference[column].to_numpy())))
    logger.debug(f"Max deviations: {deviations}")
    return deviations
