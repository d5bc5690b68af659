import math
from typing import Iterable

import numpy as np
import rapidfuzz
from rapidfuzz.fuzz import ratio


def format_float(value: float) -> str:
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'

    return format(value, '.17g')


def closest_match(target: str, options: Iterable[str]) -> str | None:
    match = rapidfuzz.process.extractOne(target, list(options), scorer=ratio)

    return match[0] if match else None


def fit_slope(x_values: np.ndarray, y_values: np.ndarray) -> float:
    """Least-squares slope of log(y) against log(x)."""
    log_x = np.log(np.asarray(x_values, dtype=float))
    log_y = np.log(np.asarray(y_values, dtype=float))

    design = np.column_stack([log_x, np.ones_like(log_x)])
    slope, _ = np.linalg.lstsq(design, log_y, rcond=None)[0]

    return float(slope)
