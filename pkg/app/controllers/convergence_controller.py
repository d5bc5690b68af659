import math
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger

from app.correlators import (
    Epsilon,
    SeriesSpec,
    dd_cylinder_closed,
    dd_image_sum
)
from app.enums.kernel import TailCorrection
from app.exceptions.config import InvalidParameterException
from app.objects import ResultTable
from app.utils import fit_slope

if TYPE_CHECKING:
    from cover_kms import CoverKMS

SLOPE_TARGET = -1.0
SLOPE_TOLERANCE = 0.1
CORRECTED_TOLERANCE = 1e-8
CHECK_TRUNCATION = 10_000


def truncation_decades(series_n: int) -> list[int]:
    """Powers of ten from 100 up to series_n, plus series_n itself."""
    truncations = [10 ** power for power in range(2, int(math.log10(series_n)) + 1)]

    if truncations and truncations[-1] != series_n:
        truncations.append(series_n)

    if len(truncations) < 2:
        raise InvalidParameterException(f'series-n = {series_n}, need at least 1000')

    return truncations


class ConvergenceController:
    def __init__(self, parent: 'CoverKMS') -> None:
        self.parent = parent

    def images_converge(self) -> ResultTable:
        config = self.parent.config
        eps = Epsilon(config.epsilon)

        exact = complex(dd_cylinder_closed(config.delta, config.period, eps))
        truncations = truncation_decades(config.series_n)

        table = ResultTable(['truncation', 'raw_error', 'corrected_error'])

        for truncation in truncations:
            raw = dd_image_sum(config.delta, config.period, eps,
                               SeriesSpec(truncation, TailCorrection.NONE))
            corrected = dd_image_sum(config.delta, config.period, eps,
                                     SeriesSpec(truncation, TailCorrection.INTEGRAL_TAIL))

            table.add_row(truncation,
                          abs(raw - exact) / abs(exact),
                          abs(corrected - exact) / abs(exact))

        slope = fit_slope(np.array(truncations), np.array(table.column('raw_error')))

        check_at = CHECK_TRUNCATION if CHECK_TRUNCATION in truncations else truncations[-1]
        corrected_error = table.rows[truncations.index(check_at)][2]

        table.summary = {
            'delta': config.delta,
            'slope': slope,
            'corrected_check_truncation': check_at,
            'corrected_check_error': corrected_error
        }
        table.passed = abs(slope - SLOPE_TARGET) <= SLOPE_TOLERANCE

        if config.tail_correction:
            table.passed = table.passed and corrected_error < CORRECTED_TOLERANCE

        logger.info(f'Image sum slope {slope:.4f}, corrected error {corrected_error:.3e} '
                    f'at N = {check_at}')

        return table
