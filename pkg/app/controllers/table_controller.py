from itertools import product
from typing import TYPE_CHECKING, Callable

from loguru import logger

from app.correlators import (
    Epsilon,
    w2_cylinder_vacuum,
    w2_plane_thermal,
    w2_plane_vacuum
)
from app.exceptions.correlators import SingularArgumentException
from app.objects import ResultTable

if TYPE_CHECKING:
    from cover_kms import CoverKMS

TABLE_COLUMNS = ['kernel', 'delta_u', 'delta_v', 'epsilon', 're_w', 'im_w', 'singular']


class TableController:
    def __init__(self, parent: 'CoverKMS') -> None:
        self.parent = parent

    def kernels(self) -> dict[str, Callable]:
        config = self.parent.config

        kernels = {
            'plane-vacuum': lambda du, dv, eps: w2_plane_vacuum(du, dv, eps),
            'cylinder-vacuum':
                lambda du, dv, eps: w2_cylinder_vacuum(du, dv, config.period, eps)
        }

        if config.beta is not None:
            kernels['plane-thermal'] = \
                lambda du, dv, eps: w2_plane_thermal(du, dv, config.beta, eps)

        return kernels

    def w2_table(self) -> ResultTable:
        config = self.parent.config
        eps = Epsilon(config.epsilon)
        table = ResultTable(list(TABLE_COLUMNS))

        singular = 0
        for name, kernel in self.kernels().items():
            for delta_u, delta_v in product(config.grid, repeat=2):
                try:
                    value = complex(kernel(delta_u, delta_v, eps))

                except SingularArgumentException as error:
                    logger.debug(f'{name} at ({delta_u}, {delta_v}): {error}')
                    table.add_row(name, delta_u, delta_v, config.epsilon,
                                  float('nan'), float('nan'), True)
                    singular += 1
                    continue

                table.add_row(name, delta_u, delta_v, config.epsilon,
                              value.real, value.imag, False)

        table.summary = {'singular_points': singular}
        return table
