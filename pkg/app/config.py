import math
from argparse import Namespace
from dataclasses import asdict, dataclass

import numpy as np

from app.enums.kernel import KernelKind, TailCorrection
from app.exceptions.config import (
    InvalidParameterException,
    MissingParameterException,
    UnknownChoiceException
)
from app.settings import Settings
from app.utils import closest_match

OUTPUT_FORMATS = ('csv', 'json')
THERMAL_KERNELS = (KernelKind.PLANE_THERMAL, KernelKind.CYLINDER_THERMAL)
KMS_REGION_HALF_WIDTH = 0.5

DEFAULT_GRIDS = {
    'w2-table': '0.5,1,2,3.141592653589793',
    'kms-verify': '-2:2:9'
}


def parse_choice(value: str, options: list[str], name: str) -> str:
    if value in options:
        return value

    detail = f"{name} '{value}'"
    if suggestion := closest_match(value, options):
        detail += f", did you mean '{suggestion}'?"

    raise UnknownChoiceException(detail)


def parse_grid(text: str) -> tuple[float, ...]:
    """'start:stop:count' for a linear grid, otherwise a comma separated list."""
    try:
        if ':' in text:
            start, stop, count = text.split(':')
            values = np.linspace(float(start), float(stop), int(count))
        else:
            values = [float(item) for item in text.split(',') if item.strip()]

    except ValueError as error:
        raise InvalidParameterException(f"grid '{text}': {error}")

    if len(values) == 0:
        raise InvalidParameterException(f"grid '{text}' is empty")

    return tuple(float(value) for value in values)


@dataclass(frozen=True)
class RunConfig:
    command: str
    period: float
    beta: float | None
    epsilon: float
    series_n: int
    tail_correction: bool
    grid: tuple[float, ...]
    seed: int
    out: str | None
    output_format: str
    kernel: KernelKind
    lifted: bool
    branch: int
    delta: float
    pairs: int

    @classmethod
    def from_args(cls, args: Namespace, settings: Settings) -> 'RunConfig':
        def pick(name: str, setting: str | None = None):
            value = getattr(args, name, None)
            return settings.get(setting or name) if value is None else value

        def given(name: str, default):
            value = getattr(args, name, None)
            return default if value is None else value

        kernel_name = parse_choice(getattr(args, 'kernel', None) or 'plane-thermal',
                                   [kind.value for kind in KernelKind],
                                   'kernel')

        output_format = parse_choice(pick('format', 'output_format'),
                                     list(OUTPUT_FORMATS),
                                     'format')

        grid_text = getattr(args, 'grid', None) \
            or DEFAULT_GRIDS.get(args.command, '0:1:5')

        config = cls(command=args.command,
                     period=float(pick('period')),
                     beta=getattr(args, 'beta', None),
                     epsilon=float(pick('epsilon')),
                     series_n=int(pick('series_n')),
                     tail_correction=bool(pick('tail_correction')),
                     grid=parse_grid(grid_text),
                     seed=int(given('seed', 0)),
                     out=getattr(args, 'out', None),
                     output_format=output_format,
                     kernel=KernelKind(kernel_name),
                     lifted=bool(given('lifted', False)),
                     branch=int(given('branch', 0)),
                     delta=float(given('delta', 0.7)),
                     pairs=int(given('pairs', 1)))

        config.validate()
        return config

    @property
    def tail(self) -> TailCorrection:
        if self.tail_correction:
            return TailCorrection.INTEGRAL_TAIL

        return TailCorrection.NONE

    @property
    def needs_beta(self) -> bool:
        return self.command == 'kms-verify' \
            and (self.lifted or self.kernel in THERMAL_KERNELS)

    def validate(self) -> None:
        if not (math.isfinite(self.period) and self.period > 0):
            raise InvalidParameterException(f'period = {self.period}')

        if not 0 < self.epsilon <= 1e-2:
            raise InvalidParameterException(f'epsilon = {self.epsilon}')

        if self.series_n < 1:
            raise InvalidParameterException(f'series-n = {self.series_n}')

        if self.pairs < 1:
            raise InvalidParameterException(f'pairs = {self.pairs}')

        if self.beta is not None and not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameterException(f'beta = {self.beta}')

        if self.needs_beta and self.beta is None:
            raise MissingParameterException(f'--beta is required for {self.kernel.value}')

        if self.command == 'kms-verify' and self.lifted \
                and self.period <= 2 * KMS_REGION_HALF_WIDTH:
            raise InvalidParameterException(
                f'period = {self.period} does not fit the KMS region')

        if self.command == 'images-converge':
            if not math.isfinite(self.delta):
                raise InvalidParameterException(f'delta = {self.delta}')

            images = self.delta / self.period

            if math.isclose(images, round(images), abs_tol=1e-12):
                raise InvalidParameterException(
                    f'delta = {self.delta} lies on the image lattice')

    def to_dict(self) -> dict:
        config = asdict(self)
        config['kernel'] = self.kernel.value
        config['grid'] = list(self.grid)

        return config
