import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from loguru import logger

from app.enums.kernel import KernelKind, TailCorrection
from app.exceptions.correlators import (
    AnalyticityException,
    DegenerateGridException,
    InvalidKernelException,
    InvalidSeriesException,
    SingularArgumentException
)
from app.exceptions.geometry import ChartMismatchException
from app.exceptions.quadrature import PrecisionException
from app.geometry import Chart
from app.smearing import (
    QUADRATURE_ORDER,
    QUADRATURE_PANELS,
    QUADRATURE_TOLERANCE,
    BumpFunction,
    TestFunction2D,
    gauss_legendre,
    legendre_rule
)

FOUR_PI = 4 * math.pi
SERIES_RADIUS = 0.05
IMAGE_BLOCK = 2_000_000

INNER_ORDER = 64
INNER_PANELS = 4
TAYLOR_DEGREE = 3


@dataclass(frozen=True)
class Epsilon:
    value: float = 1e-8

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise SingularArgumentException('Epsilon must be > 0.')


DEFAULT_EPSILON = Epsilon()


def epsilon_value(eps: Epsilon | float) -> float:
    return eps.value if isinstance(eps, Epsilon) else Epsilon(eps).value


@dataclass(frozen=True)
class SeriesSpec:
    truncation: int
    tail: TailCorrection = TailCorrection.INTEGRAL_TAIL

    def __post_init__(self) -> None:
        if isinstance(self.truncation, bool) \
                or not isinstance(self.truncation, (int, np.integer)) \
                or self.truncation < 1:
            raise InvalidSeriesException(f'N = {self.truncation!r}')


def _checked(values: np.ndarray) -> np.ndarray | complex:
    if not np.all(np.isfinite(values)):
        raise SingularArgumentException()

    return values[()] if values.ndim == 0 else values


def _chiral_argument(delta: np.ndarray, eps: Epsilon | float) -> np.ndarray:
    return np.asarray(delta, dtype=complex) - 1j * epsilon_value(eps)


def pole_part(w_pos: np.ndarray) -> np.ndarray:
    """Universal double pole -1/(4 pi w^2) shared by every chiral kernel."""
    return -1 / (FOUR_PI * w_pos ** 2)


def _csch2(x_pos: np.ndarray) -> np.ndarray:
    flipped = np.where(x_pos.real < 0, -x_pos, x_pos)
    decay = np.exp(-2 * flipped)

    return np.where(np.abs(flipped.real) > 1,
                    4 * decay / (1 - decay) ** 2,
                    1 / np.sinh(x_pos) ** 2)


def _csc2(x_pos: np.ndarray) -> np.ndarray:
    flipped = np.where(x_pos.imag > 0, -x_pos, x_pos)
    decay = np.exp(-2j * flipped)

    return np.where(np.abs(flipped.imag) > 1,
                    -4 * decay / (1 - decay) ** 2,
                    1 / np.sin(x_pos) ** 2)


def _csch2_regular(x_pos: np.ndarray) -> np.ndarray:
    """csch^2(x) - 1/x^2, by its Taylor series close to the origin."""
    x2 = x_pos ** 2
    series = -1 / 3 + x2 / 15 - 2 * x2 ** 2 / 189 + x2 ** 3 / 675

    return np.where(np.abs(x_pos) < SERIES_RADIUS, series, _csch2(x_pos) - 1 / x2)


def _csc2_regular(x_pos: np.ndarray) -> np.ndarray:
    x2 = x_pos ** 2
    series = 1 / 3 + x2 / 15 + 2 * x2 ** 2 / 189 + x2 ** 3 / 675

    return np.where(np.abs(x_pos) < SERIES_RADIUS, series, _csc2(x_pos) - 1 / x2)


def _summed_images(function, z_pos: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Sum of function(z - offset) over offsets, reduced pairwise per point."""
    flat = z_pos.ravel()
    total = np.empty(flat.shape, dtype=complex)
    block = max(1, IMAGE_BLOCK // max(1, offsets.size))

    for start in range(0, flat.size, block):
        chunk = flat[start:start + block]
        terms = function(chunk[:, None] - offsets[None, :])
        total[start:start + block] = np.sum(terms, axis=1)

    return total.reshape(z_pos.shape)


def lattice_tail(z_pos: np.ndarray, step: complex, truncation: int) -> np.ndarray:
    """Euler-Maclaurin estimate of the pole parts beyond |n| = N on z - n step."""
    ratio = z_pos / step
    count = float(truncation)

    return -(2 / (FOUR_PI * step ** 2)) * (1 / count
                                            - 1 / (2 * count ** 2)
                                            + 1 / (6 * count ** 3)
                                            + ratio ** 2 / count ** 3)


def lattice_sum(z_pos: np.ndarray, step: complex, spec: SeriesSpec) -> np.ndarray:
    """Sum of -1/(4 pi (z - n step)^2) over |n| <= N, plus the optional tail."""
    z_pos = np.asarray(z_pos, dtype=complex)
    offsets = np.arange(-spec.truncation, spec.truncation + 1) * step

    with np.errstate(all='ignore'):
        values = _summed_images(pole_part, z_pos, offsets)

        if spec.tail == TailCorrection.INTEGRAL_TAIL:
            values = values + lattice_tail(z_pos, step, spec.truncation)

    return _checked(values)


@dataclass(frozen=True)
class CorrelatorKernel:
    """Chiral twice-differentiated two-point kernel k(z) of one kind.

    The full kernel is K(dt, dx) = k(dt - dx - i eps) + k(dt + dx - i eps).
    Image kinds sum a plane base kernel over spatial translates by the period.
    """

    kind: KernelKind
    beta: float = math.inf
    period: float | None = None
    series: SeriesSpec | None = None
    base: 'CorrelatorKernel | None' = None

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise InvalidKernelException(f'beta = {self.beta}')

        if self.kind in (KernelKind.PLANE_THERMAL, KernelKind.CYLINDER_THERMAL) \
                and math.isinf(self.beta):
            raise InvalidKernelException('Thermal kernels need a finite beta.')

        if self.kind != KernelKind.PLANE_VACUUM \
                and self.kind != KernelKind.PLANE_THERMAL:
            if self.period is None or not self.period > 0:
                raise InvalidKernelException(f'period = {self.period}')

        if self.is_image_sum:
            if self.series is None:
                raise InvalidSeriesException('Image sums need a SeriesSpec.')

            if self.base is None or self.base.kind not in (
                    KernelKind.PLANE_VACUUM, KernelKind.PLANE_THERMAL):
                raise InvalidKernelException('Images are taken of plane kernels.')

    @classmethod
    def plane_vacuum(cls) -> 'CorrelatorKernel':
        return cls(KernelKind.PLANE_VACUUM)

    @classmethod
    def cylinder_vacuum(cls, period: float) -> 'CorrelatorKernel':
        return cls(KernelKind.CYLINDER_VACUUM, period=period)

    @classmethod
    def plane_thermal(cls, beta: float) -> 'CorrelatorKernel':
        return cls(KernelKind.PLANE_THERMAL, beta=beta)

    @classmethod
    def cylinder_thermal(cls,
                         beta: float,
                         period: float,
                         spec: SeriesSpec
                         ) -> 'CorrelatorKernel':
        return cls(KernelKind.CYLINDER_THERMAL,
                   beta=beta,
                   period=period,
                   series=spec,
                   base=cls.plane_thermal(beta))

    @classmethod
    def image_series(cls,
                     base: 'CorrelatorKernel',
                     period: float,
                     spec: SeriesSpec
                     ) -> 'CorrelatorKernel':
        return cls(KernelKind.IMAGE_SERIES,
                   beta=base.beta,
                   period=period,
                   series=spec,
                   base=base)

    @property
    def is_image_sum(self) -> bool:
        return self.kind in (KernelKind.IMAGE_SERIES, KernelKind.CYLINDER_THERMAL)

    @property
    def is_thermal(self) -> bool:
        return not math.isinf(self.beta)

    @property
    def chart(self) -> Chart:
        if self.period is None:
            return Chart.plane()

        return Chart.cylinder(self.period)

    def describe(self) -> dict:
        return {
            'kernel': self.kind.value,
            'beta': self.beta,
            'period': self.period,
            'series_n': self.series.truncation if self.series else None
        }

    def raw_chiral(self, z_pos: np.ndarray) -> np.ndarray:
        """Unchecked k(z); callers silence floating point warnings."""
        match self.kind:
            case KernelKind.PLANE_VACUUM:
                return pole_part(z_pos)

            case KernelKind.PLANE_THERMAL:
                scale = math.pi / self.beta
                return -scale ** 2 / FOUR_PI * _csch2(scale * z_pos)

            case KernelKind.CYLINDER_VACUUM:
                scale = math.pi / self.period
                return -scale ** 2 / FOUR_PI * _csc2(scale * z_pos)

        offsets = self._image_indices() * self.period
        return _summed_images(self.base.raw_chiral, z_pos, offsets) \
            + self._tail(z_pos)

    def chiral(self, z_pos: np.ndarray) -> np.ndarray | complex:
        z_pos = np.asarray(z_pos, dtype=complex)

        with np.errstate(all='ignore'):
            values = self.raw_chiral(z_pos)

        return _checked(values)

    def evaluate(self,
                 delta_t: np.ndarray,
                 delta_x: np.ndarray,
                 eps: Epsilon | float = DEFAULT_EPSILON
                 ) -> np.ndarray | complex:
        delta_t = np.asarray(delta_t, dtype=complex)
        shift = 1j * epsilon_value(eps)

        return self.chiral(delta_t - delta_x - shift) \
            + self.chiral(delta_t + delta_x - shift)

    __call__ = evaluate

    def _image_indices(self) -> np.ndarray:
        return np.arange(-self.series.truncation, self.series.truncation + 1)

    def _tail(self, z_pos: np.ndarray) -> np.ndarray | float:
        if self.series.tail == TailCorrection.NONE:
            return 0.0

        if self.base.kind == KernelKind.PLANE_VACUUM:
            return lattice_tail(z_pos, self.period, self.series.truncation)

        # Far thermal images decay like 4 exp(-2 pi |w| / beta).
        scale = math.pi / self.beta
        ratio = math.exp(-2 * scale * self.period)
        geometric = ratio ** (self.series.truncation + 1) / (1 - ratio)

        return -(scale ** 2 / math.pi) * 2 * np.cosh(2 * scale * z_pos) * geometric

    def _real_lattice(self, lower: float, upper: float) -> list[float]:
        if self.period is None:
            return [0.0] if lower <= 0 <= upper else []

        first = math.ceil(lower / self.period)
        last = math.floor(upper / self.period)

        if self.is_image_sum:
            first = max(first, -self.series.truncation)
            last = min(last, self.series.truncation)

        return [index * self.period for index in range(first, last + 1)]

    def _imag_lattice(self, lower: float, upper: float) -> list[float]:
        if not self.is_thermal:
            return [0.0] if lower <= 0 <= upper else []

        first = math.ceil(lower / self.beta)
        last = math.floor(upper / self.beta)

        return [index * self.beta for index in range(first, last + 1)]

    def poles_near(self,
                   re_lower: float,
                   re_upper: float,
                   im_lower: float,
                   im_upper: float
                   ) -> list[complex]:
        """Poles of k inside the closed rectangle, all unit double poles."""
        return [complex(real, imag)
                for real in self._real_lattice(re_lower, re_upper)
                for imag in self._imag_lattice(im_lower, im_upper)]

    def regular(self, z_pos: np.ndarray, pole: complex) -> np.ndarray:
        """k(z) - pole_part(z - pole), computed without cancellation near the pole."""
        match self.kind:
            case KernelKind.PLANE_VACUUM:
                return np.zeros_like(z_pos, dtype=complex)

            case KernelKind.PLANE_THERMAL:
                scale = math.pi / self.beta
                return -scale ** 2 / FOUR_PI \
                    * _csch2_regular(scale * (z_pos - pole))

            case KernelKind.CYLINDER_VACUUM:
                scale = math.pi / self.period
                return -scale ** 2 / FOUR_PI \
                    * _csc2_regular(scale * (z_pos - pole))

        image = round(pole.real / self.period)
        indices = self._image_indices()

        others = indices[indices != image] * self.period
        nearest = self.base.regular(z_pos - image * self.period,
                                    pole - image * self.period)

        return _summed_images(self.base.raw_chiral, z_pos, others) \
            + nearest + self._tail(z_pos)


def w2_plane_vacuum(delta_u: np.ndarray,
                    delta_v: np.ndarray,
                    eps: Epsilon | float
                    ) -> np.ndarray | complex:
    z_u = _chiral_argument(delta_u, eps)
    z_v = _chiral_argument(delta_v, eps)

    if np.any(z_u == 0) or np.any(z_v == 0):
        raise SingularArgumentException('coincident points')

    return _checked(-(np.log(z_u) + np.log(z_v)) / FOUR_PI)


def _periodic_factor(z_pos: np.ndarray, period: float) -> np.ndarray:
    return 1 - np.exp(-2j * math.pi * z_pos / period)


def w2_cylinder_vacuum(delta_u: np.ndarray,
                       delta_v: np.ndarray,
                       period: float,
                       eps: Epsilon | float
                       ) -> np.ndarray | complex:
    """Principal logarithm per factor of the periodic light-cone product."""
    factor_u = _periodic_factor(_chiral_argument(delta_u, eps), period)
    factor_v = _periodic_factor(_chiral_argument(delta_v, eps), period)

    if np.any(factor_u == 0) or np.any(factor_v == 0):
        raise SingularArgumentException('periodic light cone')

    return _checked(-(np.log(factor_u) + np.log(factor_v)) / FOUR_PI)


def w2_plane_thermal(delta_u: np.ndarray,
                     delta_v: np.ndarray,
                     beta: float,
                     eps: Epsilon | float
                     ) -> np.ndarray | complex:
    scale = math.pi / beta
    sinh_u = np.sinh(scale * _chiral_argument(delta_u, eps))
    sinh_v = np.sinh(scale * _chiral_argument(delta_v, eps))

    if np.any(sinh_u == 0) or np.any(sinh_v == 0):
        raise SingularArgumentException('thermal lattice')

    return _checked(-(np.log(sinh_u) + np.log(sinh_v)) / FOUR_PI)


def dd_plane_vacuum(delta: np.ndarray, eps: Epsilon | float) -> np.ndarray | complex:
    return CorrelatorKernel.plane_vacuum().chiral(_chiral_argument(delta, eps))


def dd_image_sum(delta: np.ndarray,
                 period: float,
                 eps: Epsilon | float,
                 spec: SeriesSpec
                 ) -> np.ndarray | complex:
    kernel = CorrelatorKernel.image_series(CorrelatorKernel.plane_vacuum(),
                                           period,
                                           spec)

    return kernel.chiral(_chiral_argument(delta, eps))


def dd_cylinder_closed(delta: np.ndarray,
                       period: float,
                       eps: Epsilon | float
                       ) -> np.ndarray | complex:
    kernel = CorrelatorKernel.cylinder_vacuum(period)

    return kernel.chiral(_chiral_argument(delta, eps))


def dd_plane_thermal(delta: np.ndarray,
                     beta: float,
                     eps: Epsilon | float
                     ) -> np.ndarray | complex:
    kernel = CorrelatorKernel.plane_thermal(beta)

    return kernel.chiral(_chiral_argument(delta, eps))


def dd_cylinder_thermal(delta: np.ndarray,
                        beta: float,
                        period: float,
                        eps: Epsilon | float,
                        spec: SeriesSpec
                        ) -> np.ndarray | complex:
    kernel = CorrelatorKernel.cylinder_thermal(beta, period, spec)

    return kernel.chiral(_chiral_argument(delta, eps))


def thermal_image_offset(beta: float, period: float) -> float:
    """Constant by which the doubly periodic kernel exceeds the vacuum
    cylinder kernel as beta grows, from summing spatial images first."""
    return 1 / (2 * period * beta)


def vacuum_distinction(delta: float,
                       period: float,
                       eps: Epsilon | float = DEFAULT_EPSILON
                       ) -> float:
    """Relative gap between the plane and cylinder vacuum kernels at delta."""
    plane = dd_plane_vacuum(delta, eps)
    cylinder = dd_cylinder_closed(delta, period, eps)

    return float(abs(cylinder - plane) / abs(plane))


def cot_series(z_pos: complex,
               truncation: int,
               tail: TailCorrection = TailCorrection.NONE
               ) -> complex:
    """Partial fractions 1/z + 2z sum_k 1/(z^2 - k^2 pi^2), k = 1..K."""
    if truncation < 1:
        raise InvalidSeriesException(f'K = {truncation}')

    z_pos = complex(z_pos)
    indices = np.arange(1, truncation + 1)

    with np.errstate(all='ignore'):
        terms = 1 / (z_pos ** 2 - (indices * math.pi) ** 2)
        value = 1 / z_pos + 2 * z_pos * np.sum(terms) if z_pos != 0 else np.inf

    if not np.isfinite(value):
        raise SingularArgumentException(f'z = {z_pos}')

    if tail == TailCorrection.INTEGRAL_TAIL:
        count = float(truncation)
        ratio = z_pos / math.pi
        value += -2 * z_pos / math.pi ** 2 * (1 / count
                                              - 1 / (2 * count ** 2)
                                              + 1 / (6 * count ** 3)
                                              + ratio ** 2 / (3 * count ** 3))

    return complex(value)


@dataclass(frozen=True)
class DiscrepancyReport:
    coefficients: np.ndarray
    max_residual: float
    max_second_derivative: float
    samples: int


def _sine_product_log(delta_u: np.ndarray,
                      delta_v: np.ndarray,
                      period: float,
                      eps: float
                      ) -> np.ndarray:
    scale = math.pi / period
    product = np.sin(scale * (delta_u - 1j * eps)) \
        * np.sin(scale * (delta_v - 1j * eps))

    return -np.log(product) / FOUR_PI


def _discrepancy(t_pos: np.ndarray,
                 t_prime: np.ndarray,
                 separation: float,
                 period: float,
                 eps: float
                 ) -> np.ndarray:
    delta_u = t_pos - t_prime - separation
    delta_v = t_pos - t_prime + separation

    return w2_cylinder_vacuum(delta_u, delta_v, period, eps) \
        - _sine_product_log(delta_u, delta_v, period, eps)


def discrepancy_prediction(t_pos: np.ndarray,
                           t_prime: np.ndarray,
                           period: float,
                           eps: Epsilon | float
                           ) -> np.ndarray:
    """Closed affine form, valid while both null separations lie in (0, L)."""
    eps = epsilon_value(eps)
    elapsed = np.asarray(t_pos) - np.asarray(t_prime)

    return -(math.log(4) + 1j * math.pi - 2 * math.pi * eps / period
             - 2j * math.pi * elapsed / period) / FOUR_PI


def periodization_discrepancy(t_values: np.ndarray,
                              t_prime_values: np.ndarray,
                              x_pos: float,
                              x_prime: float,
                              period: float,
                              eps: Epsilon | float,
                              step: float = 1e-3
                              ) -> DiscrepancyReport:
    """Fit a + b t + c t' to the gap between the periodic-image log kernel
    and the sine-product log kernel over the (t, t') grid."""
    eps = epsilon_value(eps)
    t_grid, t_prime_grid = np.meshgrid(np.asarray(t_values, dtype=float),
                                       np.asarray(t_prime_values, dtype=float),
                                       indexing='ij')
    t_grid, t_prime_grid = t_grid.ravel(), t_prime_grid.ravel()

    if t_grid.size < 3:
        raise DegenerateGridException(f'{t_grid.size} points')

    separation = x_pos - x_prime
    discrepancy = _discrepancy(t_grid, t_prime_grid, separation, period, eps)

    design = np.column_stack([np.ones_like(t_grid), t_grid, t_prime_grid])
    coefficients, _, rank, _ = np.linalg.lstsq(design.astype(complex),
                                               discrepancy,
                                               rcond=None)
    if rank < design.shape[1]:
        raise DegenerateGridException(f'rank {rank}')

    residual = np.max(np.abs(design @ coefficients - discrepancy))

    curvature = (_discrepancy(t_grid + step, t_prime_grid, separation, period, eps)
                 - 2 * discrepancy
                 + _discrepancy(t_grid - step, t_prime_grid, separation, period, eps)
                 ) / step ** 2

    logger.debug(f'Discrepancy fit over {t_grid.size} points: '
                 f'residual {residual:.3e}, coefficients {coefficients}')

    return DiscrepancyReport(coefficients,
                             float(residual),
                             float(np.max(np.abs(curvature))),
                             int(t_grid.size))


def _correlation(first: BumpFunction,
                 second: BumpFunction,
                 deltas: np.ndarray,
                 derivative: int = 0
                 ) -> np.ndarray:
    """j-th derivative in delta of the overlap of first(s) and second(s - delta)."""
    base_nodes, base_weights = legendre_rule(INNER_ORDER)
    fractions = ((np.arange(INNER_PANELS)[:, None]
                  + (base_nodes[None, :] + 1) / 2) / INNER_PANELS).ravel()
    unit_weights = np.tile(base_weights, INNER_PANELS) / (2 * INNER_PANELS)

    lower = np.maximum(first.support[0], deltas + second.support[0])
    upper = np.minimum(first.support[1], deltas + second.support[1])
    width = np.clip(upper - lower, 0.0, None)

    nodes = lower[:, None] + width[:, None] * fractions[None, :]
    integrand = first(nodes) * second(nodes - deltas[:, None], derivative)
    weights = width[:, None] * unit_weights[None, :]

    return (-1) ** derivative * np.sum(weights * integrand, axis=1)


@lru_cache(maxsize=256)
def _correlation_rule(radius_a: float,
                      order_a: int,
                      radius_b: float,
                      order_b: int,
                      rule_order: int,
                      panels: int
                      ) -> tuple:
    first = BumpFunction(0.0, radius_a, 1.0, order_a)
    second = BumpFunction(0.0, radius_b, 1.0, order_b)

    reach = radius_a + radius_b
    nodes, weights = gauss_legendre(-reach, reach, rule_order, panels)
    values = _correlation(first, second, nodes)

    for array in (nodes, weights, values):
        array.flags.writeable = False

    return first, second, nodes, weights, values


@lru_cache(maxsize=64)
def _curvature_rule(first: BumpFunction,
                    second: BumpFunction,
                    split: float,
                    rule_order: int,
                    panels: int
                    ) -> tuple:
    """R'' on Gauss-Legendre panels either side of split, plus its Taylor
    coefficients at split."""
    reach = first.radius + second.radius
    coefficients = np.array([
        _correlation(first, second, np.array([split]), 2 + power)[0]
        / math.factorial(power)
        for power in range(TAYLOR_DEGREE + 1)
    ])

    sides = []
    for lower, upper in ((-reach, split), (split, reach)):
        if upper <= lower:
            continue

        nodes, weights = gauss_legendre(lower, upper, rule_order, max(1, panels // 2))
        gap = nodes - split

        remainder = _correlation(first, second, nodes, 2) \
            - np.polynomial.polynomial.polyval(gap, coefficients)
        sides.append((lower - split, upper - split, gap, weights, remainder))

    return coefficients, sides


def _log_moment(x_pos: float, shift: complex, power: int) -> complex:
    """Antiderivative of x^power log(x - shift)."""
    x_pos = complex(x_pos)
    series = sum(shift ** (power - index) * x_pos ** (index + 1) / (index + 1)
                 for index in range(power + 1))

    return ((x_pos ** (power + 1) - shift ** (power + 1)) * np.log(x_pos - shift)
            - series) / (power + 1)


def _pole_integral(first: BumpFunction,
                   second: BumpFunction,
                   center: complex,
                   rule_order: int,
                   panels: int
                   ) -> complex:
    """Integral of R(delta) pole_part(delta - center), as R''(delta)
    log(delta - center) / (4 pi) after integrating by parts twice."""
    reach = first.radius + second.radius
    split = min(max(center.real, -reach), reach)
    shift = center - split

    coefficients, sides = _curvature_rule(first, second, split, rule_order, panels)
    total = 0j

    for lower, upper, gap, weights, remainder in sides:
        total += np.sum(weights * remainder * np.log(gap - shift))
        total += sum(coefficient * (_log_moment(upper, shift, power)
                                    - _log_moment(lower, shift, power))
                     for power, coefficient in enumerate(coefficients))

    return total / FOUR_PI


def _overlap_integral(kernel: CorrelatorKernel,
                      rule: tuple,
                      offset: complex,
                      rule_order: int,
                      panels: int
                      ) -> complex:
    """Integral of R(delta) k(delta + offset) with near poles split off."""
    first, second, nodes, weights, values = rule
    reach = first.radius + second.radius
    z_nodes = nodes + offset

    poles = kernel.poles_near(offset.real - reach,
                              offset.real + reach,
                              offset.imag - 2 * reach,
                              offset.imag + 2 * reach)
    if not poles:
        return np.sum(weights * values * kernel.raw_chiral(z_nodes))

    centers = np.array(poles) - offset
    if np.any(centers.imag == 0):
        raise SingularArgumentException('pole on the integration path')

    logger.debug(f'Splitting off {len(poles)} pole(s) at offset {offset}')

    nearest = np.argmin(np.abs(nodes[:, None] - centers[None, :]), axis=1)
    regular = np.zeros(nodes.shape, dtype=complex)

    for index, (pole, center) in enumerate(zip(poles, centers)):
        own = nearest == index

        regular[own] += kernel.regular(z_nodes[own], pole)
        regular[~own] -= pole_part(nodes[~own] - center)

    return np.sum(weights * values * regular) \
        + sum(_pole_integral(first, second, center, rule_order, panels)
              for center in centers)


def _chiral_pairing(kernel: CorrelatorKernel,
                    first: BumpFunction,
                    second: BumpFunction,
                    path: complex,
                    order: int,
                    panels: int,
                    tolerance: float
                    ) -> complex:
    if first.amplitude == 0 or second.amplitude == 0:
        return 0j

    offset = first.center - second.center + path
    estimates = []

    for rule_order in (order, order // 2):
        rule = _correlation_rule(first.radius, first.order,
                                 second.radius, second.order,
                                 rule_order, panels)

        with np.errstate(all='ignore'):
            estimates.append(complex(
                _overlap_integral(kernel, rule, offset, rule_order, panels)))

    if not all(np.isfinite(estimate) for estimate in estimates):
        raise SingularArgumentException(f'offset {offset}')

    if abs(estimates[0] - estimates[1]) > tolerance * max(1.0, abs(estimates[0])):
        raise PrecisionException(f'{estimates[0]} vs {estimates[1]}')

    return first.amplitude * second.amplitude * estimates[0]


def integration_path(kernel: CorrelatorKernel,
                     time_shift: complex,
                     eps: Epsilon | float
                     ) -> complex:
    """Shift with the regulator folded in, kept strictly inside the strip.

    The regulator moves from -i eps at the top edge to +i eps at the lower
    edge Im = -beta, so both edges are reached from the inside.
    """
    time_shift = complex(time_shift)
    imag = time_shift.imag

    if imag > 0 or (kernel.is_thermal and imag < -kernel.beta):
        raise AnalyticityException(f'Im(shift) = {imag}, beta = {kernel.beta}')

    depth = -imag / kernel.beta if kernel.is_thermal else 0.0

    return time_shift - 1j * epsilon_value(eps) * (1 - 2 * depth)


def smear(kernel: CorrelatorKernel,
          f: TestFunction2D,
          g: TestFunction2D,
          time_shift: complex = 0.0,
          eps: Epsilon | float = DEFAULT_EPSILON,
          order: int = QUADRATURE_ORDER,
          panels: int = QUADRATURE_PANELS,
          tolerance: float = QUADRATURE_TOLERANCE
          ) -> complex:
    """Pairing of f and g through K(dt + time_shift, dx), dt = t_f - t_g.

    Product test functions separate in null coordinates, so each chiral half
    reduces to one integral over the overlap of the two bump factors.
    """
    if f.chart != kernel.chart or g.chart != kernel.chart:
        raise ChartMismatchException(f'{kernel.kind.value} on {f.chart}, {g.chart}')

    path = integration_path(kernel, time_shift, eps)
    quadrature = {'order': order, 'panels': panels, 'tolerance': tolerance}

    u_weight = f.v_factor.integral(**quadrature) * g.v_factor.integral(**quadrature)
    v_weight = f.u_factor.integral(**quadrature) * g.u_factor.integral(**quadrature)

    u_part = _chiral_pairing(kernel, f.u_factor, g.u_factor, path, **quadrature)
    v_part = _chiral_pairing(kernel, f.v_factor, g.v_factor, path, **quadrature)

    return complex(0.25 * (u_weight * u_part + v_weight * v_part))
