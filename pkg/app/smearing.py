import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from app.geometry import (
    Chart,
    CoveringMap,
    DeckTransformation,
    Diamond
)
from app.exceptions.geometry import (
    ChartMismatchException,
    RegionEscapeException
)
from app.exceptions.quadrature import (
    PrecisionException,
    ShortSeriesException,
    SupportException,
    TruncationException
)

QUADRATURE_ORDER = 64
QUADRATURE_PANELS = 8
QUADRATURE_TOLERANCE = 1e-8


@lru_cache(maxsize=None)
def legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def gauss_legendre(lower: float,
                   upper: float,
                   order: int = QUADRATURE_ORDER,
                   panels: int = 1
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lower, upper]."""
    base_nodes, base_weights = legendre_rule(order)
    edges = np.linspace(lower, upper, panels + 1)

    half_widths = (edges[1:] - edges[:-1]) / 2
    midpoints = (edges[1:] + edges[:-1]) / 2

    nodes = midpoints[:, None] + half_widths[:, None] * base_nodes[None, :]
    weights = half_widths[:, None] * base_weights[None, :]

    return nodes.ravel(), weights.ravel()


@lru_cache(maxsize=None)
def _bump_numerator(order: int) -> Polynomial:
    """Q_k with d^k/ds^k exp(-1/(1-s^2)) = exp(-1/(1-s^2)) Q_k / (1-s^2)^(2k)."""
    s_poly = Polynomial([0, 1])
    one_minus_s2 = Polynomial([1, 0, -1])

    numerator = Polynomial([1])
    for index in range(order):
        numerator = -2 * s_poly * numerator \
            + numerator.deriv() * one_minus_s2 ** 2 \
            + 4 * index * s_poly * numerator * one_minus_s2

    return numerator


@dataclass(frozen=True)
class BumpFunction:
    """amplitude * d^order/dx^order exp(-1/(1-s^2)), s = (x-center)/radius."""

    center: float
    radius: float
    amplitude: float = 1.0
    order: int = 0

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise SupportException('Bump radius must be > 0.')

        if self.order < 0:
            raise SupportException('Derivative order must be >= 0.')

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.radius, self.center + self.radius

    def __call__(self, x_pos: np.ndarray, derivative: int = 0) -> np.ndarray:
        x_pos = np.asarray(x_pos, dtype=float)
        total_order = self.order + derivative

        scaled = (x_pos - self.center) / self.radius
        inside = np.abs(scaled) < 1

        values = np.zeros_like(scaled)
        s_inside = scaled[inside]
        gap = 1 - s_inside ** 2

        values[inside] = np.exp(-1 / gap) \
            * _bump_numerator(total_order)(s_inside) / gap ** (2 * total_order)

        return self.amplitude * values / self.radius ** total_order

    def shifted(self, delta: float) -> 'BumpFunction':
        if delta == 0:
            return self

        return replace(self, center=self.center + delta)

    def scaled(self, factor: float) -> 'BumpFunction':
        return replace(self, amplitude=self.amplitude * factor)

    def integral(self,
                 order: int = QUADRATURE_ORDER,
                 panels: int = QUADRATURE_PANELS,
                 tolerance: float = QUADRATURE_TOLERANCE
                 ) -> float:
        values = []

        for rule_order in (order, order // 2):
            nodes, weights = gauss_legendre(*self.support, rule_order, panels)
            values.append(float(np.sum(weights * self(nodes))))

        if abs(values[0] - values[1]) > tolerance * max(1.0, abs(values[0])):
            raise PrecisionException(f'{values[0]} vs {values[1]}')

        return values[0]


@dataclass(frozen=True)
class TestFunction2D:
    """Product test function u(U) v(V) supported inside a diamond.

    For cylinder regions the factors are written in the chart of the
    canonical lift around the region center.
    """

    __test__ = False

    u_factor: BumpFunction
    v_factor: BumpFunction
    region: Diamond

    def __post_init__(self) -> None:
        center = self.region.center_null
        slack = 1e-12 * (1 + abs(center.U) + abs(center.V))

        u_reach = abs(self.u_factor.center - center.U) + self.u_factor.radius
        v_reach = abs(self.v_factor.center - center.V) + self.v_factor.radius

        if u_reach > self.region.half_u + slack \
                or v_reach > self.region.half_v + slack:
            raise SupportException()

    @classmethod
    def in_region(cls,
                  region: Diamond,
                  u_offset: float = 0.0,
                  v_offset: float = 0.0,
                  fill: float = 0.5,
                  amplitude: float = 1.0,
                  order: int = 0
                  ) -> 'TestFunction2D':
        center = region.center_null

        u_factor = BumpFunction(center.U + u_offset,
                                fill * region.half_u,
                                amplitude,
                                order)
        v_factor = BumpFunction(center.V + v_offset, fill * region.half_v)

        return cls(u_factor, v_factor, region)

    @property
    def chart(self) -> Chart:
        return self.region.chart

    def __call__(self, t_pos: np.ndarray, x_pos: np.ndarray) -> np.ndarray:
        t_pos = np.asarray(t_pos, dtype=float)
        x_pos = np.asarray(x_pos, dtype=float)

        if self.chart.is_cylinder:
            period = self.chart.period
            offset = x_pos - self.region.center.x + period / 2
            x_pos = self.region.center.x + np.mod(offset, period) - period / 2

        return self.u_factor(t_pos - x_pos) * self.v_factor(t_pos + x_pos)

    def scaled(self, factor: float) -> 'TestFunction2D':
        return replace(self, u_factor=self.u_factor.scaled(factor))

    def null_shifted(self,
                     delta_u: float,
                     delta_v: float,
                     region: Diamond
                     ) -> 'TestFunction2D':
        return TestFunction2D(self.u_factor.shifted(delta_u),
                              self.v_factor.shifted(delta_v),
                              region)

    def integral(self, **quadrature) -> float:
        """Integral over dt dx, which is half the integral over dU dV."""
        return 0.5 * self.u_factor.integral(**quadrature) \
            * self.v_factor.integral(**quadrature)


def random_test_function(rng: np.random.Generator,
                         region: Diamond,
                         order: int = 0
                         ) -> TestFunction2D:
    fill = rng.uniform(0.3, 0.5)
    reach = 0.5 * (1 - fill)

    return TestFunction2D.in_region(region,
                                    u_offset=rng.uniform(-reach, reach) * region.half_u,
                                    v_offset=rng.uniform(-reach, reach) * region.half_v,
                                    fill=fill,
                                    amplitude=rng.uniform(0.5, 2.0),
                                    order=order)


def pushforward_pi_inv(function: TestFunction2D,
                       branch: DeckTransformation
                       ) -> TestFunction2D:
    """Lift a cylinder test function onto the branch-n preimage diamond."""
    if not function.chart.is_cylinder:
        raise ChartMismatchException('Expected a cylinder test function.')

    covering = CoveringMap(function.chart.period)
    region = covering.preimage(function.region, branch.n)

    shift = branch.n * covering.period
    return function.null_shifted(-shift, shift, region)


def pushforward_deck(function: TestFunction2D,
                     deck: DeckTransformation
                     ) -> TestFunction2D:
    if function.chart.is_cylinder:
        raise ChartMismatchException('Deck pushforwards act on the plane.')

    if deck.n == 0:
        return function

    region = function.region.translated(0.0, deck.shift)
    return function.null_shifted(-deck.shift, deck.shift, region)


def pushforward_time(function: TestFunction2D, tau: float) -> TestFunction2D:
    """(Lambda_* f)(q) = f(Lambda(-tau) q): both null centers move by tau."""
    if tau == 0:
        return function

    if not math.isfinite(tau):
        raise RegionEscapeException(f'tau = {tau}')

    region = function.region.translated(tau)
    return function.null_shifted(tau, tau, region)


def sample_deviation(first: TestFunction2D,
                     second: TestFunction2D,
                     resolution: int = 50
                     ) -> float:
    """Largest pointwise difference on a null-coordinate grid covering both."""
    u_low = min(first.u_factor.support[0], second.u_factor.support[0])
    u_high = max(first.u_factor.support[1], second.u_factor.support[1])
    v_low = min(first.v_factor.support[0], second.v_factor.support[0])
    v_high = max(first.v_factor.support[1], second.v_factor.support[1])

    u_grid = np.linspace(u_low, u_high, resolution)
    v_grid = np.linspace(v_low, v_high, resolution)

    first_values = np.outer(first.u_factor(u_grid), first.v_factor(v_grid))
    second_values = np.outer(second.u_factor(u_grid), second.v_factor(v_grid))

    return float(np.max(np.abs(first_values - second_values)))


@dataclass(frozen=True)
class SpectralSample:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    grid_step: float

    @property
    def frequency_step(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


def symmetric_grid(count: int, step: float) -> np.ndarray:
    return (np.arange(count) - (count - 1) / 2) * step


def fourier_transform(series: np.ndarray,
                      grid_step: float,
                      times: np.ndarray | None = None,
                      frequencies: np.ndarray | None = None,
                      sign: int = 1,
                      decay_tolerance: float = 1e-12,
                      block_size: int = 256
                      ) -> SpectralSample:
    """Riemann sum for the integral of h(t) exp(sign * i w t) dt.

    Without explicit times the samples sit on a grid symmetric about t = 0.
    """
    series = np.asarray(series, dtype=complex)
    count = series.size

    if count < 2:
        raise ShortSeriesException(f'count = {count}')

    peak = float(np.max(np.abs(series)))
    edge = max(abs(series[0]), abs(series[-1]))

    if peak > 0 and edge > decay_tolerance * peak:
        raise TruncationException(f'edge/peak = {edge / peak:.3e}')

    if times is None:
        times = symmetric_grid(count, grid_step)

    if frequencies is None:
        frequencies = symmetric_grid(count, 2 * np.pi / (count * grid_step))

    amplitudes = np.empty(frequencies.size, dtype=complex)

    for start in range(0, frequencies.size, block_size):
        block = frequencies[start:start + block_size]
        phases = np.exp(sign * 1j * np.outer(block, times))
        amplitudes[start:start + block_size] = \
            grid_step * np.sum(phases * series[None, :], axis=1)

    return SpectralSample(np.asarray(frequencies, dtype=float),
                          amplitudes,
                          grid_step)
