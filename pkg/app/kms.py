import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from loguru import logger

from app.correlators import DEFAULT_EPSILON, CorrelatorKernel, Epsilon, smear
from app.covariance import (
    AlgebraElement,
    EmbeddingMorphism,
    QuasiFreeState,
    State,
    alpha_apply,
    state_pullback
)
from app.exceptions.kms import EmptySignalException, GridTooNarrowException
from app.geometry import DeckTransformation
from app.smearing import (
    QUADRATURE_ORDER,
    QUADRATURE_PANELS,
    TestFunction2D,
    fourier_transform,
    pushforward_pi_inv,
    pushforward_time,
    symmetric_grid
)

DECAY_TOLERANCE = 1e-10
NOISE_FLOOR = 1e-8
EMPTY_SIGNAL = 1e-14
KMS_TOLERANCE = 1e-4
TIME_STEP = 0.02
VACUUM_DECAY_TOLERANCE = 1e-5
VACUUM_HALF_WIDTH = 40.0
VACUUM_STEP = 0.025


@dataclass(frozen=True)
class CorrelatorSeries:
    """C(t) = w(Phi(f) a_t Phi(g)) and C~(t) = w(a_t Phi(g) Phi(f)) on a uniform grid."""

    times: np.ndarray
    forward: np.ndarray
    backward: np.ndarray

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class KMSReport:
    frequencies: np.ndarray
    ratio_residuals: np.ndarray
    max_residual: float
    complex_time_residual: float
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'max_residual': self.max_residual,
            'complex_time_residual': self.complex_time_residual,
            'tolerance': self.tolerance,
            'pass': self.passed,
            'frequencies': self.frequencies.tolist(),
            'ratio_residuals': self.ratio_residuals.tolist(),
            'metadata': self.metadata
        }


def kms_time_grid(beta: float, step: float = TIME_STEP, margin: float = 2.0) -> np.ndarray:
    """Symmetric grid wide enough for the thermal series to decay below 1e-10."""
    half_width = 4 * beta + margin
    count = 2 * int(math.ceil(half_width / step)) + 1

    return symmetric_grid(count, step)


def _check_decay(series: np.ndarray, name: str) -> None:
    peak = np.max(np.abs(series))
    edge = max(abs(series[0]), abs(series[-1]))

    if peak > 0 and edge > DECAY_TOLERANCE * peak:
        raise GridTooNarrowException(f'{name}: edge/peak = {edge / peak:.3e}')


def correlator_timeseries(state: State,
                          f: TestFunction2D,
                          g: TestFunction2D,
                          times: np.ndarray,
                          check_decay: bool = True
                          ) -> CorrelatorSeries:
    times = np.asarray(times, dtype=float)
    field_f = AlgebraElement.smeared(f)
    field_g = AlgebraElement.smeared(g)

    forward = np.empty(times.size, dtype=complex)
    backward = np.empty(times.size, dtype=complex)

    for index, time in enumerate(times):
        translated = alpha_apply(EmbeddingMorphism.translation(state.chart, time),
                                 field_g)

        forward[index] = state.evaluate(field_f * translated)
        backward[index] = state.evaluate(translated * field_f)

    if check_decay:
        _check_decay(forward, 'C')
        _check_decay(backward, 'C~')

    logger.debug(f'Correlator series over {times.size} times, '
                 f'peak {np.max(np.abs(forward)):.3e}')

    return CorrelatorSeries(times, forward, backward)


def _spectra(series: CorrelatorSeries,
             decay_tolerance: float = DECAY_TOLERANCE
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    forward = fourier_transform(series.forward, series.step, series.times,
                                sign=-1, decay_tolerance=decay_tolerance)
    backward = fourier_transform(series.backward, series.step, series.times,
                                 sign=-1, decay_tolerance=decay_tolerance)

    return forward.frequencies, forward.amplitudes, backward.amplitudes


def detailed_balance_check(series: CorrelatorSeries,
                           beta: float,
                           tolerance: float = KMS_TOLERANCE,
                           complex_time_residual: float = 0.0,
                           metadata: dict | None = None
                           ) -> KMSReport:
    """Compare the transform of C~ with exp(-beta w) times the transform of C.

    The exponential is always applied on its damped side, so the residual
    for w < 0 compares C with exp(beta w) C~ instead.
    """
    frequencies, forward, backward = _spectra(series)
    peak = float(np.max(np.abs(forward)))

    if peak < EMPTY_SIGNAL:
        raise EmptySignalException(f'max |C^| = {peak:.3e}')

    with np.errstate(all='ignore'):
        damping = np.where(frequencies == 0, 1.0, np.exp(-beta * np.abs(frequencies)))

    residuals = np.where(frequencies >= 0,
                         np.abs(backward - damping * forward),
                         np.abs(forward - damping * backward)) / peak

    band = np.abs(forward) > NOISE_FLOOR * peak
    residuals = np.where(band, residuals, 0.0)
    max_residual = float(np.max(residuals))

    passed = max_residual <= tolerance and complex_time_residual <= tolerance

    return KMSReport(frequencies,
                     residuals,
                     max_residual,
                     float(complex_time_residual),
                     tolerance,
                     passed,
                     dict(metadata or {}, beta=beta, grid_step=series.step,
                          points=int(series.times.size)))


def _continuation_deviation(pairing: Callable[..., complex],
                            beta: float,
                            f: TestFunction2D,
                            g: TestFunction2D,
                            samples: np.ndarray
                            ) -> float:
    forward, continued = [], []

    for time in np.asarray(samples, dtype=float):
        forward.append(pairing(f, pushforward_time(g, time), 0.0))
        continued.append(pairing(g, f, complex(time, -beta)))

    forward, continued = np.array(forward), np.array(continued)
    scale = np.max(np.abs(forward))

    if scale < EMPTY_SIGNAL:
        raise EmptySignalException(f'max |C| = {scale:.3e}')

    return float(np.max(np.abs(forward - continued)) / scale)


def complex_time_check(kernel: CorrelatorKernel,
                       beta: float,
                       f: TestFunction2D,
                       g: TestFunction2D,
                       samples: np.ndarray,
                       eps: Epsilon | float = DEFAULT_EPSILON,
                       order: int = QUADRATURE_ORDER,
                       panels: int = QUADRATURE_PANELS
                       ) -> float:
    """Largest |C(t) - C~(t - i beta)| over the samples, relative to max |C|."""
    def pairing(first: TestFunction2D, second: TestFunction2D, shift: complex) -> complex:
        return smear(kernel, first, second, shift, eps, order, panels)

    return _continuation_deviation(pairing, beta, f, g, samples)


def state_complex_time_check(state: State,
                             beta: float,
                             f: TestFunction2D,
                             g: TestFunction2D,
                             samples: np.ndarray
                             ) -> float:
    """complex_time_check through the state's own pairing, for pulled-back states."""
    return _continuation_deviation(state.two_point, beta, f, g, samples)


def vacuum_time_grid(half_width: float = VACUUM_HALF_WIDTH,
                     step: float = VACUUM_STEP
                     ) -> np.ndarray:
    """Vacuum series only decay algebraically, so this grid is wider and
    its edges are held to a looser tolerance."""
    return symmetric_grid(2 * int(math.ceil(half_width / step)) + 1, step)


def positive_frequency_residual(series: CorrelatorSeries,
                                cutoff: float | None = None,
                                decay_tolerance: float = VACUUM_DECAY_TOLERANCE
                                ) -> float:
    """Largest |C^(w)| below -cutoff relative to the peak; zero for a vacuum."""
    frequencies, forward, _ = _spectra(series, decay_tolerance)
    peak = float(np.max(np.abs(forward)))

    if peak < EMPTY_SIGNAL:
        raise EmptySignalException(f'max |C^| = {peak:.3e}')

    if cutoff is None:
        cutoff = 5 * (frequencies[1] - frequencies[0])

    negative = frequencies < -cutoff
    return float(np.max(np.abs(forward[negative])) / peak) if np.any(negative) else 0.0


def describe_function(function: TestFunction2D) -> dict:
    center = function.region.center

    return {
        'region': {
            't': center.t,
            'x': center.x,
            'half_u': function.region.half_u,
            'half_v': function.region.half_v,
            'period': function.chart.period
        },
        'u': [function.u_factor.center, function.u_factor.radius,
              function.u_factor.amplitude, function.u_factor.order],
        'v': [function.v_factor.center, function.v_factor.radius,
              function.v_factor.amplitude, function.v_factor.order]
    }


def verify_state(state: QuasiFreeState,
                 f: TestFunction2D,
                 g: TestFunction2D,
                 times: np.ndarray,
                 complex_samples: np.ndarray,
                 tolerance: float = KMS_TOLERANCE
                 ) -> KMSReport:
    """Series, detailed balance and complex-time continuation in one report."""
    beta = state.kernel.beta
    series = correlator_timeseries(state, f, g, times)

    deviation = complex_time_check(state.kernel, beta, f, g, complex_samples,
                                   state.eps, state.order, state.panels)

    metadata = {
        'kernel': state.kernel.describe(),
        'f': describe_function(f),
        'g': describe_function(g),
        'quadrature_order': state.order
    }

    report = detailed_balance_check(series, beta, tolerance, deviation, metadata)
    logger.info(f'KMS check on {state.label}: residual {report.max_residual:.3e}, '
                f'complex time {deviation:.3e}, pass={report.passed}')

    return report


def verify_vacuum(state: QuasiFreeState,
                  f: TestFunction2D,
                  g: TestFunction2D,
                  times: np.ndarray | None = None,
                  tolerance: float = KMS_TOLERANCE
                  ) -> tuple[float, bool]:
    """Negative-frequency content of C for a ground state, with its verdict."""
    times = vacuum_time_grid() if times is None else times
    series = correlator_timeseries(state, f, g, times, check_decay=False)

    residual = positive_frequency_residual(series)
    logger.info(f'Vacuum spectrum on {state.label}: negative-frequency residual '
                f'{residual:.3e}')

    return residual, residual <= tolerance


def _series_gap(first: CorrelatorSeries, second: CorrelatorSeries) -> float:
    """Pointwise gap between two series sampled on the same grid."""
    return float(max(np.max(np.abs(first.forward - second.forward)),
                     np.max(np.abs(first.backward - second.backward))))


@dataclass(frozen=True)
class LiftedKMSResult:
    report: KMSReport
    cylinder_series: CorrelatorSeries
    plane_series: CorrelatorSeries

    @property
    def transport_deviation(self) -> float:
        return _series_gap(self.cylinder_series, self.plane_series)


def lifted_kms_check(f_c: TestFunction2D,
                     g_c: TestFunction2D,
                     beta: float,
                     branch: int = 0,
                     tolerance: float = KMS_TOLERANCE,
                     times: np.ndarray | None = None,
                     complex_samples: np.ndarray | None = None,
                     eps: Epsilon | float = DEFAULT_EPSILON
                     ) -> LiftedKMSResult:
    """KMS for the cylinder state pulled back from the plane thermal state."""
    period = f_c.chart.period
    times = kms_time_grid(beta) if times is None else times
    complex_samples = np.linspace(-2, 2, 9) if complex_samples is None else complex_samples

    plane_state = QuasiFreeState(CorrelatorKernel.plane_thermal(beta), 'omega_p', eps)
    cylinder_state = state_pullback(plane_state,
                                    EmbeddingMorphism.lift(period, branch),
                                    'omega_c')

    deck = DeckTransformation(branch, period)
    f_p, g_p = pushforward_pi_inv(f_c, deck), pushforward_pi_inv(g_c, deck)

    cylinder_series = correlator_timeseries(cylinder_state, f_c, g_c, times)
    plane_series = correlator_timeseries(plane_state, f_p, g_p, times)

    deviation = state_complex_time_check(cylinder_state, beta, f_c, g_c, complex_samples)

    metadata = {
        'kernel': plane_state.kernel.describe(),
        'period': period,
        'branch': branch,
        'complex_time_state': cylinder_state.label,
        'f': describe_function(f_c),
        'g': describe_function(g_c),
        'quadrature_order': plane_state.order
    }

    transport = _series_gap(cylinder_series, plane_series)
    metadata['transport_deviation'] = transport

    report = detailed_balance_check(cylinder_series, beta, tolerance,
                                    deviation, metadata)
    result = LiftedKMSResult(report, cylinder_series, plane_series)

    logger.info(f'Lifted KMS check, branch {branch}: residual '
                f'{report.max_residual:.3e}, transport {result.transport_deviation:.3e}')

    return result
