import numpy as np
import pytest
from pytest import approx

from app.correlators import CorrelatorKernel
from app.covariance import EmbeddingMorphism, QuasiFreeState, state_pullback
from app.exceptions.kms import EmptySignalException, GridTooNarrowException
from app.geometry import Chart, DeckTransformation, Diamond, SpacetimePoint
from app.kms import (
    CorrelatorSeries,
    complex_time_check,
    correlator_timeseries,
    detailed_balance_check,
    kms_time_grid,
    lifted_kms_check,
    positive_frequency_residual,
    state_complex_time_check,
    verify_state,
    verify_vacuum
)
from app.smearing import pushforward_pi_inv, random_test_function, symmetric_grid

COMPLEX_SAMPLES = np.linspace(-2, 2, 5)


def gaussian_series(beta: float) -> CorrelatorSeries:
    """Analytic pair whose transforms satisfy detailed balance at beta."""
    times = symmetric_grid(1201, 0.01)

    return CorrelatorSeries(times,
                            np.exp(-times ** 2).astype(complex),
                            np.exp(-(times + 1j * beta) ** 2))


def test_time_grid_is_symmetric():
    times = kms_time_grid(1.0)

    assert times[0] == approx(-times[-1])
    assert times[-1] >= 6.0
    assert times[1] - times[0] == approx(0.02)


def test_manufactured_series_passes():
    report = detailed_balance_check(gaussian_series(0.5), 0.5, tolerance=1e-10)

    assert report.passed
    assert report.max_residual < 1e-10


def test_manufactured_series_fails_at_wrong_beta():
    report = detailed_balance_check(gaussian_series(0.5), 1.0)

    assert not report.passed
    assert report.max_residual > 1e-2


@pytest.mark.parametrize('seed', [7, 11, 23])
@pytest.mark.parametrize('beta', [0.5, 1.0, 2.0])
def test_plane_thermal_state_is_kms(beta, seed, plane_region):
    rng = np.random.default_rng(seed)
    state = QuasiFreeState(CorrelatorKernel.plane_thermal(beta), 'omega_beta')

    f, g = random_test_function(rng, plane_region), random_test_function(rng, plane_region)
    report = verify_state(state, f, g, kms_time_grid(beta), COMPLEX_SAMPLES)

    assert report.passed
    assert report.max_residual < 1e-4
    assert report.complex_time_residual < 1e-5
    assert report.metadata['beta'] == beta


def test_finer_time_grid_does_not_raise_the_residual(plane_pair):
    state = QuasiFreeState(CorrelatorKernel.plane_thermal(1.0))
    residuals = []

    for step in (0.02, 0.01):
        series = correlator_timeseries(state, *plane_pair, kms_time_grid(1.0, step))
        residuals.append(detailed_balance_check(series, 1.0).max_residual)

    assert residuals[1] <= 1.1 * residuals[0] + 1e-8


def test_complex_time_check_is_stable_under_quadrature_order(plane_pair):
    kernel = CorrelatorKernel.plane_thermal(1.0)
    deviations = [complex_time_check(kernel, 1.0, *plane_pair, COMPLEX_SAMPLES, order=order)
                  for order in (64, 128)]

    assert abs(deviations[1] - deviations[0]) <= 0.1 * deviations[0] + 1e-10


def test_series_is_hermitian_for_equal_functions(plane_pair):
    f, _ = plane_pair
    state = QuasiFreeState(CorrelatorKernel.plane_thermal(1.0))
    series = correlator_timeseries(state, f, f, kms_time_grid(1.0))

    peak = np.max(np.abs(series.forward))

    np.testing.assert_allclose(series.backward, np.conj(series.forward), atol=1e-10 * peak)
    assert series.forward[series.times.size // 2].real > 0


def test_short_grid_is_rejected(plane_pair):
    state = QuasiFreeState(CorrelatorKernel.plane_thermal(1.0))

    with pytest.raises(GridTooNarrowException):
        correlator_timeseries(state, *plane_pair, np.linspace(-1, 1, 101))


def test_empty_signal():
    times = symmetric_grid(101, 0.1)
    series = CorrelatorSeries(times, np.zeros(101, complex), np.zeros(101, complex))

    with pytest.raises(EmptySignalException):
        detailed_balance_check(series, 1.0)


def test_vacuum_has_no_negative_frequencies():
    rng = np.random.default_rng(11)
    region = Diamond(SpacetimePoint(0.0, 0.0), 2.0, 2.0)
    state = QuasiFreeState(CorrelatorKernel.plane_vacuum(), 'omega_0')

    f = random_test_function(rng, region, order=1)
    g = random_test_function(rng, region, order=1)
    residual, passed = verify_vacuum(state, f, g)

    assert passed
    assert residual < 1e-4


def test_positive_frequency_residual_sees_negative_frequencies():
    times = symmetric_grid(1201, 0.01)
    series = CorrelatorSeries(times,
                              np.exp(-times ** 2 - 3j * times),
                              np.zeros(times.size, complex))

    assert positive_frequency_residual(series) > 0.5


def test_lifted_check_on_the_cylinder(cylinder_pair):
    f, g = cylinder_pair
    results = [lifted_kms_check(f, g, 1.0, branch, complex_samples=COMPLEX_SAMPLES)
               for branch in (-1, 0, 1)]

    for result in results:
        assert result.report.passed
        assert result.transport_deviation < 1e-12
        assert result.report.metadata['period'] == Chart.cylinder(2 * np.pi).period
        assert result.report.metadata['complex_time_state'] == 'omega_c'

    residuals = [result.report.max_residual for result in results]
    assert max(residuals) - min(residuals) < 1e-10


def test_pulled_back_continuation_matches_the_plane(cylinder_pair):
    f, g = cylinder_pair
    plane_state = QuasiFreeState(CorrelatorKernel.plane_thermal(1.0), 'omega_p')
    deck = DeckTransformation(-1, 2 * np.pi)

    pulled = state_pullback(plane_state, EmbeddingMorphism.lift(2 * np.pi, -1))
    on_cylinder = state_complex_time_check(pulled, 1.0, f, g, COMPLEX_SAMPLES)
    on_plane = complex_time_check(plane_state.kernel, 1.0,
                                  pushforward_pi_inv(f, deck), pushforward_pi_inv(g, deck),
                                  COMPLEX_SAMPLES)

    assert on_cylinder == approx(on_plane, abs=1e-12)
    assert on_cylinder < 1e-5


def test_report_serialises():
    report = detailed_balance_check(gaussian_series(0.5), 0.5)
    data = report.to_dict()

    assert data['pass'] is True
    assert len(data['frequencies']) == len(data['ratio_residuals'])
    assert data['metadata']['points'] == 1201
