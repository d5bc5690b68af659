import math

import numpy as np
import pytest
from pytest import approx

from app.exceptions.geometry import ChartMismatchException, RegionEscapeException
from app.exceptions.quadrature import SupportException, TruncationException
from app.geometry import CoveringMap, DeckTransformation, SpacetimePoint
from app.smearing import (
    BumpFunction,
    TestFunction2D,
    fourier_transform,
    gauss_legendre,
    pushforward_deck,
    pushforward_pi_inv,
    pushforward_time,
    random_test_function,
    sample_deviation,
    symmetric_grid
)

PERIOD = 2 * math.pi
BUMP_INTEGRAL = 0.4439938161680794


def test_gauss_legendre_is_exact_for_polynomials():
    nodes, weights = gauss_legendre(0.0, 2.0, order=8, panels=3)

    assert np.sum(weights * nodes ** 5) == approx(64 / 6, rel=1e-14)


def test_bump_values():
    bump = BumpFunction(0.0, 1.0)

    assert bump(0.0) == approx(math.exp(-1))
    assert bump(np.array([-1.0, 1.0, 1.5])).tolist() == [0.0, 0.0, 0.0]
    assert bump.support == (-1.0, 1.0)


def test_bump_scaling_and_shift():
    bump = BumpFunction(0.5, 0.25, amplitude=3.0)

    assert bump.shifted(0.0) is bump
    assert bump.shifted(1.0)(1.5) == approx(bump(0.5))
    assert bump.scaled(2.0)(0.6) == approx(2 * bump(0.6))


def test_bump_derivative_matches_finite_differences():
    bump = BumpFunction(0.2, 0.7)
    derivative = BumpFunction(0.2, 0.7, order=1)
    step = 1e-5

    for x_pos in np.linspace(-0.4, 0.8, 13):
        central = (bump(x_pos + step) - bump(x_pos - step)) / (2 * step)
        assert derivative(x_pos) == approx(central, abs=1e-8)


def test_bump_integral():
    assert BumpFunction(0.0, 1.0).integral() == approx(BUMP_INTEGRAL, rel=1e-10)
    assert BumpFunction(3.0, 0.5, 2.0).integral() == approx(BUMP_INTEGRAL, rel=1e-10)


def test_derivative_bumps_have_zero_integral():
    for order in (1, 2, 3):
        assert abs(BumpFunction(0.0, 0.6, order=order).integral()) < 1e-10


def test_invalid_bumps():
    with pytest.raises(SupportException):
        BumpFunction(0.0, 0.0)

    with pytest.raises(SupportException):
        BumpFunction(0.0, 1.0, order=-1)


def test_support_must_fit_region(plane_region):
    with pytest.raises(SupportException):
        TestFunction2D.in_region(plane_region, u_offset=0.3, fill=0.5)


def test_random_test_functions_fit_their_region(rng, cylinder_region):
    for _ in range(20):
        function = random_test_function(rng, cylinder_region)

        assert function.region is cylinder_region


def test_test_function_integral(plane_region):
    function = TestFunction2D.in_region(plane_region, fill=1.0)

    assert function.integral() == approx(0.5 * (0.5 * BUMP_INTEGRAL) ** 2, rel=1e-10)


def test_lift_on_branch_zero_keeps_values(cylinder_pair):
    f_c, _ = cylinder_pair
    f_p = pushforward_pi_inv(f_c, DeckTransformation(0, PERIOD))

    assert f_p.region.center.x == f_c.region.center.x
    assert not f_p.chart.is_cylinder
    assert sample_deviation(f_p, f_c) == 0.0


def test_lift_on_branch_one_shifts_support(cylinder_pair):
    f_c, _ = cylinder_pair
    f_p = pushforward_pi_inv(f_c, DeckTransformation(1, PERIOD))

    assert f_p.region.center.x == approx(1.0 + PERIOD)
    assert f_p(0.0, 1.0 + PERIOD) == approx(f_c(0.0, 1.0))
    assert f_p(0.0, 1.0) == 0.0


def test_lifted_function_factors_through_projection(cylinder_pair):
    f_c, _ = cylinder_pair
    covering = CoveringMap(PERIOD)

    for branch in (-1, 0, 2):
        f_p = pushforward_pi_inv(f_c, DeckTransformation(branch, PERIOD))
        center = f_p.region.center

        t_grid = center.t + np.linspace(-0.6, 0.6, 50)
        x_grid = center.x + np.linspace(-0.6, 0.6, 50)

        for t_pos in t_grid[::7]:
            for x_pos in x_grid:
                projected = covering.project(SpacetimePoint(t_pos, x_pos))
                assert f_p(t_pos, x_pos) == approx(f_c(projected.t, projected.x), abs=1e-12)


def test_lift_requires_cylinder(plane_pair):
    with pytest.raises(ChartMismatchException):
        pushforward_pi_inv(plane_pair[0], DeckTransformation(1, PERIOD))


def test_deck_pushforward_moves_support(plane_pair):
    f, _ = plane_pair
    shifted = pushforward_deck(f, DeckTransformation(1, PERIOD))

    assert pushforward_deck(f, DeckTransformation(0, PERIOD)) is f
    assert shifted(0.0, PERIOD) == approx(f(0.0, 0.0))


def test_time_pushforward(plane_pair):
    f, _ = plane_pair
    moved = pushforward_time(f, 1.0)

    assert pushforward_time(f, 0.0) is f
    assert moved.u_factor.center == approx(f.u_factor.center + 1.0)
    assert moved.v_factor.center == approx(f.v_factor.center + 1.0)
    assert moved(1.2, 0.1) == approx(f(0.2, 0.1))


def test_time_pushforward_group_law(plane_pair):
    f, _ = plane_pair
    stepwise = pushforward_time(pushforward_time(f, 0.4), -1.3)

    assert sample_deviation(stepwise, pushforward_time(f, -0.9)) < 1e-12


def test_time_pushforward_cannot_escape(plane_pair):
    with pytest.raises(RegionEscapeException):
        pushforward_time(plane_pair[0], math.inf)


def test_fourier_of_zero():
    spectrum = fourier_transform(np.zeros(101), 0.1)

    assert np.all(spectrum.amplitudes == 0)


def test_fourier_of_gaussian():
    times = symmetric_grid(2401, 0.01)
    frequencies = np.linspace(-5, 5, 41)
    spectrum = fourier_transform(np.exp(-times ** 2), 0.01, times, frequencies)

    expected = math.sqrt(math.pi) * np.exp(-frequencies ** 2 / 4)

    np.testing.assert_allclose(spectrum.amplitudes.real, expected, atol=1e-8)
    assert np.max(np.abs(spectrum.amplitudes.imag)) < 1e-12
    assert spectrum.frequency_step == approx(0.25)


def test_fourier_sign_conjugates_real_input():
    times = symmetric_grid(801, 0.02)
    series = np.exp(-(times - 0.5) ** 2)

    forward = fourier_transform(series, 0.02, times, sign=1)
    backward = fourier_transform(series, 0.02, times, sign=-1)

    np.testing.assert_allclose(forward.amplitudes, np.conj(backward.amplitudes), atol=1e-13)


def test_fourier_rejects_undecayed_series():
    with pytest.raises(TruncationException):
        fourier_transform(np.ones(64), 0.1)


@pytest.mark.parametrize('count', [0, 1])
def test_fourier_needs_two_samples(count):
    with pytest.raises(TruncationException):
        fourier_transform(np.zeros(count), 0.1)


def test_pushforwards_preserve_the_integral(rng, plane_region, cylinder_region):
    for _ in range(20):
        f_c = random_test_function(rng, cylinder_region)
        f_p = random_test_function(rng, plane_region)
        deck = DeckTransformation(int(rng.integers(-5, 6)), PERIOD)

        assert pushforward_pi_inv(f_c, deck).integral() == approx(f_c.integral(), abs=1e-10)
        assert pushforward_deck(f_p, deck).integral() == approx(f_p.integral(), abs=1e-10)
        assert pushforward_time(f_p, rng.uniform(-3, 3)).integral() \
            == approx(f_p.integral(), abs=1e-10)
