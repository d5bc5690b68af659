import math

import numpy as np
import pytest
from pytest import approx

from app.correlators import CorrelatorKernel, smear
from app.covariance import (
    AlgebraElement,
    EmbeddingMorphism,
    QuasiFreeState,
    alpha_apply,
    commutation_check,
    compose,
    generator_deviation,
    observable_class,
    positivity_margin,
    state_pullback
)
from app.exceptions.covariance import CompositionException, UnsupportedMorphismException
from app.exceptions.geometry import ChartMismatchException
from app.geometry import Chart, DeckTransformation, TimeTranslation
from app.smearing import pushforward_pi_inv, random_test_function

PERIOD = 2 * math.pi


@pytest.fixture
def plane_state():
    return QuasiFreeState(CorrelatorKernel.plane_thermal(1.0), 'omega_p')


def smeared_pair(f, g):
    return AlgebraElement.smeared(f) * AlgebraElement.smeared(g)


def test_identity_morphism_leaves_elements_alone(cylinder_pair, cylinder):
    element = smeared_pair(*cylinder_pair)
    identity = EmbeddingMorphism.identity(cylinder)

    assert identity.branch.n == 0 and identity.time_shift.tau == 0
    assert alpha_apply(identity, element) is element


def test_compose_with_identity():
    lift = EmbeddingMorphism.lift(PERIOD, 1, 0.3)

    assert compose(EmbeddingMorphism.identity(Chart.plane()), lift) == lift


def test_deck_group_law():
    composed = compose(EmbeddingMorphism.deck(PERIOD, 1), EmbeddingMorphism.deck(PERIOD, 2))

    assert composed.branch.n == 3
    assert composed.time_shift.tau == 0


def test_compose_needs_matching_charts():
    with pytest.raises(CompositionException):
        compose(EmbeddingMorphism.lift(PERIOD), EmbeddingMorphism.lift(PERIOD))


def test_unsupported_morphisms(cylinder):
    with pytest.raises(UnsupportedMorphismException):
        EmbeddingMorphism(DeckTransformation(0, PERIOD), TimeTranslation(0.0),
                          Chart.plane(), cylinder)

    with pytest.raises(UnsupportedMorphismException):
        EmbeddingMorphism(DeckTransformation(1, PERIOD), TimeTranslation(0.0),
                          cylinder, cylinder)


def test_alpha_is_a_homomorphism(cylinder_pair):
    f, g = cylinder_pair
    lift = EmbeddingMorphism.lift(PERIOD, 2, 0.4)

    whole = alpha_apply(lift, smeared_pair(f, g))
    parts = alpha_apply(lift, AlgebraElement.smeared(f)) \
        * alpha_apply(lift, AlgebraElement.smeared(g))

    assert generator_deviation(whole, parts) == 0.0


def test_lift_shifts_support_by_a_period(cylinder_pair):
    lifted = alpha_apply(EmbeddingMorphism.lift(PERIOD, 1),
                         AlgebraElement.smeared(cylinder_pair[0]))

    assert lifted.generators[0].region.center.x == approx(1.0 + PERIOD)
    assert lifted.chart == Chart.plane()


def test_covariance_law_on_random_elements(rng, cylinder_region):
    for _ in range(20):
        element = smeared_pair(random_test_function(rng, cylinder_region),
                               random_test_function(rng, cylinder_region))

        first = EmbeddingMorphism.lift(PERIOD, int(rng.integers(-3, 4)), rng.uniform(-2, 2))
        second = EmbeddingMorphism.deck(PERIOD, int(rng.integers(-3, 4)), rng.uniform(-2, 2))

        composed = alpha_apply(compose(second, first), element)
        stepwise = alpha_apply(second, alpha_apply(first, element))

        assert generator_deviation(composed, stepwise) < 1e-12


def test_commutation_at_zero_time_is_exact(cylinder_pair):
    report = commutation_check(cylinder_pair[0], 0.0, 1)

    assert report.deviation == 0.0
    assert report.passed


def test_commutation_with_translation(cylinder_pair):
    reports = [commutation_check(cylinder_pair[0], 0.3, branch) for branch in (0, 1)]

    assert all(report.passed for report in reports)
    assert all(report.deviation < 1e-12 for report in reports)


def test_algebra_products_and_adjoint(cylinder_pair, cylinder):
    f, g = cylinder_pair
    element = AlgebraElement(cylinder, (f, g), 2 + 1j)

    assert (element * AlgebraElement.unit(cylinder)).generators == (f, g)
    assert element.star().generators == (g, f)
    assert element.star().coefficient == 2 - 1j


def test_mixed_charts_are_rejected(cylinder_pair, plane_pair):
    with pytest.raises(ChartMismatchException):
        AlgebraElement.smeared(cylinder_pair[0]) * AlgebraElement.smeared(plane_pair[0])


def test_state_on_unit_and_odd_elements(plane_state, plane_pair):
    assert plane_state.evaluate(AlgebraElement.unit()) == 1
    assert plane_state.evaluate(AlgebraElement.smeared(plane_pair[0])) == 0


def test_two_point_evaluation(plane_state, plane_pair):
    f, g = plane_pair

    assert plane_state.evaluate(smeared_pair(f, g)) \
        == approx(smear(plane_state.kernel, f, g), rel=1e-14)


def test_four_point_evaluation_uses_wick_pairings(plane_state, plane_pair):
    f, g = plane_pair
    element = smeared_pair(f, g) * smeared_pair(f, g)
    pair = plane_state.two_point

    expected = pair(f, g) * pair(f, g) + pair(f, f) * pair(g, g) + pair(f, g) * pair(g, f)

    assert plane_state.evaluate(element) == approx(expected, rel=1e-12)


def test_pulled_back_state_matches_plane_smearing(plane_state, cylinder_pair):
    f, g = cylinder_pair
    pulled = state_pullback(plane_state, EmbeddingMorphism.lift(PERIOD))
    deck = DeckTransformation(0, PERIOD)

    expected = smear(plane_state.kernel,
                     pushforward_pi_inv(f, deck),
                     pushforward_pi_inv(g, deck))

    assert pulled.chart.is_cylinder
    assert pulled.evaluate(AlgebraElement.unit(pulled.chart)) == 1
    assert pulled.two_point(f, g) == approx(expected, rel=1e-12)


def test_pullback_is_branch_independent(plane_state, rng, cylinder_region):
    pulled = [state_pullback(plane_state, EmbeddingMorphism.lift(PERIOD, branch))
              for branch in (0, 1)]

    for _ in range(20):
        element = smeared_pair(random_test_function(rng, cylinder_region),
                               random_test_function(rng, cylinder_region))

        assert abs(pulled[0].evaluate(element) - pulled[1].evaluate(element)) < 1e-10


def test_pullback_is_contravariant(plane_state, cylinder_pair, cylinder):
    element = smeared_pair(*cylinder_pair)
    first = EmbeddingMorphism.translation(cylinder, 0.7)
    second = EmbeddingMorphism.lift(PERIOD, -1, 0.2)

    at_once = state_pullback(plane_state, compose(second, first))
    in_steps = state_pullback(state_pullback(plane_state, second), first)

    assert abs(at_once.evaluate(element) - in_steps.evaluate(element)) < 1e-10


def test_pullback_checks_the_target_chart(plane_state, cylinder):
    with pytest.raises(ChartMismatchException):
        state_pullback(plane_state, EmbeddingMorphism.translation(cylinder, 1.0))


def test_positivity_is_transported(plane_state, rng, cylinder_region):
    pulled = state_pullback(plane_state, EmbeddingMorphism.lift(PERIOD, 1))
    functions = [random_test_function(rng, cylinder_region) for _ in range(10)]

    assert positivity_margin(pulled, functions) >= -1e-12


def test_observable_class(plane_state, plane_pair):
    element = smeared_pair(*plane_pair)

    assert observable_class(element, PERIOD, 0) == [element]

    members = observable_class(element, PERIOD, 2)
    centers = [member.generators[0].region.center.x for member in members]

    np.testing.assert_allclose(np.diff(centers), PERIOD)

    values = [plane_state.evaluate(member) for member in members]
    assert max(abs(value - values[2]) for value in values) < 1e-10
