import math

import pytest
from pytest import approx

from app.exceptions.geometry import (
    ChartMismatchException,
    InvalidRegionException,
    NonEmbeddableRegionException
)
from app.geometry import (
    Chart,
    CoveringMap,
    DeckTransformation,
    Diamond,
    NullCoords,
    SpacetimePoint,
    TimeTranslation,
    branch_order,
    deck_apply,
    diamonds_disjoint,
    from_null,
    preimage_diamonds,
    to_null,
    wrap,
    wrap_centered
)

PERIOD = 2 * math.pi


@pytest.mark.parametrize('point, expected', [
    ((0.0, 0.0), (0.0, 0.0)),
    ((1.0, 1.0), (0.0, 2.0)),
    ((2.0, -1.0), (3.0, 1.0))
])
def test_to_null(point, expected):
    coords = to_null(SpacetimePoint(*point))

    assert (coords.U, coords.V) == expected


def test_from_null_inverts_to_null():
    point = from_null(NullCoords(3.0, 1.0))

    assert (point.t, point.x) == (2.0, -1.0)
    assert to_null(point) == NullCoords(3.0, 1.0)


def test_cylinder_points_are_canonical(cylinder):
    assert SpacetimePoint(0.0, 7.0, cylinder).x == approx(7.0 - PERIOD)
    assert SpacetimePoint(0.0, -1.0, cylinder).x == approx(PERIOD - 1.0)
    assert 0 <= SpacetimePoint(0.0, PERIOD, cylinder).x < PERIOD


def test_wrap_range():
    assert wrap(-1e-18, 1.0) == 0.0
    assert wrap_centered(0.75, 1.0) == approx(-0.25)
    assert wrap_centered(0.25, 1.0) == approx(0.25)


def test_invalid_charts():
    with pytest.raises(InvalidRegionException):
        Chart.cylinder(0.0)

    with pytest.raises(InvalidRegionException):
        Diamond(SpacetimePoint(0.0, 0.0), 0.0, 1.0)


def test_project_and_lift_round_trip(cylinder):
    covering = CoveringMap(PERIOD)
    point = SpacetimePoint(0.4, 2.5, cylinder)

    for branch in (-2, 0, 3):
        lifted = covering.lift(point, branch)

        assert lifted.x == approx(2.5 + branch * PERIOD)
        assert covering.project(lifted).x == approx(point.x)


def test_projection_rejects_cylinder_points(cylinder):
    with pytest.raises(ChartMismatchException):
        CoveringMap(PERIOD).project(SpacetimePoint(0.0, 1.0, cylinder))


def test_deck_apply():
    point = SpacetimePoint(1.0, 0.3)

    assert deck_apply(DeckTransformation(0, PERIOD), point) is point
    assert deck_apply(DeckTransformation(2, PERIOD), point).x == approx(0.3 + 4 * math.pi)


def test_deck_group_law():
    point = SpacetimePoint(1.0, 0.3)
    first, second = DeckTransformation(2, PERIOD), DeckTransformation(-5, PERIOD)

    stepwise = deck_apply(first, deck_apply(second, point))
    composed = deck_apply(first.compose(second), point)

    assert stepwise.x == approx(composed.x)
    assert first.compose(first.inverse()).n == 0


def test_deck_periods_must_match():
    with pytest.raises(ChartMismatchException):
        DeckTransformation(1, 1.0).compose(DeckTransformation(1, 2.0))


def test_projection_is_deck_invariant(rng):
    covering = CoveringMap(PERIOD)

    for _ in range(1000):
        point = SpacetimePoint(rng.uniform(-2, 2), rng.uniform(-30, 30))
        shifted = deck_apply(DeckTransformation(int(rng.integers(-10, 11)), PERIOD), point)

        gap = wrap_centered(covering.project(shifted).x - covering.project(point).x, PERIOD)
        assert abs(gap) < 1e-12


def test_time_translation_commutes_with_projection():
    covering = CoveringMap(PERIOD)
    translation = TimeTranslation(0.7)
    point = SpacetimePoint(0.1, 9.0)

    assert covering.project(translation.apply(point)) \
        == translation.apply(covering.project(point))
    assert translation.compose(TimeTranslation(0.3)).tau == approx(1.0)


def test_membership_matches_null_bounds(cylinder):
    region = Diamond(SpacetimePoint(0.0, 1.0, cylinder), 0.5, 0.5)

    assert region.contains(SpacetimePoint(0.1, 1.2, cylinder))
    assert region.contains(SpacetimePoint(0.1, 1.2 + PERIOD, cylinder))
    assert not region.contains(SpacetimePoint(0.0, 1.6, cylinder))


def test_preimage_diamonds():
    region = Diamond(SpacetimePoint(0.0, 1.0, Chart.cylinder(PERIOD)), 0.5, 0.5)
    preimages = preimage_diamonds(region, 3)

    assert [diamond.center.x for diamond in preimages] \
        == approx([1.0, 1.0 + PERIOD, 1.0 - PERIOD])
    assert all(not diamond.chart.is_cylinder for diamond in preimages)
    assert all(diamond.half_u == 0.5 and diamond.half_v == 0.5 for diamond in preimages)

    for index, first in enumerate(preimages):
        for second in preimages[index + 1:]:
            assert diamonds_disjoint(first, second)


def test_single_preimage_is_branch_zero(cylinder_region):
    (preimage,) = preimage_diamonds(cylinder_region, 1)

    assert preimage.center.x == cylinder_region.center.x


def test_non_embeddable_region(cylinder):
    region = Diamond(SpacetimePoint(0.0, 1.0, cylinder), 3.5, 3.5)

    assert not region.is_embeddable

    with pytest.raises(NonEmbeddableRegionException):
        preimage_diamonds(region, 1)


def test_branch_order():
    assert branch_order(5) == [0, 1, -1, 2, -2]


def test_deck_maps_preimages_onto_each_other(rng, cylinder_region):
    covering = CoveringMap(PERIOD)
    base = covering.preimage(cylinder_region, 0)

    for _ in range(500):
        n = int(rng.integers(-5, 6))
        point = SpacetimePoint(rng.uniform(-0.7, 0.7), 1.0 + rng.uniform(-0.7, 0.7))
        moved = deck_apply(DeckTransformation(n, PERIOD), point)

        assert base.contains(point) == covering.preimage(cylinder_region, n).contains(moved)
