from typing import TYPE_CHECKING, Callable

import numpy as np
from loguru import logger

from app.correlators import DEFAULT_EPSILON, CorrelatorKernel, Epsilon
from app.covariance import (
    AlgebraElement,
    EmbeddingMorphism,
    QuasiFreeState,
    alpha_apply,
    commutation_check,
    compose,
    generator_deviation,
    positivity_margin,
    state_pullback
)
from app.geometry import (
    DEFAULT_PERIOD,
    Chart,
    CoveringMap,
    DeckTransformation,
    Diamond,
    SpacetimePoint,
    TimeTranslation,
    deck_apply,
    wrap_centered
)
from app.objects import ResultTable
from app.smearing import TestFunction2D, pushforward_pi_inv, random_test_function

if TYPE_CHECKING:
    from cover_kms import CoverKMS

LAW_TOLERANCE = 1e-10
SAMPLES = 50
MAX_BRANCH = 3
MAX_SHIFT = 2.0
STATE_BETA = 1.0


class FunctorController:
    def __init__(self, parent: 'CoverKMS') -> None:
        self.parent = parent
        self.rng = np.random.default_rng(0)
        self.period = DEFAULT_PERIOD
        self.eps = DEFAULT_EPSILON

    def reset(self) -> None:
        config = self.parent.config

        self.rng = np.random.default_rng(config.seed)
        self.period = config.period
        self.eps = Epsilon(config.epsilon)

    @property
    def cylinder(self) -> Chart:
        return Chart.cylinder(self.period)

    def _branch(self) -> int:
        return int(self.rng.integers(-MAX_BRANCH, MAX_BRANCH + 1))

    def _shift(self) -> float:
        return float(self.rng.uniform(-MAX_SHIFT, MAX_SHIFT))

    def _region(self, chart: Chart) -> Diamond:
        if chart.is_cylinder:
            center = SpacetimePoint(self.rng.uniform(-1, 1),
                                    self.rng.uniform(0, self.period),
                                    chart)
            half_u, half_v = self.rng.uniform(0.05, 0.2, size=2) * self.period

        else:
            center = SpacetimePoint(self.rng.uniform(-1, 1), self.rng.uniform(-2, 2))
            half_u, half_v = self.rng.uniform(0.3, 1.0, size=2)

        return Diamond(center, float(half_u), float(half_v))

    def _function(self, chart: Chart) -> TestFunction2D:
        return random_test_function(self.rng, self._region(chart))

    def _element(self, chart: Chart) -> AlgebraElement:
        return AlgebraElement.smeared(self._function(chart)) \
            * AlgebraElement.smeared(self._function(chart))

    def _plane_point(self) -> SpacetimePoint:
        return SpacetimePoint(self.rng.uniform(-3, 3), self.rng.uniform(-20, 20))

    def identity_law(self) -> float:
        deviation = 0.0

        for chart in (self.cylinder, Chart.plane()):
            for _ in range(SAMPLES // 2):
                element = self._element(chart)
                applied = alpha_apply(EmbeddingMorphism.identity(chart), element)

                if applied is not element:
                    deviation = max(deviation, generator_deviation(applied, element))

        return deviation

    def _morphism_pair(self, index: int) -> tuple[EmbeddingMorphism, EmbeddingMorphism]:
        if index % 2:
            first = EmbeddingMorphism.lift(self.period, self._branch(), self._shift())
            second = EmbeddingMorphism.deck(self.period, self._branch(), self._shift())
        else:
            first = EmbeddingMorphism.translation(self.cylinder, self._shift())
            second = EmbeddingMorphism.lift(self.period, self._branch(), self._shift())

        return first, second

    def composition_law(self) -> float:
        deviation = 0.0

        for index in range(SAMPLES):
            first, second = self._morphism_pair(index)
            element = self._element(self.cylinder)

            composed = alpha_apply(compose(second, first), element)
            stepwise = alpha_apply(second, alpha_apply(first, element))

            deviation = max(deviation, generator_deviation(composed, stepwise))

        return deviation

    def commutation_law(self) -> float:
        return max(commutation_check(self._function(self.cylinder),
                                     self._shift(),
                                     self._branch()).deviation
                   for _ in range(SAMPLES))

    def commutation_at_zero(self) -> float:
        return max(commutation_check(self._function(self.cylinder),
                                     0.0,
                                     self._branch()).deviation
                   for _ in range(SAMPLES))

    def function_diagram_law(self) -> float:
        deviation = 0.0

        for _ in range(SAMPLES):
            function = self._function(self.cylinder)
            lifted = pushforward_pi_inv(function,
                                        DeckTransformation(self._branch(), self.period))

            center = lifted.region.center_null
            u_pos = center.U + self.rng.uniform(-1, 1, 20) * lifted.region.half_u
            v_pos = center.V + self.rng.uniform(-1, 1, 20) * lifted.region.half_v
            t_pos, x_pos = (u_pos + v_pos) / 2, (v_pos - u_pos) / 2

            gap = np.abs(lifted(t_pos, x_pos) - function(t_pos, x_pos))
            deviation = max(deviation, float(np.max(gap)))

        return deviation

    def _projection_gap(self, first: SpacetimePoint, second: SpacetimePoint) -> float:
        return max(abs(first.t - second.t),
                   abs(wrap_centered(first.x - second.x, self.period)))

    def projection_deck_law(self) -> float:
        covering = CoveringMap(self.period)
        deviation = 0.0

        for _ in range(SAMPLES):
            point = self._plane_point()
            deck = DeckTransformation(self._branch(), self.period)

            deviation = max(deviation,
                            self._projection_gap(covering.project(deck_apply(deck, point)),
                                                 covering.project(point)))

        return deviation

    def projection_time_law(self) -> float:
        covering = CoveringMap(self.period)
        deviation = 0.0

        for _ in range(SAMPLES):
            point = self._plane_point()
            translation = TimeTranslation(self._shift())

            deviation = max(deviation,
                            self._projection_gap(covering.project(translation.apply(point)),
                                                 translation.apply(covering.project(point))))

        return deviation

    def pullback_law(self) -> float:
        plane_state = QuasiFreeState(CorrelatorKernel.plane_thermal(STATE_BETA),
                                     'omega_p', self.eps)
        deviation = 0.0

        for index in range(SAMPLES):
            first, second = self._morphism_pair(2 * index)
            element = self._element(self.cylinder)

            at_once = state_pullback(plane_state, compose(second, first))
            in_steps = state_pullback(state_pullback(plane_state, second), first)

            gap = abs(at_once.evaluate(element) - in_steps.evaluate(element))
            deviation = max(deviation, gap)

        return deviation

    def positivity_law(self) -> float:
        plane_state = QuasiFreeState(CorrelatorKernel.plane_thermal(STATE_BETA),
                                     'omega_p', self.eps)
        cylinder_state = state_pullback(plane_state,
                                        EmbeddingMorphism.lift(self.period, self._branch()))

        functions = [self._function(self.cylinder) for _ in range(SAMPLES)]
        return max(0.0, -positivity_margin(cylinder_state, functions))

    def laws(self) -> dict[str, tuple[Callable[[], float], float]]:
        """Each law with the largest deviation it tolerates."""
        return {
            'identity': (self.identity_law, 0.0),
            'composition': (self.composition_law, LAW_TOLERANCE),
            'lift_time_commutation': (self.commutation_law, LAW_TOLERANCE),
            'lift_time_commutation_tau0': (self.commutation_at_zero, 0.0),
            'test_function_diagram': (self.function_diagram_law, LAW_TOLERANCE),
            'projection_deck': (self.projection_deck_law, LAW_TOLERANCE),
            'projection_time': (self.projection_time_law, LAW_TOLERANCE),
            'pullback_contravariance': (self.pullback_law, LAW_TOLERANCE),
            'positivity': (self.positivity_law, LAW_TOLERANCE)
        }

    def functor_check(self) -> ResultTable:
        self.reset()
        table = ResultTable(['law', 'samples', 'max_deviation', 'tolerance', 'pass'])

        for name, (law, tolerance) in self.laws().items():
            deviation = law()
            passed = deviation <= tolerance

            table.add_row(name, SAMPLES, deviation, tolerance, passed)
            logger.debug(f'{name}: max deviation {deviation:.3e}')

        table.passed = all(table.column('pass'))
        table.summary = {'max_deviation': max(table.column('max_deviation'))}

        return table
