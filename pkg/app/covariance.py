from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from app.correlators import DEFAULT_EPSILON, CorrelatorKernel, Epsilon, smear
from app.exceptions.covariance import (
    CompositionException,
    UnsupportedMorphismException
)
from app.exceptions.geometry import ChartMismatchException
from app.geometry import (
    DEFAULT_PERIOD,
    Chart,
    DeckTransformation,
    TimeTranslation
)
from app.smearing import (
    QUADRATURE_ORDER,
    QUADRATURE_PANELS,
    QUADRATURE_TOLERANCE,
    TestFunction2D,
    pushforward_deck,
    pushforward_pi_inv,
    pushforward_time,
    sample_deviation
)


@dataclass(frozen=True)
class EmbeddingMorphism:
    """Deck branch followed by a time translation, between two charts.

    Supported pairs: cylinder to cylinder (time translations only),
    cylinder to plane (branch of the inverse covering map) and plane to
    plane (deck transformations).
    """

    branch: DeckTransformation
    time_shift: TimeTranslation
    source: Chart
    target: Chart

    def __post_init__(self) -> None:
        if not self.source.is_cylinder:
            if self.target.is_cylinder:
                raise UnsupportedMorphismException('plane to cylinder')
            return

        if self.branch.period != self.source.period:
            raise ChartMismatchException('Branch period differs from the chart.')

        if self.target.is_cylinder:
            if self.target != self.source:
                raise UnsupportedMorphismException('between different cylinders')

            if self.branch.n != 0:
                raise UnsupportedMorphismException('deck branch on the cylinder')

    @classmethod
    def identity(cls, chart: Chart) -> 'EmbeddingMorphism':
        return cls.translation(chart, 0.0)

    @classmethod
    def translation(cls, chart: Chart, tau: float) -> 'EmbeddingMorphism':
        period = chart.period if chart.is_cylinder else DEFAULT_PERIOD

        return cls(DeckTransformation(0, period), TimeTranslation(tau), chart, chart)

    @classmethod
    def lift(cls, period: float, branch: int = 0, tau: float = 0.0) -> 'EmbeddingMorphism':
        return cls(DeckTransformation(branch, period),
                   TimeTranslation(tau),
                   Chart.cylinder(period),
                   Chart.plane())

    @classmethod
    def deck(cls, period: float, n: int, tau: float = 0.0) -> 'EmbeddingMorphism':
        return cls(DeckTransformation(n, period),
                   TimeTranslation(tau),
                   Chart.plane(),
                   Chart.plane())

    @property
    def is_identity(self) -> bool:
        return self.source == self.target \
            and self.branch.n == 0 and self.time_shift.tau == 0

    def push(self, function: TestFunction2D) -> TestFunction2D:
        if function.chart != self.source:
            raise ChartMismatchException(f'{function.chart} vs {self.source}')

        if self.source.is_cylinder and not self.target.is_cylinder:
            function = pushforward_pi_inv(function, self.branch)

        elif not self.source.is_cylinder:
            function = pushforward_deck(function, self.branch)

        return pushforward_time(function, self.time_shift.tau)


def _composed_branch(second: DeckTransformation,
                     first: DeckTransformation
                     ) -> DeckTransformation:
    if first.n == 0:
        return DeckTransformation(second.n, second.period)

    if second.n == 0:
        return DeckTransformation(first.n, first.period)

    return second.compose(first)


def compose(second: EmbeddingMorphism, first: EmbeddingMorphism) -> EmbeddingMorphism:
    """second after first; the target of first must be the source of second."""
    if first.target != second.source:
        raise CompositionException(f'{first.target} then {second.source}')

    branch = _composed_branch(second.branch, first.branch)

    if first.source.is_cylinder:
        branch = DeckTransformation(branch.n, first.source.period)

    return EmbeddingMorphism(branch,
                             second.time_shift.compose(first.time_shift),
                             first.source,
                             second.target)


@dataclass(frozen=True)
class AlgebraElement:
    """Coefficient times an ordered monomial of smeared fields; no generators is the unit."""

    chart: Chart = field(default_factory=Chart.plane)
    generators: tuple[TestFunction2D, ...] = ()
    coefficient: complex = 1.0

    def __post_init__(self) -> None:
        for function in self.generators:
            if function.chart != self.chart:
                raise ChartMismatchException(f'{function.chart} in {self.chart}')

    @classmethod
    def unit(cls, chart: Chart | None = None) -> 'AlgebraElement':
        return cls(chart or Chart.plane())

    @classmethod
    def smeared(cls, function: TestFunction2D) -> 'AlgebraElement':
        return cls(function.chart, (function,))

    @property
    def degree(self) -> int:
        return len(self.generators)

    def product(self, other: 'AlgebraElement') -> 'AlgebraElement':
        if other.chart != self.chart:
            raise ChartMismatchException()

        return AlgebraElement(self.chart,
                              self.generators + other.generators,
                              self.coefficient * other.coefficient)

    __mul__ = product

    def star(self) -> 'AlgebraElement':
        # Real test functions give self-adjoint fields.
        return AlgebraElement(self.chart,
                              self.generators[::-1],
                              np.conj(self.coefficient))


def alpha_apply(morphism: EmbeddingMorphism, element: AlgebraElement) -> AlgebraElement:
    if element.chart != morphism.source:
        raise ChartMismatchException(f'{element.chart} vs {morphism.source}')

    if morphism.is_identity:
        return element

    return AlgebraElement(morphism.target,
                          tuple(morphism.push(function)
                                for function in element.generators),
                          element.coefficient)


def generator_deviation(first: AlgebraElement,
                        second: AlgebraElement,
                        resolution: int = 50
                        ) -> float:
    """Largest pointwise gap between matching generators of two monomials."""
    if first.degree != second.degree or first.chart != second.chart:
        return float('inf')

    deviations = [sample_deviation(left, right, resolution)
                  for left, right in zip(first.generators, second.generators)]
    deviations.append(float(abs(first.coefficient - second.coefficient)))

    return max(deviations)


class State(Protocol):
    @property
    def chart(self) -> Chart: ...

    def evaluate(self, element: AlgebraElement) -> complex: ...

    def two_point(self,
                  f: TestFunction2D,
                  g: TestFunction2D,
                  time_shift: complex = 0.0
                  ) -> complex: ...


def _wick(pairing, functions: Sequence[TestFunction2D]) -> complex:
    if not functions:
        return 1.0 + 0j

    if len(functions) % 2:
        return 0j

    head, rest = functions[0], functions[1:]
    total = 0j

    for index, partner in enumerate(rest):
        remaining = rest[:index] + rest[index + 1:]
        total += pairing(head, partner) * _wick(pairing, remaining)

    return total


@dataclass(frozen=True)
class QuasiFreeState:
    """Gaussian state fixed by its two-point kernel, evaluated by Wick pairing."""

    kernel: CorrelatorKernel
    label: str = 'omega'
    eps: Epsilon = DEFAULT_EPSILON
    order: int = QUADRATURE_ORDER
    panels: int = QUADRATURE_PANELS
    tolerance: float = QUADRATURE_TOLERANCE

    @property
    def chart(self) -> Chart:
        return self.kernel.chart

    def two_point(self,
                  f: TestFunction2D,
                  g: TestFunction2D,
                  time_shift: complex = 0.0
                  ) -> complex:
        return smear(self.kernel, f, g, time_shift,
                     self.eps, self.order, self.panels, self.tolerance)

    def evaluate(self, element: AlgebraElement) -> complex:
        if element.chart != self.chart:
            raise ChartMismatchException(f'{element.chart} vs {self.chart}')

        return complex(element.coefficient * _wick(self.two_point, element.generators))


@dataclass(frozen=True)
class PulledBackState:
    base: State
    morphism: EmbeddingMorphism
    label: str = 'omega_c'

    @property
    def chart(self) -> Chart:
        return self.morphism.source

    def evaluate(self, element: AlgebraElement) -> complex:
        return self.base.evaluate(alpha_apply(self.morphism, element))

    def two_point(self,
                  f: TestFunction2D,
                  g: TestFunction2D,
                  time_shift: complex = 0.0
                  ) -> complex:
        """Base pairing of the pushed functions; complex time shifts pass through."""
        return self.base.two_point(self.morphism.push(f), self.morphism.push(g), time_shift)


def state_pullback(state: State,
                   morphism: EmbeddingMorphism,
                   label: str = 'omega_c'
                   ) -> PulledBackState:
    if state.chart != morphism.target:
        raise ChartMismatchException(f'{state.chart} vs {morphism.target}')

    return PulledBackState(state, morphism, label)


def positivity_margin(state: State, functions: Sequence[TestFunction2D]) -> float:
    """Smallest real part of the state on Phi(f)* Phi(f) over the samples."""
    values = []

    for function in functions:
        element = AlgebraElement.smeared(function)
        values.append(state.evaluate(element.star() * element).real)

    return min(values)


@dataclass(frozen=True)
class CommutationReport:
    passed: bool
    deviation: float


def commutation_check(function: TestFunction2D,
                      tau: float,
                      branch: int,
                      resolution: int = 50,
                      tolerance: float = 1e-12
                      ) -> CommutationReport:
    """Lifting then translating agrees with translating on the cylinder then lifting."""
    if not function.chart.is_cylinder:
        raise ChartMismatchException('Expected a cylinder test function.')

    period = function.chart.period
    element = AlgebraElement.smeared(function)

    translate_first = alpha_apply(
        EmbeddingMorphism.lift(period, branch),
        alpha_apply(EmbeddingMorphism.translation(function.chart, tau), element))

    lift_first = alpha_apply(
        EmbeddingMorphism.translation(Chart.plane(), tau),
        alpha_apply(EmbeddingMorphism.lift(period, branch), element))

    deviation = generator_deviation(translate_first, lift_first, resolution)

    return CommutationReport(deviation <= tolerance, deviation)


def observable_class(element: AlgebraElement,
                     period: float,
                     max_branch: int
                     ) -> list[AlgebraElement]:
    """Deck orbit representatives for n = -max_branch..max_branch."""
    if element.chart.is_cylinder:
        raise ChartMismatchException('Observable classes live on the plane.')

    return [alpha_apply(EmbeddingMorphism.deck(period, n), element)
            for n in range(-max_branch, max_branch + 1)]
