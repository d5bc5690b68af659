import math
from dataclasses import dataclass, field

from app.enums.chart import ChartType
from app.exceptions.geometry import (
    ChartMismatchException,
    InvalidRegionException,
    NonEmbeddableRegionException
)

DEFAULT_PERIOD = 2 * math.pi


@dataclass(frozen=True)
class Chart:
    kind: ChartType
    period: float | None = None

    def __post_init__(self) -> None:
        if self.kind == ChartType.CYLINDER:
            if self.period is None or not self.period > 0:
                raise InvalidRegionException('Cylinder period must be > 0.')

        elif self.period is not None:
            raise InvalidRegionException('The plane chart has no period.')

    @classmethod
    def plane(cls) -> 'Chart':
        return cls(ChartType.PLANE)

    @classmethod
    def cylinder(cls, period: float = DEFAULT_PERIOD) -> 'Chart':
        return cls(ChartType.CYLINDER, float(period))

    @property
    def is_cylinder(self) -> bool:
        return self.kind == ChartType.CYLINDER


def wrap(x_pos: float, period: float) -> float:
    """Floored modulo onto the canonical range [0, period)."""
    wrapped = x_pos % period

    return 0.0 if wrapped >= period else wrapped


def wrap_centered(x_pos: float, period: float) -> float:
    """Representative of x_pos in [-period/2, period/2)."""
    return wrap(x_pos + period / 2, period) - period / 2


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    chart: Chart = field(default_factory=Chart.plane)

    def __post_init__(self) -> None:
        if self.chart.is_cylinder:
            object.__setattr__(self, 'x', wrap(self.x, self.chart.period))


@dataclass(frozen=True)
class NullCoords:
    U: float
    V: float


def to_null(point: SpacetimePoint) -> NullCoords:
    return NullCoords(point.t - point.x, point.t + point.x)


def from_null(coords: NullCoords, chart: Chart | None = None) -> SpacetimePoint:
    return SpacetimePoint((coords.U + coords.V) / 2,
                          (coords.V - coords.U) / 2,
                          chart or Chart.plane())


@dataclass(frozen=True)
class Diamond:
    """Causal diamond |U - U_c| < half_u, |V - V_c| < half_v."""

    center: SpacetimePoint
    half_u: float
    half_v: float

    def __post_init__(self) -> None:
        if not (self.half_u > 0 and self.half_v > 0):
            raise InvalidRegionException('Null half widths must be > 0.')

    @property
    def chart(self) -> Chart:
        return self.center.chart

    @property
    def spatial_extent(self) -> float:
        return self.half_u + self.half_v

    @property
    def is_embeddable(self) -> bool:
        if not self.chart.is_cylinder:
            return True

        return self.spatial_extent < self.chart.period

    @property
    def center_null(self) -> NullCoords:
        return to_null(self.center)

    def lift_x(self, x_pos: float) -> float:
        """Coordinate of x_pos in the chart around the center."""
        if not self.chart.is_cylinder:
            return x_pos

        period = self.chart.period
        return self.center.x + wrap_centered(x_pos - self.center.x, period)

    def contains(self, point: SpacetimePoint) -> bool:
        if point.chart != self.chart:
            raise ChartMismatchException()

        center = self.center_null
        lifted = to_null(SpacetimePoint(point.t, self.lift_x(point.x)))

        return abs(lifted.U - center.U) < self.half_u \
            and abs(lifted.V - center.V) < self.half_v

    def translated(self, delta_t: float, delta_x: float = 0.0) -> 'Diamond':
        center = SpacetimePoint(self.center.t + delta_t,
                                self.center.x + delta_x,
                                self.chart)

        return Diamond(center, self.half_u, self.half_v)

    def with_chart(self, chart: Chart, x_shift: float = 0.0) -> 'Diamond':
        center = SpacetimePoint(self.center.t,
                                self.center.x + x_shift,
                                chart)

        return Diamond(center, self.half_u, self.half_v)


@dataclass(frozen=True)
class DeckTransformation:
    n: int
    period: float = DEFAULT_PERIOD

    @classmethod
    def identity(cls, period: float = DEFAULT_PERIOD) -> 'DeckTransformation':
        return cls(0, period)

    @property
    def shift(self) -> float:
        return self.n * self.period

    def compose(self, other: 'DeckTransformation') -> 'DeckTransformation':
        if other.period != self.period:
            raise ChartMismatchException('Deck periods differ.')

        return DeckTransformation(self.n + other.n, self.period)

    def inverse(self) -> 'DeckTransformation':
        return DeckTransformation(-self.n, self.period)


@dataclass(frozen=True)
class TimeTranslation:
    tau: float

    def apply(self, point: SpacetimePoint) -> SpacetimePoint:
        return SpacetimePoint(point.t + self.tau, point.x, point.chart)

    def compose(self, other: 'TimeTranslation') -> 'TimeTranslation':
        return TimeTranslation(self.tau + other.tau)

    def inverse(self) -> 'TimeTranslation':
        return TimeTranslation(-self.tau)


def deck_apply(deck: DeckTransformation,
               point: SpacetimePoint
               ) -> SpacetimePoint:
    if point.chart.is_cylinder:
        raise ChartMismatchException('Deck transformations act on the plane.')

    if deck.n == 0:
        return point

    return SpacetimePoint(point.t, point.x + deck.shift, point.chart)


@dataclass(frozen=True)
class CoveringMap:
    period: float = DEFAULT_PERIOD

    def __post_init__(self) -> None:
        if not self.period > 0:
            raise InvalidRegionException('Covering period must be > 0.')

    @property
    def chart(self) -> Chart:
        return Chart.cylinder(self.period)

    def project(self, point: SpacetimePoint) -> SpacetimePoint:
        if point.chart.is_cylinder:
            raise ChartMismatchException('Projection expects a plane point.')

        return SpacetimePoint(point.t, point.x, self.chart)

    def lift(self, point: SpacetimePoint, branch: int = 0) -> SpacetimePoint:
        if point.chart != self.chart:
            raise ChartMismatchException('Lift expects a cylinder point.')

        return SpacetimePoint(point.t, point.x + branch * self.period)

    def check_embeddable(self, region: Diamond) -> None:
        if region.chart != self.chart:
            raise ChartMismatchException('Region is not on this cylinder.')

        if not region.is_embeddable:
            raise NonEmbeddableRegionException(
                f'extent {region.spatial_extent} >= period {self.period}')

    def preimage(self, region: Diamond, branch: int = 0) -> Diamond:
        self.check_embeddable(region)

        return region.with_chart(Chart.plane(), branch * self.period)


def branch_order(count: int) -> list[int]:
    """Branch indices 0, 1, -1, 2, -2, ... truncated to count entries."""
    branches = [0]

    for index in range(1, count):
        step = (index + 1) // 2
        branches.append(step if index % 2 else -step)

    return branches


def preimage_diamonds(region: Diamond, count: int) -> list[Diamond]:
    if count < 1:
        raise InvalidRegionException('At least one preimage is required.')

    if not region.chart.is_cylinder:
        raise ChartMismatchException('Preimages are taken of cylinder regions.')

    covering = CoveringMap(region.chart.period)

    return [covering.preimage(region, branch) for branch in branch_order(count)]


def diamonds_disjoint(first: Diamond, second: Diamond) -> bool:
    first_null, second_null = first.center_null, second.center_null

    return abs(first_null.U - second_null.U) >= first.half_u + second.half_u \
        or abs(first_null.V - second_null.V) >= first.half_v + second.half_v
