class GeometryException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class NonEmbeddableRegionException(GeometryException):
    message = 'The region is too wide to fit inside a single chart ' \
              'of the covering map.'


class ChartMismatchException(GeometryException):
    message = 'The chart of the argument does not match the expected chart.'


class RegionEscapeException(GeometryException):
    message = 'The translated region no longer fits inside its chart.'


class InvalidRegionException(GeometryException):
    message = 'The region parameters are outside their valid range.'
