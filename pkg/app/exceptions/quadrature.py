class QuadratureException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class TruncationException(QuadratureException):
    message = 'The sampled series has not decayed at the ends of the grid, ' \
              'the transform would carry truncation bias.'


class PrecisionException(QuadratureException):
    message = 'Gauss-Legendre rules of order n and n/2 disagree ' \
              'beyond the quadrature tolerance.'


class SupportException(QuadratureException):
    message = 'The test function support does not fit inside its region.'


class ShortSeriesException(TruncationException):
    message = 'A transform needs at least two samples.'
