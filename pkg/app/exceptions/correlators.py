class CorrelatorException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class SingularArgumentException(CorrelatorException):
    message = 'The kernel is singular at the requested separation.'


class AnalyticityException(CorrelatorException):
    message = 'The complex time shift lies outside the analyticity strip ' \
              'of the kernel.'


class InvalidSeriesException(CorrelatorException):
    message = 'Series truncations must be positive integers.'


class DegenerateGridException(CorrelatorException):
    message = 'The grid has fewer points than the fit has parameters.'


class InvalidKernelException(CorrelatorException):
    message = 'The kernel parameters are outside their valid range.'
