class KMSException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class GridTooNarrowException(KMSException):
    message = 'The correlator series has not decayed at the ends ' \
              'of the time grid.'


class EmptySignalException(KMSException):
    message = 'The correlator spectrum is empty.'
