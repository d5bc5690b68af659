class CovarianceException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class CompositionException(CovarianceException):
    message = 'Embeddings can only be composed head to tail.'


class UnsupportedMorphismException(CovarianceException):
    message = 'Only deck branches and time translations are supported ' \
              'as embeddings.'
