class ConfigException(Exception):
    message = ''

    def __init__(self, detail: str = '') -> None:
        self.detail = detail
        Exception.__init__(self, f'{self.message} {detail}'.strip())


class InvalidParameterException(ConfigException):
    message = 'A run parameter is outside its valid range.'


class MissingParameterException(ConfigException):
    message = 'A required run parameter is missing.'


class UnknownChoiceException(ConfigException):
    message = 'Unrecognised option value.'
