from enum import IntEnum


class ExitStatus(IntEnum):
    PASS = 0
    VERIFICATION_FAILED = 1
    USAGE_ERROR = 2
