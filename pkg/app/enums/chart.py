from enum import IntEnum


class ChartType(IntEnum):
    PLANE = 0
    CYLINDER = 1
