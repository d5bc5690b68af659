from enum import Enum, IntEnum


class KernelKind(Enum):
    """Two-point kernels, named the way the command line spells them."""

    PLANE_VACUUM = 'plane-vacuum'
    CYLINDER_VACUUM = 'cylinder-vacuum'
    PLANE_THERMAL = 'plane-thermal'
    CYLINDER_THERMAL = 'cylinder-thermal'
    IMAGE_SERIES = 'image-series'


class TailCorrection(IntEnum):
    NONE = 0
    INTEGRAL_TAIL = 1
