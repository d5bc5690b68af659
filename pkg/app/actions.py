from argparse import BooleanOptionalAction
from typing import TYPE_CHECKING

from app.objects import ResultTable

if TYPE_CHECKING:
    from cover_kms import CoverKMS


def cmd_w2_table(parent: 'CoverKMS') -> ResultTable:
    return parent.table_controller.w2_table()


def cmd_images_converge(parent: 'CoverKMS') -> ResultTable:
    return parent.convergence_controller.images_converge()


def cmd_kms_verify(parent: 'CoverKMS') -> ResultTable:
    return parent.kms_controller.kms_verify()


def cmd_functor_check(parent: 'CoverKMS') -> ResultTable:
    return parent.functor_controller.functor_check()


__options__ = {
    'period': {'type': float, 'help': 'cylinder circumference L'},
    'beta': {'type': float, 'help': 'inverse temperature'},
    'epsilon': {'type': float, 'help': 'i-epsilon regulator'},
    'series-n': {'type': int, 'help': 'image-sum truncation N'},
    'tail-correction': {'action': BooleanOptionalAction, 'default': None,
                        'help': 'add the integral tail to truncated image sums'},
    'lifted': {'action': 'store_true', 'help': 'check the state lifted from the plane'},
    'branch': {'type': int, 'default': 0, 'help': 'covering branch n of the lift'},
    'grid': {'help': "'start:stop:count' or a comma separated list"},
    'seed': {'type': int, 'default': 0, 'help': 'random seed'},
    'out': {'help': 'output file path'},
    'format': {'help': 'csv or json'},
    'kernel': {'help': 'plane-thermal or plane-vacuum'},
    'delta': {'type': float, 'help': 'separation for the image-sum study'},
    'pairs': {'type': int, 'help': 'number of seeded bump pairs'},
    'verbose': {'action': 'store_true', 'help': 'debug logging on stderr'},
    'log-file': {'action': 'store_true', 'help': 'also log into the config directory'}
}

__common_options__ = ('period', 'epsilon', 'seed', 'out', 'format', 'verbose', 'log-file')

__commands__ = (
    ('w2-table', cmd_w2_table, 'Tabulate the log-level two-point kernels',
     ('grid', 'beta')),
    ('images-converge', cmd_images_converge, 'Image-sum convergence study',
     ('delta', 'series-n', 'tail-correction')),
    ('kms-verify', cmd_kms_verify, 'KMS detailed balance on seeded bump pairs',
     ('beta', 'kernel', 'lifted', 'branch', 'grid', 'pairs')),
    ('functor-check', cmd_functor_check, 'Covariance and geometry laws on seeded inputs',
     ())
)
