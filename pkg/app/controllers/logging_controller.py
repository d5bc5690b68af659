import os
import sys
from datetime import datetime
from typing import TYPE_CHECKING, Any

from loguru import logger

if TYPE_CHECKING:
    from cover_kms import CoverKMS

LOG_FORMAT = '{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{line} - {message}'


class LoggingController:
    def __init__(self, parent: 'CoverKMS') -> None:
        self.parent = parent
        self.log_dir = os.path.join(parent.settings.config_dir, 'logs')

    def configure(self, verbose: bool = False, log_file: bool = False) -> None:
        logger.remove()
        logger.add(sys.stderr,
                   level='DEBUG' if verbose else 'WARNING',
                   format=LOG_FORMAT)

        if log_file:
            os.makedirs(self.log_dir, exist_ok=True)
            logger.add(os.path.join(self.log_dir, 'run_{time}.log'),
                       level='DEBUG',
                       format=LOG_FORMAT,
                       retention=10)

    @staticmethod
    def _log_object(obj: Any) -> str:
        log_string = f'{type(obj)} state:\n\n'

        for attribute, value in vars(obj).items():
            log_string += f'{attribute}: {value}\n'

        return log_string

    def log_crash(self, message: str) -> str:
        os.makedirs(self.log_dir, exist_ok=True)

        current_time = datetime.now().strftime('%Y_%m_%d-%H-%M-%S')
        log_path = os.path.join(self.log_dir, f'crash_{current_time}.txt')

        with open(log_path, 'w') as text_file:
            text_file.write(f'{message}\n')

            if self.parent.config is not None:
                text_file.write(self._log_object(self.parent.config))

        logger.error(f'Crash log written to {log_path}')
        return log_path
