import json
import math
import os
from typing import Any

from platformdirs import user_config_dir, user_data_dir

from app import __appname__


class Settings:
    def __init__(self, config_dir: str | None = None) -> None:
        app_dir = config_dir or os.environ.get('COVER_KMS_CONFIG_DIR') \
            or os.path.join(user_config_dir(), __appname__)
        os.makedirs(app_dir, exist_ok=True)

        self.config_dir = app_dir
        self._settings_path = os.path.join(app_dir, 'settings.json')
        self._settings = {
            'period': 2 * math.pi,
            'epsilon': 1e-8,
            'series_n': 10_000,
            'tail_correction': True,
            'quadrature_order': 64,
            'quadrature_panels': 8,
            'quadrature_tolerance': 1e-8,
            'output_format': 'json',
            'default_output_dir': os.path.join(user_data_dir(), __appname__)
        }

        if os.path.exists(self._settings_path):
            with open(self._settings_path, 'r') as json_file:
                self._settings.update(json.load(json_file))

    def _save(self) -> None:
        with open(self._settings_path, 'w') as json_file:
            json.dump(self._settings, json_file, indent=2)

    def get(self, setting: str) -> Any:
        return self._settings[setting]

    def set(self, setting: str, value: Any) -> None:
        self._settings[setting] = value
        self._save()

    @property
    def output_dir(self) -> str:
        return os.environ.get('COVER_KMS_OUTPUT_DIR') \
            or self._settings['default_output_dir']
