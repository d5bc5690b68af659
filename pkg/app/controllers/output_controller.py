import json
import math
import os
import tempfile
from typing import TYPE_CHECKING, Any

import numpy as np
from loguru import logger

from app.objects import ResultTable
from app.utils import format_float

if TYPE_CHECKING:
    from cover_kms import CoverKMS


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}

    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(item) for item in value]

    if isinstance(value, (bool, np.bool_)):
        return bool(value)

    if isinstance(value, (int, np.integer)):
        return int(value)

    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]

    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_float(value)

    if hasattr(value, 'value'):
        return value.value

    return value


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))

    if isinstance(value, (float, np.floating)):
        return format_float(float(value))

    return str(value)


class OutputController:
    def __init__(self, parent: 'CoverKMS') -> None:
        self.parent = parent

    def output_path(self, extension: str) -> str:
        config = self.parent.config

        if config.out:
            return config.out

        file_name = f'{config.command.replace("-", "_")}.{extension}'
        return os.path.join(self.parent.settings.output_dir, file_name)

    @staticmethod
    def write_atomic(path: str, text: str) -> None:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)

        handle, temp_path = tempfile.mkstemp(dir=directory, suffix='.tmp')

        try:
            with os.fdopen(handle, 'w', newline='\n') as text_file:
                text_file.write(text)

            os.replace(temp_path, path)

        except OSError:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise

    def render_csv(self, table: ResultTable) -> str:
        config = json.dumps(to_jsonable(self.parent.config.to_dict()), sort_keys=True)
        summary = json.dumps(to_jsonable(table.summary), sort_keys=True)

        lines = [f'# config: {config}',
                 f'# summary: {summary}',
                 f'# pass: {str(table.passed).lower()}',
                 ','.join(table.columns)]

        for row in table.rows:
            lines.append(','.join(format_cell(value) for value in row))

        return '\n'.join(lines) + '\n'

    def render_json(self, table: ResultTable) -> str:
        payload = {
            'config': self.parent.config.to_dict(),
            'results': dict(table.summary, rows=table.records),
            'pass': table.passed
        }

        return json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + '\n'

    def write(self, table: ResultTable) -> str:
        output_format = self.parent.config.output_format
        path = self.output_path(output_format)

        if output_format == 'csv':
            text = self.render_csv(table)
        else:
            text = self.render_json(table)

        self.write_atomic(path, text)
        logger.info(f'Wrote {len(table)} rows to {path}')

        return path
