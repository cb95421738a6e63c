"""
CSV and JSON writers for command output.
"""
import csv
import io
import json
import os
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.utils.report_logger import ReportLogger
from src.core.utils.run_context import RunContext


def format_cell(value: Any) -> str:
    """Render one value: Fractions as a/b, floats at full round-trip precision."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_cell(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {key: _json_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    return value


class ReportWriter:
    """Writes tables as CSV with a '#' metadata header, plus a JSON mirror."""

    def __init__(self, output_dir: str, context: Optional[RunContext] = None):
        self.logger = ReportLogger()
        self.output_dir = output_dir
        self.context = context or RunContext()

    def render_csv(self, columns: Sequence[str], rows: Sequence[Sequence[Any]],
                   metadata: Optional[Dict[str, Any]] = None) -> str:
        buffer = io.StringIO(newline='')
        for key, value in self._metadata(metadata).items():
            buffer.write(f"# {key}: {format_cell(value)}\n")
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
        return buffer.getvalue()

    def render_json(self, columns: Sequence[str], rows: Sequence[Sequence[Any]],
                    metadata: Optional[Dict[str, Any]] = None) -> str:
        document = {
            'metadata': _json_value(self._metadata(metadata)),
            'columns': list(columns),
            'rows': [dict(zip(columns, _json_value(list(row)))) for row in rows],
        }
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"

    def write_table(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]],
                    metadata: Optional[Dict[str, Any]] = None) -> List[str]:
        """Write <name>.csv and <name>.json under the output directory; returns both paths."""
        try:
            os.makedirs(self.output_dir, exist_ok=True)
            paths = []
            for extension, content in (('csv', self.render_csv(columns, rows, metadata)),
                                       ('json', self.render_json(columns, rows, metadata))):
                path = os.path.join(self.output_dir, f"{name}.{extension}")
                with open(path, 'w', encoding='utf-8', newline='') as handle:
                    handle.write(content)
                paths.append(path)
            self.logger.info(f"Wrote {name} ({len(rows)} rows) to {self.output_dir}")
            return paths
        except OSError as e:
            self.logger.log_error(e, f"write_table({name})")
            raise

    def _metadata(self, extra: Optional[Dict[str, Any]]) -> Dict[str, Any]:
        metadata = self.context.metadata()
        if extra:
            metadata.update(extra)
        return metadata
