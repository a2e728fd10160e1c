import csv
import json
import logging
import math
from typing import Any, Dict, Iterable, Optional, Sequence, TextIO

from app.models.schemas import OutputFormat

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """CSV cell text; floats keep all 17 significant digits"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_records(records: Iterable[Dict[str, Any]], columns: Sequence[str],
                  stream: TextIO, output_format: OutputFormat = OutputFormat.CSV) -> int:
    """Write records as CSV (header + rows) or JSON lines; returns the row count"""
    count = 0
    if output_format is OutputFormat.CSV:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for record in records:
            writer.writerow([format_value(record.get(column)) for column in columns])
            count += 1
    else:
        for record in records:
            payload = {column: _json_safe(record.get(column)) for column in columns}
            stream.write(json.dumps(payload) + "\n")
            count += 1
    logger.debug(f"Wrote {count} {output_format.value} records")
    return count


def write_to_path(records: Iterable[Dict[str, Any]], columns: Sequence[str],
                  path: Optional[str], fallback: TextIO,
                  output_format: OutputFormat = OutputFormat.CSV) -> int:
    """Write to a file when a path is given, otherwise to the fallback stream"""
    if path is None:
        return write_records(records, columns, fallback, output_format)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        count = write_records(records, columns, handle, output_format)
    logger.info(f"Wrote {count} records to {path}")
    return count
