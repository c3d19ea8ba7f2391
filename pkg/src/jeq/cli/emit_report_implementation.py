import json
import logging
import sys
from typing import Any, Iterable, Literal, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel

from jeq.errors import IoError

logger = logging.getLogger(__name__)

ReportFormat = Literal["json", "csv"]


def _plain(record: Any) -> Any:
    if isinstance(record, BaseModel):
        return record.report() if hasattr(record, "report") else record.model_dump()
    if isinstance(record, (list, tuple)):
        return [_plain(item) for item in record]
    return record


def _columns(data: Any, columns: Tuple[str, str]) -> Iterable[Tuple[Any, Any]]:
    x, y = columns
    if isinstance(data, Mapping):
        # a report holding parallel lists, e.g. spacing against sup_error
        return zip(data[x], data[y])
    return ((row[x], row[y]) for row in data)


def render_report(record: Any, format: ReportFormat = "json", columns: Optional[Sequence[str]] = None) -> str:
    """
    Serializes a report to text.

    JSON is written with sorted keys so the same record always renders to the
    same bytes. The CSV form is two columns under a ``#`` header, readable by
    gnuplot with ``set datafile separator ","``.

    Args:
        record: A pydantic report, a dict, or a list of step records.
        format: "json" or "csv".
        columns: The two keys to tabulate in CSV form.
    """
    data = _plain(record)
    if format == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if format == "csv":
        if columns is None or len(columns) != 2:
            raise ValueError("csv reports need exactly two columns")
        lines = [f"# {columns[0]},{columns[1]}"]
        lines.extend(f"{a!r},{b!r}" for a, b in _columns(data, tuple(columns)))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format}")


def emit_report(
    record: Any,
    format: ReportFormat = "json",
    path: Optional[str] = None,
    columns: Optional[Sequence[str]] = None,
) -> None:
    """
    Writes a report to a file, or to stdout when no path is given.

    Raises:
        IoError: If the file cannot be written.
    """
    text = render_report(record, format, columns)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoError(f"cannot write report {path}: {exc}") from exc
    logger.info("wrote %s report to %s", format, path)
