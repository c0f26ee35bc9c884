"""Result sinks package."""
from pathlib import Path

from ..core.errors import ConfigurationError
from .base import ResultSink, sanitize_frame, sanitize_record
from .csv_sink import CsvSink
from .json_sink import JsonSink

SINKS = {"csv": CsvSink, "json": JsonSink}


def make_sink(fmt: str, out: "str | Path | None" = None) -> ResultSink:
    if fmt.lower() not in SINKS:
        raise ConfigurationError(f"Невідомий формат '{fmt}'. Доступні: {', '.join(SINKS)}")
    return SINKS[fmt.lower()](out)


__all__ = ["ResultSink", "sanitize_frame", "sanitize_record", "CsvSink", "JsonSink", "make_sink"]
