"""Onofri Lab package."""
from .core.runner import main
from .sinks import CsvSink, JsonSink, ResultSink, make_sink

__all__ = ["main", "ResultSink", "CsvSink", "JsonSink", "make_sink"]
