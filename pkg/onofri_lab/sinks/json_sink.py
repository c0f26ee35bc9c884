"""JSON sink: відступ 2, нескінченні значення записуються як null."""
from __future__ import annotations

import json

import pandas as pd

from .base import ResultSink, sanitize_frame, sanitize_record


class JsonSink(ResultSink):
    def render(self, result: pd.DataFrame | dict | list) -> str:
        if isinstance(result, pd.DataFrame):
            result = sanitize_frame(result).to_dict(orient="records")
        payload = sanitize_record(result)
        return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
