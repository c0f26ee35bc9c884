"""CSV sink: фіксований порядок колонок, 17 значущих цифр."""
from __future__ import annotations

import pandas as pd

from .base import ResultSink, sanitize_frame, sanitize_record

FLOAT_FORMAT = "%.17g"


class CsvSink(ResultSink):
    def render(self, result: pd.DataFrame | dict | list) -> str:
        if isinstance(result, pd.DataFrame):
            frame = result
        else:
            # Вкладені записи (атоми, множники) розгортаються у колонки
            records = result if isinstance(result, list) else [result]
            frame = pd.json_normalize(sanitize_record(records))
        return sanitize_frame(frame).to_csv(
            index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
