"""
Базовий модуль для запису результатів.

Містить:
  - sanitize_frame(): очищення DataFrame перед записом
  - sanitize_record(): перетворення numpy-значень у JSON-сумісні
  - ResultSink: абстрактний базовий клас для всіх форматів
"""
from __future__ import annotations

import math
import sys
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..core.utils import ensure_dir


def sanitize_frame(df: pd.DataFrame) -> pd.DataFrame:
    """inf → NaN у float-колонках, рядкові назви колонок."""
    df = df.copy()
    df.columns = [str(c) for c in df.columns]
    float_cols = df.select_dtypes(include=["float64", "float32"]).columns
    if len(float_cols) > 0:
        df[float_cols] = df[float_cols].replace([np.inf, -np.inf], np.nan)
    return df


def sanitize_record(value: Any) -> Any:
    """Рекурсивно: numpy → python, нескінченні та NaN → None."""
    if isinstance(value, dict):
        return {str(k): sanitize_record(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_record(v) for v in value]
    if isinstance(value, np.ndarray):
        return [sanitize_record(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class ResultSink(ABC):
    """Інтерфейс запису результату команди у файл або stdout."""

    def __init__(self, out: str | Path | None = None) -> None:
        self.out = Path(out) if out else None

    @abstractmethod
    def render(self, result: pd.DataFrame | dict | list) -> str:
        """Текстове представлення результату."""

    def write(self, result: pd.DataFrame | dict | list) -> Path | None:
        """Записує результат; повертає шлях або None для stdout."""
        text = self.render(result)
        if self.out is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        if self.out.parent != Path(""):
            ensure_dir(self.out.parent)
        with open(self.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        return self.out
