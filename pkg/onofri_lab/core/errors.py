"""
Ієрархія винятків лабораторії.

Бібліотечний код піднімає ці винятки, runner перехоплює OnofriLabError,
друкує через print_tech_error і перетворює на код завершення.
"""
from __future__ import annotations

from typing import Sequence


class OnofriLabError(Exception):
    """Базовий виняток для всіх помилок пакету."""


class QuadratureError(OnofriLabError):
    """Некоректна квадратура: нескінченні значення у вузлах, перекриття шапок, мала роздільність."""


class OverflowGuardError(OnofriLabError):
    """Спрацював захист від переповнення e^{2u} (2·max u > 700)."""

    def __init__(self, max_value: float, location) -> None:
        self.max_value = float(max_value)
        self.location = tuple(float(x) for x in location)
        super().__init__(
            f"2·max u = {2 * self.max_value:.6g} > 700 у точці {self.location}"
        )


class FieldRepresentationError(OnofriLabError):
    """Поле не має потрібного представлення (градієнта, спектра або evaluator)."""


class ConfigurationError(OnofriLabError, ValueError):
    """Некоректні параметри команди або специфікації."""


class InfeasibleConfigurationError(OnofriLabError):
    """Задачу пошуку конфігурацій неможливо поставити (N=1, непарне N з симетрією)."""


class SolverDivergenceError(OnofriLabError):
    """Ньютон не зменшив нев'язку після backtracking або вичерпав ітерації."""

    def __init__(self, message: str, trace: Sequence[float] = ()) -> None:
        self.trace = [float(x) for x in trace]
        if self.trace:
            tail = ", ".join(f"{x:.3e}" for x in self.trace[-5:])
            message = f"{message} (нев'язки: {tail})"
        super().__init__(message)


class SingularJacobianError(SolverDivergenceError):
    """Якобіан виродився (біля точки біфуркації)."""


class RetractionError(OnofriLabError):
    """Скоригована густина e^{2w} − 3Σ m_i x_i невід'ємна не всюди."""

    def __init__(self, node, value: float) -> None:
        self.node = node
        self.value = float(value)
        super().__init__(f"Скоригована густина {self.value:.6g} ≤ 0 у вузлі {node}")


class DescentStallError(OnofriLabError):
    """Armijo backtracking не зменшив функціонал J."""
