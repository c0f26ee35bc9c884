"""
Скалярні поля на сфері та функціонали від них.

Поле завжди має значення у вузлах глобальної сітки. Додатково можуть бути:
evaluator (значення в довільних точках), дотичний градієнт, шапки
концентрації (поза якими поле дорівнює background) і спектральний розклад.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Callable

import numpy as np
import pandas as pd

from ..core.errors import FieldRepresentationError, OverflowGuardError, QuadratureError
from .geometry import Rotation
from .quadrature import (
    FOUR_PI,
    CapPatch,
    QuadratureGrid,
    build_cap_patches,
    build_gauss_grid,
    composite_integrate,
    weighted_sum,
)

if TYPE_CHECKING:
    from .spectral import SHExpansion

EXP_GUARD = 700.0
NODE_MATCH_TOL = 1e-12
FIELD_COLUMNS = ["x1", "x2", "x3", "weight", "value", "grid_L"]

PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarField:
    grid: QuadratureGrid
    samples: np.ndarray = field(repr=False)
    evaluator: PointFunction | None = field(default=None, repr=False)
    gradient: PointFunction | None = field(default=None, repr=False)
    patches: tuple[CapPatch, ...] = ()
    background: float = 0.0
    expansion: "SHExpansion | None" = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float).reshape(-1)
        if samples.shape[0] != self.grid.size:
            raise QuadratureError(
                f"Кількість значень {samples.shape[0]} ≠ кількості вузлів {self.grid.size}"
            )
        weighted_sum(self.grid.weights, samples, self.grid.nodes)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "patches", tuple(self.patches))

    @classmethod
    def from_function(
        cls,
        grid: QuadratureGrid,
        evaluator: PointFunction,
        gradient: PointFunction | None = None,
        patches=(),
        background: float = 0.0,
        label: str = "",
    ) -> "ScalarField":
        return cls(
            grid=grid,
            samples=evaluator(grid.nodes),
            evaluator=evaluator,
            gradient=gradient,
            patches=tuple(patches),
            background=background,
            label=label,
        )

    @classmethod
    def from_samples(cls, grid: QuadratureGrid, samples, label: str = "") -> "ScalarField":
        return cls(grid=grid, samples=samples, label=label)

    @classmethod
    def constant(cls, grid: QuadratureGrid, value: float) -> "ScalarField":
        return cls.from_function(
            grid,
            lambda p: np.full(np.asarray(p).reshape(-1, 3).shape[0], float(value)),
            lambda p: np.zeros(np.asarray(p).reshape(-1, 3).shape),
            label=f"const({value})",
        )

    @property
    def has_evaluator(self) -> bool:
        return self.evaluator is not None

    def evaluate(self, points) -> np.ndarray:
        if self.evaluator is None:
            raise FieldRepresentationError("Поле задане лише значеннями у вузлах сітки")
        return np.asarray(self.evaluator(np.asarray(points, dtype=float).reshape(-1, 3)), dtype=float)

    def tangent_gradient(self, points) -> np.ndarray:
        if self.gradient is None:
            raise FieldRepresentationError("Поле не має дотичного градієнта")
        return np.asarray(self.gradient(np.asarray(points, dtype=float).reshape(-1, 3)), dtype=float)

    def integrate(self, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        """∫ integrand(u(p), p) dV; з шапками: складена квадратура."""
        if self.patches:
            return composite_integrate(
                self.grid, self.patches, integrand, self.evaluate, self.background
            )
        return weighted_sum(
            self.grid.weights, integrand(self.samples, self.grid.nodes), self.grid.nodes
        )

    def all_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Вузли сітки та шапок разом зі значеннями поля в них."""
        nodes = [self.grid.nodes]
        values = [self.samples]
        for patch in self.patches:
            nodes.append(patch.nodes)
            values.append(self.evaluate(patch.nodes))
        return np.concatenate(nodes), np.concatenate(values)

    def max_value(self) -> tuple[float, np.ndarray]:
        nodes, values = self.all_nodes()
        idx = int(np.argmax(values))
        return float(values[idx]), nodes[idx]

    def shifted(self, c: float) -> "ScalarField":
        """u + c."""
        c = float(c)
        evaluator = None
        if self.evaluator is not None:
            base = self.evaluator
            evaluator = lambda p: base(p) + c  # noqa: E731
        expansion = None
        if self.expansion is not None:
            coeffs = np.array(self.expansion.coefficients)
            coeffs[0] += c * np.sqrt(FOUR_PI)
            expansion = type(self.expansion)(self.expansion.lmax, coeffs)
        return replace(
            self,
            samples=self.samples + c,
            evaluator=evaluator,
            background=self.background + c,
            expansion=expansion,
        )

    def compose(self, A: Rotation) -> "ScalarField":
        """u∘A: значення u(Ap), градієнт Aᵀ∇u(Ap), центри шапок переходять в Aᵀc."""
        if self.evaluator is None:
            raise FieldRepresentationError("Композиція з обертанням потребує evaluator")
        M = A.matrix
        base = self.evaluator

        def evaluator(p):
            return base(np.asarray(p).reshape(-1, 3) @ M.T)

        gradient = None
        if self.gradient is not None:
            base_grad = self.gradient

            def gradient(p):
                return base_grad(np.asarray(p).reshape(-1, 3) @ M.T) @ M

        patches = ()
        if self.patches:
            first = self.patches[0]
            centers = [M.T @ patch.center.vector for patch in self.patches]
            patches = build_cap_patches(centers, first.outer_radius, first.n_r, first.n_ang)

        return ScalarField(
            grid=self.grid,
            samples=evaluator(self.grid.nodes),
            evaluator=evaluator,
            gradient=gradient,
            patches=patches,
            background=self.background,
            label=f"{self.label}∘A" if self.label else "",
        )


def guard_overflow(u: ScalarField) -> float:
    """Максимум u по всіх вузлах; OverflowGuardError, якщо 2·max u > 700."""
    max_u, location = u.max_value()
    if 2.0 * max_u > EXP_GUARD:
        raise OverflowGuardError(max_u, location)
    return max_u


def mean_value(u: ScalarField) -> float:
    """(1/4π)∫u dV."""
    return float(u.integrate(lambda v, p: v)) / FOUR_PI


def exp_mass(u: ScalarField) -> float:
    """(1/4π)∫e^{2u} dV."""
    guard_overflow(u)
    return float(u.integrate(lambda v, p: np.exp(2.0 * v))) / FOUR_PI


def exp_first_moments(u: ScalarField) -> np.ndarray:
    """(1/4π)∫e^{2u}·x dV, вектор з трьох компонент."""
    guard_overflow(u)
    return np.asarray(u.integrate(lambda v, p: np.exp(2.0 * v)[:, None] * p), dtype=float) / FOUR_PI


def dirichlet_energy(u: ScalarField) -> float:
    """
    ∫|∇u|² dV.

    Квадратура дотичного градієнта, якщо він є (поза шапками градієнт фону
    нульовий); інакше: тотожність Парсеваля для спектрального розкладу.
    """
    if u.gradient is not None:
        if u.patches:
            total = 0.0
            for patch in u.patches:
                g = u.tangent_gradient(patch.nodes)
                total += float(weighted_sum(patch.weights, np.sum(g * g, axis=1), patch.nodes))
            return total
        g = u.tangent_gradient(u.grid.nodes)
        return float(weighted_sum(u.grid.weights, np.sum(g * g, axis=1), u.grid.nodes))
    if u.expansion is not None:
        from .spectral import dirichlet_energy_spectral

        return dirichlet_energy_spectral(u.expansion)
    raise FieldRepresentationError("Для енергії Діріхле потрібен градієнт або спектральний розклад")


def onofri_gap(u: ScalarField) -> float:
    """(1/4π)∫|∇u|² + 2·ū − log((1/4π)∫e^{2u}); невід'ємна за нерівністю Онофрі."""
    return dirichlet_energy(u) / FOUR_PI + 2.0 * mean_value(u) - float(np.log(exp_mass(u)))


def onofri_functional(u: ScalarField, alpha: float) -> float:
    """α·(1/4π)∫|∇u|² + 2·ū − log((1/4π)∫e^{2u})."""
    return alpha * dirichlet_energy(u) / FOUR_PI + 2.0 * mean_value(u) - float(np.log(exp_mass(u)))


def dump_field(u: ScalarField, path) -> Path:
    """Значення у вузлах сітки у CSV або Parquet (за розширенням файлу)."""
    path = Path(path)
    df = pd.DataFrame({
        "x1": u.grid.nodes[:, 0],
        "x2": u.grid.nodes[:, 1],
        "x3": u.grid.nodes[:, 2],
        "weight": u.grid.weights,
        "value": u.samples,
        "grid_L": u.grid.L,
    }, columns=FIELD_COLUMNS)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".parquet":
        df.to_parquet(path, index=False)
    else:
        df.to_csv(path, index=False, float_format="%.17g")
    return path


def load_field(path) -> ScalarField:
    """Зворотне до dump_field; вузли перевіряються проти відновленої сітки."""
    path = Path(path)
    if path.suffix.lower() == ".parquet":
        df = pd.read_parquet(path)
    else:
        df = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in FIELD_COLUMNS if c not in df.columns]
    if missing:
        raise QuadratureError(f"У файлі поля бракує колонок: {', '.join(missing)}")
    grid = build_gauss_grid(int(df["grid_L"].iloc[0]))
    nodes = df[["x1", "x2", "x3"]].to_numpy(dtype=float)
    if nodes.shape != grid.nodes.shape or np.max(np.abs(nodes - grid.nodes)) > NODE_MATCH_TOL:
        raise QuadratureError(f"Вузли у файлі {path} не збігаються з сіткою L={grid.L}")
    return ScalarField.from_samples(grid, df["value"].to_numpy(dtype=float), label=path.stem)
