"""
Точки та обертання одиничної сфери, геодезична відстань.

Точки зберігаються як SpherePoint для API-рівня; обчислювальні функції
приймають також масиви (..., 3) і працюють векторизовано.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

from ..core.errors import ConfigurationError

UNIT_TOL = 1e-12
NORTH_POLE = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class SpherePoint:
    """Точка на 𝕊² з координатами x1, x2, x3."""
    x1: float
    x2: float
    x3: float

    def __post_init__(self) -> None:
        norm_sq = self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
        if abs(norm_sq - 1.0) > UNIT_TOL:
            raise ConfigurationError(
                f"Точка ({self.x1}, {self.x2}, {self.x3}) не лежить на сфері: |x|² = {norm_sq!r}"
            )

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3], dtype=float)

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> "SpherePoint":
        arr = np.asarray(v, dtype=float).reshape(3)
        if normalize:
            arr = arr / np.linalg.norm(arr)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.x1, -self.x2, -self.x3)


PointLike = Union[SpherePoint, np.ndarray, Iterable[float]]


def as_vector(p: PointLike) -> np.ndarray:
    if isinstance(p, SpherePoint):
        return p.vector
    return np.asarray(p, dtype=float)


def as_points(points) -> np.ndarray:
    """Перетворює послідовність точок на масив (n, 3)."""
    if isinstance(points, np.ndarray):
        return points.reshape(-1, 3).astype(float, copy=False)
    return np.array([as_vector(p) for p in points], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class Rotation:
    """Ортогональна матриця 3×3 (det = ±1)."""
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float).reshape(3, 3)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if np.max(np.abs(m.T @ m - np.eye(3))) > UNIT_TOL:
            raise ConfigurationError("Матриця не ортогональна: RᵀR ≠ I")
        if abs(abs(np.linalg.det(m)) - 1.0) > UNIT_TOL:
            raise ConfigurationError("det R ≠ ±1")

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.eye(3))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Rotation":
        """Рівномірно розподілене обертання з SO(3)."""
        return cls(_ScipyRotation.random(random_state=rng).as_matrix())

    @property
    def T(self) -> "Rotation":
        return Rotation(self.matrix.T)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def apply(self, points) -> np.ndarray:
        """R·p для одиночної точки або масиву (n, 3)."""
        arr = as_vector(points) if not isinstance(points, np.ndarray) else points
        return np.asarray(arr, dtype=float) @ self.matrix.T

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.matrix @ other.matrix)


def geodesic_distance(p: PointLike, q: PointLike) -> float:
    """arccos скалярного добутку, обрізаного до [−1, 1]."""
    dot = float(np.dot(as_vector(p), as_vector(q)))
    return float(np.arccos(np.clip(dot, -1.0, 1.0)))


def geodesic_distances(points: np.ndarray, center: PointLike) -> np.ndarray:
    """Векторизована відстань від кожної з точок (n, 3) до центру."""
    dots = np.asarray(points, dtype=float) @ as_vector(center)
    return np.arccos(np.clip(dots, -1.0, 1.0))


def pairwise_distances(points) -> np.ndarray:
    arr = as_points(points)
    return np.arccos(np.clip(arr @ arr.T, -1.0, 1.0))


def _skew(k: np.ndarray) -> np.ndarray:
    return np.array([
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ])


def rotation_mapping(p: PointLike, q: PointLike) -> Rotation:
    """
    Обертання R ∈ SO(3) з R·p = q.

    Обертання відбувається в площині span(p, q). Для p = q повертається
    тотожність. Для p = −q береться поворот на π навколо осі n ⊥ p:
    n будується з базисного вектора e_k з найменшим |p_k|
    (при рівності з меншим індексом).
    """
    pv = as_vector(p)
    qv = as_vector(q)
    k = np.cross(pv, qv)
    s = float(np.linalg.norm(k))
    c = float(np.dot(pv, qv))
    if s < UNIT_TOL:
        if c > 0:
            return Rotation.identity()
        idx = int(np.argmin(np.abs(pv)))
        e = np.zeros(3)
        e[idx] = 1.0
        n = e - np.dot(e, pv) * pv
        n /= np.linalg.norm(n)
        return Rotation(2.0 * np.outer(n, n) - np.eye(3))
    axis = k / s
    theta = np.arctan2(s, c)
    K = _skew(axis)
    m = np.eye(3) + np.sin(theta) * K + (1.0 - np.cos(theta)) * (K @ K)
    return Rotation(m)


def tangent_frame(center: PointLike) -> np.ndarray:
    """
    Ортонормований репер (e1, e2) у дотичній площині в центрі.

    Репер: образ стандартного (x1, x2) на північному полюсі при
    rotation_mapping(північний полюс, центр), тому шапки з різними центрами
    є точними копіями одна одної.
    """
    R = rotation_mapping(NORTH_POLE, as_vector(center)).matrix
    return np.stack([R[:, 0], R[:, 1]])
