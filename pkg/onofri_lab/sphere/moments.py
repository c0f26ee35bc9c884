"""Матриця других моментів густини e^{2u}."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.errors import ConfigurationError
from .fields import ScalarField, guard_overflow
from .geometry import Rotation

SYMMETRY_TOL = 1e-12
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class MomentMatrix:
    """Симетрична безслідова матриця 3×3."""
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float).reshape(3, 3)
        if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
            raise ConfigurationError("Матриця моментів має бути симетричною")
        if abs(np.trace(m)) > TRACE_TOL:
            raise ConfigurationError(f"Слід матриці моментів {np.trace(m)!r} ≠ 0")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def norm_sq(self) -> float:
        return lambda_norm_sq(self)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __getitem__(self, key):
        return self.entries[key]


def lambda_matrix(u: ScalarField) -> MomentMatrix:
    """
    Λ_ij = ∫e^{2u}(x_i x_j − δ_ij/3) / ∫e^{2u}.

    Чисельник і знаменник рахуються зі зсувом e^{2(u − max u)}.
    """
    shift = guard_overflow(u)
    eye = np.eye(3) / 3.0

    def weight(v):
        return np.exp(2.0 * (v - shift))

    numerator = u.integrate(
        lambda v, p: weight(v)[:, None, None] * (p[:, :, None] * p[:, None, :] - eye)
    )
    denominator = float(u.integrate(lambda v, p: weight(v)))
    m = np.asarray(numerator, dtype=float) / denominator
    return MomentMatrix(0.5 * (m + m.T))


def lambda_norm_sq(matrix: MomentMatrix | np.ndarray) -> float:
    entries = matrix.entries if isinstance(matrix, MomentMatrix) else np.asarray(matrix, dtype=float)
    return float(np.sum(entries * entries))


def conjugate(matrix: MomentMatrix, A: Rotation) -> MomentMatrix:
    """Λ(u∘A) = AᵀΛ(u)A."""
    return MomentMatrix(A.matrix.T @ matrix.entries @ A.matrix)
