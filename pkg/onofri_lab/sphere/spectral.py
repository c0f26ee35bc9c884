"""
Дійсні сферичні гармоніки: аналіз, синтез, оператор Лапласа–Бельтрамі.

Базис ортонормований (∫Y²dV = 1), без фази Кондона–Шортлі:
    Y_{l,m}  = √2·Λ_{l,m}(t)·cos mφ   (m > 0)
    Y_{l,-m} = √2·Λ_{l,m}(t)·sin mφ   (m > 0)
    Y_{l,0}  = Λ_{l,0}(t)
Індекс коефіцієнта: l² + l + m.

Перехідні константи:
    x₃ = √(4π/3)·Y_{1,0},  x₁ = √(4π/3)·Y_{1,1},  x₂ = √(4π/3)·Y_{1,-1}
    x₃² − 1/3 = (2/3)·√(4π/5)·Y_{2,0}
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.errors import ConfigurationError, QuadratureError
from .fields import ScalarField
from .quadrature import QuadratureGrid

X_COORD_COEFF = float(np.sqrt(4.0 * np.pi / 3.0))
QUADRUPOLE_COEFF = float(2.0 / 3.0 * np.sqrt(4.0 * np.pi / 5.0))


def coefficient_count(lmax: int) -> int:
    return (lmax + 1) ** 2


def sh_index(l: int, m: int) -> int:
    if abs(m) > l:
        raise ConfigurationError(f"|m| ≤ l порушено: l={l}, m={m}")
    return l * l + l + m


def degree_order_arrays(lmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Масиви l та m для кожного індексу коефіцієнта."""
    l_idx = np.concatenate([np.full(2 * l + 1, l) for l in range(lmax + 1)])
    m_idx = np.concatenate([np.arange(-l, l + 1) for l in range(lmax + 1)])
    return l_idx, m_idx


def _legendre_tables(t: np.ndarray, sin_theta: np.ndarray | None, lmax: int, derivative: bool = False):
    """
    Нормовані приєднані функції Лежандра, ∫₋₁¹ Λ² dt = 1/(2π).

    Якщо sin_theta задано, таблиця містить Λ_{l,m} (з множником sin^m θ);
    інакше: поліноми Q_{l,m} = Λ_{l,m}/sin^m θ та, за потреби, dQ/dt.
    Результат має форму (n, lmax+1, lmax+1) з індексами [·, l, m].
    """
    n = t.shape[0]
    P = np.zeros((n, lmax + 1, lmax + 1))
    dP = np.zeros_like(P) if derivative else None
    P[:, 0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(lmax + 1):
        if m > 0:
            factor = np.sqrt((2 * m + 1) / (2 * m))
            P[:, m, m] = factor * P[:, m - 1, m - 1]
            if sin_theta is not None:
                P[:, m, m] *= sin_theta
        if m + 1 <= lmax:
            c = np.sqrt(2 * m + 3)
            P[:, m + 1, m] = c * t * P[:, m, m]
            if dP is not None:
                dP[:, m + 1, m] = c * P[:, m, m]
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            P[:, l, m] = a * (t * P[:, l - 1, m] - b * P[:, l - 2, m])
            if dP is not None:
                dP[:, l, m] = a * (P[:, l - 1, m] + t * dP[:, l - 1, m] - b * dP[:, l - 2, m])
    return P, dP


def _azimuthal_powers(x1: np.ndarray, x2: np.ndarray, lmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Re та Im від (x₁ + i·x₂)^m, m = 0..lmax."""
    z = x1 + 1j * x2
    powers = np.ones((x1.shape[0], lmax + 1), dtype=complex)
    for m in range(1, lmax + 1):
        powers[:, m] = powers[:, m - 1] * z
    return powers.real, powers.imag


def harmonic_basis(points: np.ndarray, lmax: int, with_gradient: bool = False):
    """
    Значення Y_{l,m} у точках (n, 3) і, за потреби, дотичні градієнти.

    Використовується поліноміальне продовження Q_{l,m}(x₃)·Re/Im (x₁+ix₂)^m,
    тож вирази точні й на полюсах.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    x1, x2, x3 = points.T
    Q, dQ = _legendre_tables(x3, None, lmax, derivative=with_gradient)
    C, S = _azimuthal_powers(x1, x2, lmax)
    l_idx, m_idx = degree_order_arrays(lmax)
    abs_m = np.abs(m_idx)
    scale = np.where(m_idx == 0, 1.0, np.sqrt(2.0))
    Qk = Q[:, l_idx, abs_m]
    trig = np.where(m_idx >= 0, C[:, abs_m], S[:, abs_m])
    Y = scale * Qk * trig
    if not with_gradient:
        return Y, None

    assert dQ is not None
    dQk = dQ[:, l_idx, abs_m]
    prev = np.maximum(abs_m - 1, 0)
    # Похідні Re z^m та Im z^m по x₁, x₂
    dC1 = abs_m * C[:, prev]
    dC2 = -abs_m * S[:, prev]
    dS1 = abs_m * S[:, prev]
    dS2 = abs_m * C[:, prev]
    d1 = np.where(m_idx >= 0, dC1, dS1)
    d2 = np.where(m_idx >= 0, dC2, dS2)
    ambient = np.stack([scale * Qk * d1, scale * Qk * d2, scale * dQk * trig], axis=-1)
    radial = np.einsum("nkd,nd->nk", ambient, points)
    tangent = ambient - radial[..., None] * points[:, None, :]
    return Y, tangent


@dataclass(frozen=True)
class SHExpansion:
    """Коефіцієнти c_{l,m}, 0 ≤ l ≤ lmax, у дійсному ортонормованому базисі."""
    lmax: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=float).reshape(-1)
        if coeffs.shape[0] != coefficient_count(self.lmax):
            raise ConfigurationError(
                f"Очікувалось {coefficient_count(self.lmax)} коефіцієнтів для lmax={self.lmax}, "
                f"отримано {coeffs.shape[0]}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zeros(cls, lmax: int) -> "SHExpansion":
        return cls(lmax, np.zeros(coefficient_count(lmax)))

    @classmethod
    def single(cls, lmax: int, l: int, m: int, value: float = 1.0) -> "SHExpansion":
        coeffs = np.zeros(coefficient_count(lmax))
        coeffs[sh_index(l, m)] = value
        return cls(lmax, coeffs)

    def coefficient(self, l: int, m: int) -> float:
        return float(self.coefficients[sh_index(l, m)])

    def evaluate(self, points) -> np.ndarray:
        Y, _ = harmonic_basis(points, self.lmax)
        return Y @ self.coefficients

    def gradient(self, points) -> np.ndarray:
        _, G = harmonic_basis(points, self.lmax, with_gradient=True)
        return np.einsum("nkd,k->nd", G, self.coefficients)

    def scaled(self, factors: np.ndarray) -> "SHExpansion":
        return SHExpansion(self.lmax, self.coefficients * factors)

    def high_pass(self, lmin: int) -> "SHExpansion":
        """Обнуляє всі степені l < lmin."""
        l_idx, _ = degree_order_arrays(self.lmax)
        return self.scaled((l_idx >= lmin).astype(float))

    def axisymmetric(self) -> "SHExpansion":
        """Залишає тільки m = 0."""
        _, m_idx = degree_order_arrays(self.lmax)
        return self.scaled((m_idx == 0).astype(float))


def random_expansion(
    lmax: int,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    decay: float = 1.0,
) -> SHExpansion:
    """Випадкове обмежене за спектром поле: c_{l,m} ~ N(0,1)·amplitude/(1+l)^decay."""
    l_idx, _ = degree_order_arrays(lmax)
    coeffs = rng.standard_normal(coefficient_count(lmax)) * amplitude / (1.0 + l_idx) ** decay
    return SHExpansion(lmax, coeffs)


def _ring_tables(grid: QuadratureGrid, lmax: int):
    sin_theta = np.sqrt(np.clip(1.0 - grid.t ** 2, 0.0, None))
    P, _ = _legendre_tables(grid.t, sin_theta, lmax)
    l_idx, m_idx = degree_order_arrays(lmax)
    abs_m = np.abs(m_idx)
    scale = np.where(m_idx == 0, 1.0, np.sqrt(2.0))
    Lam = P[:, l_idx, abs_m] * scale
    m_range = np.arange(lmax + 1)
    cos_tab = np.cos(np.outer(grid.phi, m_range))
    sin_tab = np.sin(np.outer(grid.phi, m_range))
    return Lam, m_idx, abs_m, cos_tab, sin_tab


def analyze(u: ScalarField, lmax: int) -> SHExpansion:
    """Коефіцієнти квадратурою u·Y_{l,m}; потрібна сітка з L ≥ lmax + 1."""
    grid = u.grid
    if lmax < 0:
        raise ConfigurationError(f"lmax має бути ≥ 0, отримано: {lmax}")
    if grid.L < lmax + 1:
        raise QuadratureError(
            f"Недостатня роздільність сітки: L={grid.L} < lmax+1={lmax + 1}"
        )
    Lam, m_idx, abs_m, cos_tab, sin_tab = _ring_tables(grid, lmax)
    U = u.samples.reshape(grid.L, grid.n_lon)
    # Прямі суми по довготі, далі сума Гауса по широті
    A_cos = U @ cos_tab
    A_sin = U @ sin_tab
    trig = np.where(m_idx >= 0, A_cos[:, abs_m], A_sin[:, abs_m])
    ring_weights = grid.gauss_weights * (np.pi / grid.L)
    coeffs = ring_weights @ (Lam * trig)
    return SHExpansion(lmax, coeffs)


def synthesize(e: SHExpansion, grid: QuadratureGrid) -> ScalarField:
    """Значення розкладу у вузлах сітки; поле несе evaluator, градієнт і сам розклад."""
    Lam, m_idx, abs_m, cos_tab, sin_tab = _ring_tables(grid, e.lmax)
    weighted = Lam * e.coefficients
    B_cos = np.zeros((grid.L, e.lmax + 1))
    B_sin = np.zeros((grid.L, e.lmax + 1))
    for k in range(m_idx.shape[0]):
        if m_idx[k] >= 0:
            B_cos[:, abs_m[k]] += weighted[:, k]
        else:
            B_sin[:, abs_m[k]] += weighted[:, k]
    values = B_cos @ cos_tab.T + B_sin @ sin_tab.T
    return ScalarField(
        grid=grid,
        samples=values.ravel(),
        evaluator=e.evaluate,
        gradient=e.gradient,
        expansion=e,
        label=f"SH(lmax={e.lmax})",
    )


def laplace_beltrami(e: SHExpansion) -> SHExpansion:
    """Δ на коефіцієнтах: множення на −l(l+1)."""
    l_idx, _ = degree_order_arrays(e.lmax)
    return e.scaled(-(l_idx * (l_idx + 1)).astype(float))


def dirichlet_energy_spectral(e: SHExpansion) -> float:
    """∫|∇u|² dV = Σ l(l+1)·c_{l,m}² (тотожність Парсеваля)."""
    l_idx, _ = degree_order_arrays(e.lmax)
    return float(np.sum(l_idx * (l_idx + 1) * e.coefficients ** 2))


def eigenvalue_table(lmax: int) -> list[tuple[int, float]]:
    """Власні значення −Δ на степенях 0..lmax, перевірені застосуванням до базисних полів."""
    table = []
    for l in range(lmax + 1):
        basis = SHExpansion.single(lmax, l, 0)
        table.append((l, -laplace_beltrami(basis).coefficient(l, 0)))
    return table
