"""
Осесиметричний розв'язувач рівняння середнього поля −aΔu + 1 = e^{2u}.

Невідома: профіль u(t) = Σ c_l P_l(t), t = x₃, у базисі поліномів Лежандра
(парні й непарні степені). Колокація у L_max + 1 вузлах Гауса–Лежандра:
−Δ діє на коефіцієнтах множенням на l(l+1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import lu_factor, lu_solve
from scipy.special import roots_legendre

from ..core.errors import (
    ConfigurationError,
    OverflowGuardError,
    SingularJacobianError,
    SolverDivergenceError,
)
from ..core.utils import print_debug

MIN_LMAX = 32
DEFAULT_LMAX = 64
EXP_GUARD = 700.0
SUP_SAMPLES = 2001
ARMIJO_C = 1e-4
MIN_DAMPING = 1e-4
SINGULAR_RCOND = 1e-14
# Застій на рівні округлення приймається як збіжність
STALL_FACTOR = 10.0


class LegendreCollocation:
    """Вузли, ваги та матриці переходу значення ↔ коефіцієнти для фіксованого L_max."""

    def __init__(self, lmax: int) -> None:
        if lmax < 2:
            raise ConfigurationError(f"L_max має бути ≥ 2, отримано: {lmax}")
        self.lmax = lmax
        self.size = lmax + 1
        self.t, self.weights = roots_legendre(self.size)
        self.avg_weights = 0.5 * self.weights
        self.degrees = np.arange(self.size)
        self.eigenvalues = (self.degrees * (self.degrees + 1)).astype(float)
        self.V = npleg.legvander(self.t, lmax)
        # Дискретна ортогональність: Гаус точний до степеня 2L_max + 1
        self.V_inv = ((2.0 * self.degrees + 1.0) / 2.0)[:, None] * (self.V.T * self.weights)
        self.K = self.V @ (self.eigenvalues[:, None] * self.V_inv)

    def values(self, coefficients: np.ndarray) -> np.ndarray:
        return self.V @ coefficients

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        return self.V_inv @ values

    def average(self, values: np.ndarray) -> float:
        return float(self.avg_weights @ values)

    def minus_laplacian(self, values: np.ndarray) -> np.ndarray:
        """−Δ на значеннях у вузлах."""
        return self.V @ (self.eigenvalues * (self.V_inv @ values))


@lru_cache(maxsize=8)
def collocation(lmax: int) -> LegendreCollocation:
    return LegendreCollocation(lmax)


@dataclass(frozen=True)
class AxiProfile:
    """u(t) = Σ c_l P_l(t), 0 ≤ l ≤ L_max."""
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=float).reshape(-1)
        if c.shape[0] - 1 < MIN_LMAX:
            raise ConfigurationError(f"L_max має бути ≥ {MIN_LMAX}, отримано: {c.shape[0] - 1}")
        if not np.all(np.isfinite(c)):
            raise ConfigurationError("Коефіцієнти профілю мають бути скінченними")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def lmax(self) -> int:
        return int(self.coefficients.shape[0] - 1)

    @property
    def grid(self) -> LegendreCollocation:
        return collocation(self.lmax)

    @property
    def values(self) -> np.ndarray:
        return self.grid.values(self.coefficients)

    @classmethod
    def zeros(cls, lmax: int = DEFAULT_LMAX) -> "AxiProfile":
        return cls(np.zeros(lmax + 1))

    @classmethod
    def from_values(cls, values: np.ndarray, lmax: int | None = None) -> "AxiProfile":
        values = np.asarray(values, dtype=float)
        lmax = values.shape[0] - 1 if lmax is None else lmax
        return cls(collocation(lmax).coefficients(values))

    @classmethod
    def from_function(cls, f, lmax: int = DEFAULT_LMAX) -> "AxiProfile":
        """Інтерполяція f(t) у вузлах колокації."""
        return cls.from_values(np.asarray(f(collocation(lmax).t), dtype=float), lmax)

    @classmethod
    def legendre(cls, degree: int, amplitude: float = 1.0, lmax: int = DEFAULT_LMAX) -> "AxiProfile":
        """amplitude·P_degree; P₂ = (3/2)(x₃² − 1/3), P₁ = x₃."""
        c = np.zeros(lmax + 1)
        c[degree] = amplitude
        return cls(c)

    def resized(self, lmax: int) -> "AxiProfile":
        """Доповнення нулями або обрізання коефіцієнтів."""
        c = np.zeros(lmax + 1)
        k = min(lmax, self.lmax) + 1
        c[:k] = self.coefficients[:k]
        return AxiProfile(c)

    def evaluate(self, t) -> np.ndarray:
        return npleg.legval(np.asarray(t, dtype=float), self.coefficients)

    def mean(self) -> float:
        """ū = c₀ (середнє P_l, l ≥ 1, дорівнює нулю)."""
        return float(self.coefficients[0])

    def sup_norm(self) -> float:
        """‖u‖∞ по вузлах, полюсах t = ±1 і щільній сітці."""
        dense = np.linspace(-1.0, 1.0, SUP_SAMPLES)
        candidates = np.concatenate([self.values, self.evaluate(dense)])
        return float(np.max(np.abs(candidates)))

    def __add__(self, other: "AxiProfile") -> "AxiProfile":
        lmax = max(self.lmax, other.lmax)
        return AxiProfile(self.resized(lmax).coefficients + other.resized(lmax).coefficients)

    def scaled(self, factor: float) -> "AxiProfile":
        return AxiProfile(self.coefficients * factor)


def exp_density(grid: LegendreCollocation, u: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(u))
    if 2.0 * u[idx] > EXP_GUARD:
        t = float(grid.t[idx])
        raise OverflowGuardError(u[idx], (np.sqrt(max(0.0, 1.0 - t * t)), 0.0, t))
    return np.exp(2.0 * u)


def residual_values(grid: LegendreCollocation, u: np.ndarray, a: float) -> np.ndarray:
    return a * grid.minus_laplacian(u) + 1.0 - exp_density(grid, u)


def residual_coefficients(grid: LegendreCollocation, c: np.ndarray, a: float) -> np.ndarray:
    """Нев'язка у вузлах, обчислена прямо з коефіцієнтів без переходу значення → коефіцієнти."""
    return a * (grid.V @ (grid.eigenvalues * c)) + 1.0 - exp_density(grid, grid.V @ c)


def residual(u: AxiProfile, a: float) -> np.ndarray:
    """r = −aΔu + 1 − e^{2u} у вузлах колокації."""
    if a <= 0:
        raise ConfigurationError(f"Параметр a має бути > 0, отримано: {a}")
    return residual_coefficients(u.grid, u.coefficients, a)


def jacobian_values(grid: LegendreCollocation, u: np.ndarray, a: float) -> np.ndarray:
    """∂r/∂u = −aΔ − 2·diag(e^{2u})."""
    return a * grid.K - np.diag(2.0 * exp_density(grid, u))


def jacobian_coefficients(grid: LegendreCollocation, c: np.ndarray, a: float) -> np.ndarray:
    """∂r/∂c = a·V·diag(l(l+1)) − 2·diag(e^{2u})·V."""
    density = exp_density(grid, grid.V @ c)
    return a * grid.V * grid.eigenvalues[None, :] - (2.0 * density)[:, None] * grid.V


def jacobian(u: AxiProfile, a: float) -> np.ndarray:
    return jacobian_values(u.grid, u.values, a)


def trivial_spectrum(a: float, lmax: int = 8) -> list[tuple[int, float]]:
    """Власні значення −aΔ − 2 на гармоніках степеня l: a·l(l+1) − 2."""
    if a <= 0:
        raise ConfigurationError(f"Параметр a має бути > 0, отримано: {a}")
    return [(l, a * l * (l + 1) - 2.0) for l in range(lmax + 1)]


def bifurcation_points(lmax: int = 8) -> list[float]:
    """a = 2/(l(l+1)), де лінеаризація в нулі вироджена."""
    return [2.0 / (l * (l + 1)) for l in range(1, lmax + 1)]


@dataclass(frozen=True)
class NewtonResult:
    profile: AxiProfile
    iterations: int
    residual_norm: float
    trace: tuple[float, ...] = ()


def _check_conditioning(J: np.ndarray, trace: list[float]) -> None:
    rcond = 1.0 / np.linalg.cond(J)
    if not np.isfinite(rcond) or rcond < SINGULAR_RCOND:
        raise SingularJacobianError(
            f"Якобіан вироджений (1/cond = {rcond:.3e})", trace
        )


def newton_iterate(
    a: float,
    init: AxiProfile,
    tol: float = 1e-11,
    max_iter: int = 50,
) -> NewtonResult:
    """
    Демпфований Ньютон у просторі коефіцієнтів: крок Δc = −J⁻¹r, backtracking ×½
    за умовою Арміхо на ‖r‖₂, мінімальний множник 1e−4. Повернутий профіль має
    рівно ту нев'язку, яку перевірено на збіжність.
    """
    if a <= 0:
        raise ConfigurationError(f"Параметр a має бути > 0, отримано: {a}")
    grid = init.grid
    c = init.coefficients.copy()
    r = residual_coefficients(grid, c, a)
    norm_inf = float(np.max(np.abs(r)))
    trace = [norm_inf]
    for it in range(max_iter + 1):
        if norm_inf < tol:
            print_debug(f"Ньютон a={a:.6g}: {it} ітерацій, ‖r‖∞ = {norm_inf:.3e}")
            return NewtonResult(AxiProfile(c), it, norm_inf, tuple(trace))
        if it == max_iter:
            break
        J = jacobian_coefficients(grid, c, a)
        _check_conditioning(J, trace)
        step = lu_solve(lu_factor(J), -r)
        norm2 = float(np.linalg.norm(r))
        damping = 1.0
        while True:
            candidate = c + damping * step
            try:
                r_new = residual_coefficients(grid, candidate, a)
            except OverflowGuardError:
                r_new = None
            if r_new is not None and np.linalg.norm(r_new) <= (1.0 - ARMIJO_C * damping) * norm2:
                break
            damping *= 0.5
            if damping < MIN_DAMPING:
                if norm_inf < STALL_FACTOR * tol:
                    return NewtonResult(AxiProfile(c), it, norm_inf, tuple(trace))
                raise SolverDivergenceError(
                    f"Ньютон a={a:.6g}: нев'язка не зменшується після backtracking", trace
                )
        c, r = candidate, r_new
        norm_inf = float(np.max(np.abs(r)))
        trace.append(norm_inf)
    raise SolverDivergenceError(f"Ньютон a={a:.6g}: вичерпано {max_iter} ітерацій", trace)


def newton_solve(
    a: float,
    init: AxiProfile,
    tol: float = 1e-11,
    max_iter: int = 50,
) -> AxiProfile:
    """Розв'язок з ‖r‖∞ < tol; вже збіжний старт повертається без кроків."""
    return newton_iterate(a, init, tol, max_iter).profile


def kazdan_warner_defect(u: AxiProfile) -> float:
    """|avg(e^{2u}x₃)|; моменти по x₁, x₂ нульові через осьову симетрію."""
    grid = u.grid
    return abs(grid.average(exp_density(grid, u.values) * grid.t))


@dataclass(frozen=True)
class Diagnostics:
    mass_defect: float
    kw3: float
    beta: float
    lambda_norm_sq: float
    sup_norm: float
    mean: float
    beta_ratio: float
    profile_corr: float
    uhat_l2: float

    def as_dict(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "mean": self.mean,
            "beta": self.beta,
            "lambda_norm_sq": self.lambda_norm_sq,
            "beta_ratio": self.beta_ratio,
            "profile_corr": self.profile_corr,
            "uhat_l2": self.uhat_l2,
            "mass_defect": self.mass_defect,
            "kw3": self.kw3,
        }


def diagnostics(u: AxiProfile, a: float) -> Diagnostics:
    grid = u.grid
    c = u.coefficients
    density = exp_density(grid, u.values)
    mass = grid.average(density)
    kw3 = grid.average(density * grid.t)
    beta = grid.average(density * (grid.t ** 2 - 1.0 / 3.0)) / mass
    # Для осесиметричної густини Λ = diag(−β/2, −β/2, β)
    lambda_sq = 1.5 * beta * beta
    sup = u.sup_norm()

    # L²(avg)-норми через ортогональність: avg(P_l P_k) = δ_lk/(2l+1)
    inv_norms = 1.0 / (2.0 * grid.degrees + 1.0)
    fluct_sq = float(np.sum(c[1:] ** 2 * inv_norms[1:]))
    if fluct_sq > 0:
        corr = (c[2] / 5.0) / (np.sqrt(fluct_sq) * np.sqrt(1.0 / 5.0))
    else:
        corr = 0.0
    c_hat = c.copy()
    c_hat[0] = 0.0
    # (15/(8a))·β·(x₃² − 1/3) = (5β/(4a))·P₂
    c_hat[2] -= 5.0 * beta / (4.0 * a)
    uhat_l2 = float(np.sqrt(4.0 * np.pi * np.sum(c_hat[1:] ** 2 * inv_norms[1:])))

    return Diagnostics(
        mass_defect=abs(mass - 1.0),
        kw3=kw3,
        beta=beta,
        lambda_norm_sq=lambda_sq,
        sup_norm=sup,
        mean=u.mean(),
        beta_ratio=beta / sup if sup > 0 else 0.0,
        profile_corr=float(np.clip(corr, -1.0, 1.0)),
        uhat_l2=uhat_l2,
    )

