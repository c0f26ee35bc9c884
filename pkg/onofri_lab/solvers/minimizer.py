"""
Мінімізація J_a(u) = a·avg|∇u|² + 2ū − log avg e^{2u} на осесиметричних
профілях з нульовим x₃-моментом густини та обмеженням ‖Λ(u)‖² ≤ c₀.

Крок: передобумовлений градієнт P⁻¹g, P = 2(−aΔ + 1), спроєктований на
дотичну до обмеження моменту; Арміхо на кривій ретракція∘нормування.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.errors import (
    ConfigurationError,
    DescentStallError,
    OnofriLabError,
    RetractionError,
)
from ..core.utils import print_debug
from ..sphere.fields import ScalarField, onofri_functional
from .meanfield import AxiProfile, LegendreCollocation, exp_density

MODES = ("backtrack", "penalty")
LAMBDA_LIMIT = 2.0 / 3.0
ARMIJO_C = 1e-4
# Допуск Арміхо на рівні округлення J
ARMIJO_SLACK = 1e-14
MIN_STEP = 1e-10
MOMENT_TOL = 1e-8
LAMBDA_TOL = 1e-10


@dataclass(frozen=True)
class ConstraintSpec:
    c0: float
    mode: str = "backtrack"
    weight: float = 1e4

    def __post_init__(self) -> None:
        if not (0.0 < self.c0 < LAMBDA_LIMIT):
            raise ConfigurationError(f"c0 має лежати в (0, 2/3), отримано: {self.c0}")
        if self.mode not in MODES:
            raise ConfigurationError(f"Невідомий режим '{self.mode}'. Доступні: {', '.join(MODES)}")
        if self.weight <= 0:
            raise ConfigurationError(f"Вага штрафу має бути > 0, отримано: {self.weight}")


def _log_mass(grid: LegendreCollocation, u: np.ndarray) -> float:
    exp_density(grid, u)
    return float(np.log1p(grid.average(np.expm1(2.0 * u))))


def dirichlet_average(u: AxiProfile) -> float:
    """avg|∇u|² = Σ l(l+1)·c_l²/(2l+1)."""
    grid = u.grid
    return float(np.sum(grid.eigenvalues * u.coefficients ** 2 / (2.0 * grid.degrees + 1.0)))


def functional_S(u: AxiProfile, a: float) -> float:
    """S_a[u] = a·avg|∇u|² + 2ū."""
    return a * dirichlet_average(u) + 2.0 * u.mean()


def functional_J(u: AxiProfile | ScalarField, a: float) -> float:
    """a·avg|∇u|² + 2ū − log avg e^{2u}; для полів на сфері: функціонал Онофрі з α = a."""
    if isinstance(u, ScalarField):
        return onofri_functional(u, a)
    return functional_S(u, a) - _log_mass(u.grid, u.values)


def gradient_J(u: AxiProfile, a: float) -> np.ndarray:
    """L²(avg)-градієнт у вузлах: 2(−aΔu + 1 − e^{2u}/avg e^{2u})."""
    grid = u.grid
    values = u.values
    density = exp_density(grid, values)
    return 2.0 * (a * grid.minus_laplacian(values) + 1.0 - density / grid.average(density))


def lambda_sq(u: AxiProfile) -> float:
    """‖Λ(u)‖² = 1.5·β² для осесиметричної густини."""
    grid = u.grid
    density = exp_density(grid, u.values)
    beta = grid.average(density * (grid.t ** 2 - 1.0 / 3.0)) / grid.average(density)
    return 1.5 * beta * beta


def _lambda_sq_gradient(u: AxiProfile) -> np.ndarray:
    grid = u.grid
    density = exp_density(grid, u.values)
    mass = grid.average(density)
    beta = grid.average(density * (grid.t ** 2 - 1.0 / 3.0)) / mass
    return 3.0 * beta * 2.0 * density * (grid.t ** 2 - 1.0 / 3.0 - beta) / mass


def x3_moment(u: AxiProfile) -> float:
    grid = u.grid
    return grid.average(exp_density(grid, u.values) * grid.t)


def retract_to_M1(w: AxiProfile) -> AxiProfile:
    """
    u = ½·log(e^{2w} − 3·avg(e^{2w}x₃)·x₃); для осесиметричних полів
    x₁- та x₂-моменти нульові, тож коригується лише x₃.
    """
    grid = w.grid
    density = exp_density(grid, w.values)
    m3 = grid.average(density * grid.t)
    adjusted = density - 3.0 * m3 * grid.t
    bad = int(np.argmin(adjusted))
    if adjusted[bad] <= 0:
        t = float(grid.t[bad])
        raise RetractionError((float(np.sqrt(max(0.0, 1.0 - t * t))), 0.0, t), adjusted[bad])
    return AxiProfile.from_values(0.5 * np.log(adjusted), w.lmax)


def normalize_mass(u: AxiProfile) -> AxiProfile:
    """u − ½·log avg e^{2u}, так що avg e^{2u} = 1."""
    shift = 0.5 * _log_mass(u.grid, u.values)
    c = np.array(u.coefficients)
    c[0] -= shift
    return AxiProfile(c)


def multipliers(u: AxiProfile, a: float) -> np.ndarray:
    """λᵢ = 3·avg((−aΔu + 1)e^{−2u}xᵢ); λ₁ = λ₂ = 0 через осьову симетрію."""
    grid = u.grid
    values = u.values
    lam3 = 3.0 * grid.average((a * grid.minus_laplacian(values) + 1.0) * np.exp(-2.0 * values) * grid.t)
    return np.array([0.0, 0.0, lam3])


def stationarity_residual(u: AxiProfile, a: float) -> float:
    """max |−aΔu + 1 − e^{2u}(1 + λ₃x₃)| у вузлах."""
    grid = u.grid
    values = u.values
    lam = multipliers(u, a)
    lhs = a * grid.minus_laplacian(values) + 1.0
    return float(np.max(np.abs(lhs - exp_density(grid, values) * (1.0 + lam[2] * grid.t))))


def random_profile(
    rng: np.random.Generator,
    lmax: int = 32,
    amplitude: float = 0.3,
    degree: int = 6,
) -> AxiProfile:
    """c_l ~ N(0,1)·amplitude/(l+1)², 1 ≤ l ≤ degree."""
    c = np.zeros(lmax + 1)
    l = np.arange(1, degree + 1)
    c[1:degree + 1] = rng.standard_normal(degree) * amplitude / (l + 1.0) ** 2
    return AxiProfile(c)


@dataclass(frozen=True)
class MinimizeResult:
    a: float
    c0: float
    mode: str
    profile: AxiProfile = field(repr=False)
    J: float
    S_a: float
    multipliers: np.ndarray = field(repr=False)
    iterations: int
    feasible_moments: bool
    feasible_lambda: bool
    sup_norm: float
    grad_norm: float
    converged: bool
    stationarity_residual: float
    jensen_gap: float
    seed: int | None = None

    def to_record(self) -> dict:
        return {
            "a": self.a,
            "c0": self.c0,
            "J": self.J,
            "S_a": self.S_a,
            "lambda": [float(x) for x in self.multipliers],
            "iters": self.iterations,
            "feasible": {"moments": self.feasible_moments, "lambda_bound": self.feasible_lambda},
            "sup_norm": self.sup_norm,
            "seed": self.seed,
            "mode": self.mode,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "stationarity_residual": self.stationarity_residual,
            "jensen_gap": self.jensen_gap,
        }


class _Objective:
    """J з урахуванням штрафу (режим penalty)."""

    def __init__(self, a: float, spec: ConstraintSpec) -> None:
        self.a = a
        self.spec = spec

    def value(self, u: AxiProfile) -> float:
        j = functional_J(u, self.a)
        if self.spec.mode == "penalty":
            violation = max(0.0, lambda_sq(u) - self.spec.c0)
            j += self.spec.weight * violation ** 2
        return j

    def gradient(self, u: AxiProfile) -> np.ndarray:
        g = gradient_J(u, self.a)
        if self.spec.mode == "penalty":
            violation = max(0.0, lambda_sq(u) - self.spec.c0)
            if violation > 0:
                g = g + 2.0 * self.spec.weight * violation * _lambda_sq_gradient(u)
        return g

    def admissible(self, u: AxiProfile) -> bool:
        if self.spec.mode == "backtrack":
            return lambda_sq(u) <= self.spec.c0 + LAMBDA_TOL
        return True


def _descent_direction(u: AxiProfile, a: float, g: np.ndarray) -> np.ndarray:
    """−P⁻¹g, P = 2(−aΔ + 1), з P-ортогональною проєкцією на ker d(x₃-момент)."""
    grid = u.grid
    inv_p = 1.0 / (2.0 * (a * grid.eigenvalues + 1.0))

    def precondition(values: np.ndarray) -> np.ndarray:
        return grid.values(inv_p * grid.coefficients(values))

    d = -precondition(g)
    q = 2.0 * exp_density(grid, u.values) * grid.t
    q_pre = precondition(q)
    denom = grid.average(q * q_pre)
    if denom > 0:
        d = d - (grid.average(q * d) / denom) * q_pre
    return d


def minimize(
    a: float,
    spec: ConstraintSpec,
    init: AxiProfile | None = None,
    max_iter: int = 5000,
    tol: float = 1e-8,
    lmax: int = 32,
    seed: int | None = None,
) -> MinimizeResult:
    """Спуск до ‖∇J‖ < tol або max_iter ітерацій; кожна ітерація допустима."""
    if not (1.0 / 3.0 < a < 1.0):
        raise ConfigurationError(f"a має лежати в (1/3, 1), отримано: {a}")
    objective = _Objective(a, spec)
    u = normalize_mass(retract_to_M1(init if init is not None else AxiProfile.zeros(lmax)))
    if not objective.admissible(u):
        raise ConfigurationError(
            f"Початкове наближення порушує ‖Λ‖² ≤ c0: {lambda_sq(u):.6g} > {spec.c0}"
        )
    grid = u.grid
    feasible_moments = abs(x3_moment(u)) < MOMENT_TOL
    feasible_lambda = lambda_sq(u) <= spec.c0 + LAMBDA_TOL

    value = objective.value(u)
    grad_norm = np.inf
    converged = False
    iterations = 0
    for iterations in range(max_iter + 1):
        g = objective.gradient(u)
        d = _descent_direction(u, a, g)
        slope = grid.average(g * d)
        grad_norm = float(np.sqrt(max(0.0, -slope)))
        if grad_norm < tol:
            converged = True
            break
        if iterations == max_iter:
            break

        step = 1.0
        while True:
            try:
                trial = normalize_mass(retract_to_M1(AxiProfile.from_values(u.values + step * d, u.lmax)))
                trial_value = objective.value(trial)
                ok = (
                    trial_value <= value + ARMIJO_C * step * slope + ARMIJO_SLACK * (1.0 + abs(value))
                    and objective.admissible(trial)
                )
            except OnofriLabError:
                ok = False
            if ok:
                break
            step *= 0.5
            if step < MIN_STEP:
                raise DescentStallError(
                    f"Арміхо не зменшив J на ітерації {iterations} (J = {value:.6e}, ‖∇J‖ = {grad_norm:.3e})"
                )
        u, value = trial, trial_value
        feasible_moments = feasible_moments and abs(x3_moment(u)) < MOMENT_TOL
        feasible_lambda = feasible_lambda and lambda_sq(u) <= spec.c0 + LAMBDA_TOL
        if iterations % 100 == 0:
            print_debug(f"Спуск a={a:g}: ітерація {iterations}, J = {value:.6e}, ‖∇J‖ = {grad_norm:.3e}")

    return MinimizeResult(
        a=a,
        c0=spec.c0,
        mode=spec.mode,
        profile=u,
        J=functional_J(u, a),
        S_a=functional_S(u, a),
        multipliers=multipliers(u, a),
        iterations=iterations,
        feasible_moments=feasible_moments,
        feasible_lambda=feasible_lambda,
        sup_norm=u.sup_norm(),
        grad_norm=grad_norm,
        converged=converged,
        stationarity_residual=stationarity_residual(u, a),
        jensen_gap=_log_mass(grid, u.values) - 2.0 * u.mean(),
        seed=seed,
    )


@dataclass(frozen=True)
class LowerBoundSample:
    K1: float
    K2: float
    drawn: int
    accepted: int
    minimum: float
    values: np.ndarray = field(repr=False)

    @property
    def positive(self) -> bool:
        return self.accepted > 0 and self.minimum > 0

    def to_record(self) -> dict:
        return {
            "K1": self.K1,
            "K2": self.K2,
            "drawn": self.drawn,
            "accepted": self.accepted,
            "empirical_C0": self.minimum if self.accepted else None,
            "positive": self.positive,
        }


def sample_lower_bound(
    K1: float,
    K2: float,
    count: int = 500,
    seed: int = 0,
    lmax: int = 32,
    amplitude: float = 2.0,
) -> LowerBoundSample:
    """
    Емпірична нижня межа ½avg|∇u|² + 2ū на полях з M̊₁, avg e^{2u} = 1,
    ‖u‖_{H¹} ≤ K1 та ‖Λ(u)‖² ≥ K2.

    Профілі: випадкова амплітуда P₂ плюс шум до степеня 6, далі ретракція й нормування.
    """
    if K1 <= 0 or K2 <= 0:
        raise ConfigurationError("K1 та K2 мають бути додатними")
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(count):
        base = random_profile(rng, lmax, amplitude=0.3)
        c = np.array(base.coefficients)
        c[2] += rng.uniform(-amplitude, amplitude)
        try:
            u = normalize_mass(retract_to_M1(AxiProfile(c)))
        except OnofriLabError:
            continue
        energy = dirichlet_average(u)
        h1_sq = energy + u.grid.average(u.values ** 2)
        if h1_sq > K1 * K1 or lambda_sq(u) < K2:
            continue
        values.append(0.5 * energy + 2.0 * u.mean())
    arr = np.array(values, dtype=float)
    return LowerBoundSample(
        K1=K1,
        K2=K2,
        drawn=count,
        accepted=int(arr.shape[0]),
        minimum=float(np.min(arr)) if arr.size else float("nan"),
        values=arr,
    )

