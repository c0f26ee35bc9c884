"""
Псевдо-довжинне продовження за параметром a для −aΔu + 1 = e^{2u}.

Тривіальна гілка u ≡ 0 існує для всіх a. Нетривіальна гілка відгалужується
від (0, 1/3) у напрямку P₂; перша точка шукається коректором з фіксованою
проєкцією на P₂, далі: предиктор по дотичній і коректор Ньютона з
обмеженням довжини дуги.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.linalg import solve

from ..core.errors import ConfigurationError, OnofriLabError, SolverDivergenceError
from ..core.utils import print_debug, print_warning
from .meanfield import (
    DEFAULT_LMAX,
    AxiProfile,
    Diagnostics,
    LegendreCollocation,
    collocation,
    diagnostics,
    newton_iterate,
    residual_values,
)

THIRD = 1.0 / 3.0
A_RANGE = (0.3, 1.0)
SEED_AMPLITUDE = 0.05
MIN_SEED_FRACTION = 1.0 / 64.0
HIGH_LMAX = 128
SWITCH_A = 0.47
SWITCH_SUP = 4.0
RESOLVED_SUP = 6.0
CORRECTOR_MAX_ITER = 12
FAST_CORRECTOR_ITERS = 3
STEP_GROWTH = 1.5
MAX_POINTS = 2000
NEAR_THIRD_WINDOW = 0.05

BRANCH_COLUMNS = [
    "a", "sup_norm", "mean", "beta", "lambda_norm_sq", "beta_ratio", "profile_corr",
    "uhat_l2", "mass_defect", "kw3", "newton_iters", "lmax", "resolved",
]


@dataclass(frozen=True)
class BranchPoint:
    a: float
    profile: AxiProfile = field(repr=False)
    diagnostics: Diagnostics
    newton_iters: int = 0

    @property
    def lmax(self) -> int:
        return self.profile.lmax

    @property
    def resolved(self) -> bool:
        return self.diagnostics.sup_norm <= RESOLVED_SUP

    def to_row(self) -> dict:
        row = {"a": self.a}
        row.update(self.diagnostics.as_dict())
        row.update({"newton_iters": self.newton_iters, "lmax": self.lmax, "resolved": self.resolved})
        return row


@dataclass(frozen=True)
class SolutionBranch:
    points: tuple[BranchPoint, ...]
    failed: bool = False
    failure: str = ""

    def __len__(self) -> int:
        return len(self.points)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([p.to_row() for p in self.points], columns=BRANCH_COLUMNS)

    def at(self, a: float, tol: float = 1e-12) -> BranchPoint | None:
        for point in self.points:
            if abs(point.a - a) <= tol:
                return point
        return None


@dataclass
class _State:
    """Точка кривої (u, a) у вузлах колокації поточного L_max."""
    grid: LegendreCollocation
    u: np.ndarray
    a: float

    @property
    def coefficients(self) -> np.ndarray:
        return self.grid.coefficients(self.u)


def _inner(grid: LegendreCollocation, du1: np.ndarray, da1: float, du2: np.ndarray, da2: float) -> float:
    """Метрика diag(w/2, 1): avg(du₁·du₂) + da₁·da₂."""
    return float(grid.avg_weights @ (du1 * du2) + da1 * da2)


def _bordered_matrix(grid: LegendreCollocation, u: np.ndarray, a: float, tau_u: np.ndarray, tau_a: float):
    n = grid.size
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = a * grid.K - np.diag(2.0 * np.exp(2.0 * u))
    M[:n, n] = grid.minus_laplacian(u)
    M[n, :n] = grid.avg_weights * tau_u
    M[n, n] = tau_a
    return M


def _tangent(state: _State, prev_u: np.ndarray, prev_a: float) -> tuple[np.ndarray, float]:
    """Дотична з облямованої системи, нормована й орієнтована як попередня."""
    grid = state.grid
    M = _bordered_matrix(grid, state.u, state.a, prev_u, prev_a)
    rhs = np.zeros(grid.size + 1)
    rhs[-1] = 1.0
    z = solve(M, rhs)
    tau_u, tau_a = z[:-1], float(z[-1])
    norm = np.sqrt(_inner(grid, tau_u, tau_a, tau_u, tau_a))
    tau_u, tau_a = tau_u / norm, tau_a / norm
    if _inner(grid, tau_u, tau_a, prev_u, prev_a) < 0:
        tau_u, tau_a = -tau_u, -tau_a
    return tau_u, tau_a


def _correct(
    state: _State,
    tau_u: np.ndarray,
    tau_a: float,
    h: float,
    tol: float,
) -> tuple[_State, int]:
    """
    Ньютон для F(u, a) = 0 разом з ⟨(u, a) − (u₀, a₀), τ⟩ = h,
    старт із предиктора (u₀, a₀) + h·τ.
    """
    grid = state.grid
    u = state.u + h * tau_u
    a = state.a + h * tau_a
    trace: list[float] = []
    for it in range(CORRECTOR_MAX_ITER + 1):
        F = residual_values(grid, u, a)
        N = _inner(grid, u - state.u, a - state.a, tau_u, tau_a) - h
        norm = max(float(np.max(np.abs(F))), abs(N))
        trace.append(norm)
        if norm < tol:
            return _State(grid, u, a), it
        if it == CORRECTOR_MAX_ITER or not np.isfinite(norm):
            break
        M = _bordered_matrix(grid, u, a, tau_u, tau_a)
        delta = solve(M, -np.concatenate([F, [N]]))
        u = u + delta[:-1]
        a = a + float(delta[-1])
    raise SolverDivergenceError(f"Коректор не збігся (h={h:.3e})", trace)


def _to_point(state: _State, iters: int) -> BranchPoint:
    profile = AxiProfile(state.coefficients)
    return BranchPoint(a=state.a, profile=profile, diagnostics=diagnostics(profile, state.a), newton_iters=iters)


def _resample(state: _State, tau_u: np.ndarray, lmax: int) -> tuple[_State, np.ndarray]:
    """Перенесення стану й дотичної на колокацію з іншим L_max (коефіцієнти доповнюються нулями)."""
    new_grid = collocation(lmax)

    def move(values: np.ndarray) -> np.ndarray:
        c = np.zeros(lmax + 1)
        old = state.grid.coefficients(values)
        k = min(lmax, state.grid.lmax) + 1
        c[:k] = old[:k]
        return new_grid.values(c)

    return _State(new_grid, move(state.u), state.a), move(tau_u)


def _target_values(a_start: float, a_end: float, step: float) -> np.ndarray:
    count = int(np.ceil(abs(a_end - a_start) / step - 1e-12)) + 1
    return np.linspace(a_start, a_end, max(count, 2))


def _trivial_points(a_values: Sequence[float], lmax: int, tol: float) -> list[BranchPoint]:
    points = []
    profile = AxiProfile.zeros(lmax)
    for a in a_values:
        result = newton_iterate(float(a), profile, tol)
        profile = result.profile
        points.append(BranchPoint(float(a), profile, diagnostics(profile, float(a)), result.iterations))
    return points


def _seed_nontrivial(grid: LegendreCollocation, tol: float) -> tuple[_State, int]:
    """Перша точка нетривіальної гілки біля (0, 1/3)."""
    p2 = grid.values(np.eye(grid.size)[2])
    p2_norm = np.sqrt(grid.average(p2 * p2))
    e_u = p2 / p2_norm
    origin = _State(grid, np.zeros(grid.size), THIRD)
    amplitude = SEED_AMPLITUDE
    last_error: OnofriLabError | None = None
    while abs(amplitude) >= SEED_AMPLITUDE * MIN_SEED_FRACTION:
        try:
            state, iters = _correct(origin, e_u, 0.0, amplitude * p2_norm, tol)
        except OnofriLabError as e:
            last_error = e
            amplitude *= 0.5
            continue
        if state.a < THIRD and amplitude > 0:
            amplitude = -amplitude
            continue
        return state, iters
    raise SolverDivergenceError(
        f"Не вдалося відгалузитися від a = 1/3: {last_error}" if last_error else
        "Не вдалося відгалузитися від a = 1/3"
    )


def _trace_nontrivial(
    a_hi: float,
    step: float,
    h_min: float,
    lmax: int,
    tol: float,
) -> tuple[list[tuple[_State, int]], bool, str]:
    """Послідовність прийнятих станів від точки відгалуження до a ≥ a_hi."""
    grid = collocation(lmax)
    first, iters = _seed_nontrivial(grid, tol)
    accepted: list[tuple[_State, int]] = [(_State(grid, np.zeros(grid.size), THIRD), 0), (first, iters)]

    # Початкова орієнтація: січна від точки відгалуження
    prev_u, prev_a = first.u.copy(), first.a - THIRD
    norm = np.sqrt(_inner(grid, prev_u, prev_a, prev_u, prev_a))
    prev_u, prev_a = prev_u / norm, prev_a / norm

    state = first
    h = step
    h_max = 8.0 * step
    while state.a < a_hi:
        if len(accepted) > MAX_POINTS:
            return accepted, True, f"перевищено {MAX_POINTS} точок до a={a_hi:g}"
        tau_u, tau_a = _tangent(state, prev_u, prev_a)
        new_state: _State | None = None
        if tau_a > 0:
            try:
                new_state, iters = _correct(state, tau_u, tau_a, h, tol)
            except OnofriLabError as e:
                h *= 0.5
                print_debug(f"Коректор a={state.a:.6g}: {e}; крок → {h:.3e}")
                if h < h_min:
                    return accepted, True, f"коректор не збігся при мінімальному кроці біля a={state.a:.6g}"
                continue
        if new_state is None or new_state.a <= state.a:
            # Точка повороту: на грубій сітці переходимо на HIGH_LMAX, інакше гілка обривається
            if state.grid.lmax < HIGH_LMAX:
                print_warning(
                    f"a={state.a:.4f}: поворот гілки за a, L_max {state.grid.lmax} → {HIGH_LMAX}"
                )
                state, prev_u = _resample(state, prev_u, HIGH_LMAX)
                accepted[-1] = (state, accepted[-1][1])
                h = step
                continue
            return accepted, True, f"точка повороту біля a={state.a:.6g}"
        if new_state.a <= THIRD:
            return accepted, True, f"гілка повернулась до a={new_state.a:.6g} ≤ 1/3"
        accepted.append((new_state, iters))
        prev_u, prev_a = tau_u, tau_a
        state = new_state
        if iters <= FAST_CORRECTOR_ITERS:
            h = min(h * STEP_GROWTH, h_max)

        if state.grid.lmax < HIGH_LMAX and state.a > SWITCH_A:
            sup = AxiProfile(state.coefficients).sup_norm()
            if sup > SWITCH_SUP:
                print_warning(
                    f"a={state.a:.4f}: ‖u‖∞ = {sup:.3g} > {SWITCH_SUP:g}, L_max {state.grid.lmax} → {HIGH_LMAX}"
                )
                state, prev_u = _resample(state, prev_u, HIGH_LMAX)
                accepted[-1] = (state, iters)
    return accepted, False, ""


def _initial_guess(accepted: list[tuple[_State, int]], a: float) -> AxiProfile:
    """Лінійна інтерполяція між сусідніми за ходом гілки точками, що охоплюють a."""
    for (s0, _), (s1, _) in zip(accepted, accepted[1:]):
        lo, hi = sorted((s0.a, s1.a))
        if lo <= a <= hi and hi > lo:
            lmax = max(s0.grid.lmax, s1.grid.lmax)
            p0 = _profile_of(s0).resized(lmax)
            p1 = _profile_of(s1).resized(lmax)
            w = (a - s0.a) / (s1.a - s0.a)
            return AxiProfile((1.0 - w) * p0.coefficients + w * p1.coefficients)
    nearest = min(accepted, key=lambda item: abs(item[0].a - a))[0]
    return _profile_of(nearest)


def _profile_of(state: _State) -> AxiProfile:
    return AxiProfile(state.coefficients)


def continue_branch(
    a_start: float,
    a_end: float,
    step: float = 0.01,
    switch_at_third: bool = True,
    lmax: int = DEFAULT_LMAX,
    targets: Sequence[float] = (),
    h_min: float | None = None,
    tol: float = 1e-11,
) -> SolutionBranch:
    """
    Гілка розв'язків між a_start та a_end.

    switch_at_third=False: тривіальна гілка на сітці a з кроком step.
    switch_at_third=True: нижче 1/3 тривіальна гілка, вище 1/3 нетривіальна
    гілка з відгалуженням у напрямку P₂. Цільові значення (разом з a_start та
    a_end) розв'язуються точно природним Ньютоном від найближчої точки гілки.
    """
    lo, hi = sorted((float(a_start), float(a_end)))
    if not (A_RANGE[0] < lo and hi < A_RANGE[1]):
        raise ConfigurationError(f"[a_start, a_end] має лежати в (0.3, 1), отримано: [{a_start}, {a_end}]")
    if step <= 0:
        raise ConfigurationError(f"Крок має бути > 0, отримано: {step}")
    h_min = h_min if h_min is not None else step / 64.0
    descending = a_end < a_start

    if not switch_at_third:
        points = _trivial_points(_target_values(a_start, a_end, step), lmax, tol)
        return SolutionBranch(tuple(points))

    points: list[BranchPoint] = []
    if lo < THIRD:
        trivial_hi = min(hi, THIRD - step / 2.0) if hi > THIRD else hi
        if trivial_hi >= lo:
            points.extend(_trivial_points(_target_values(lo, trivial_hi, step), lmax, tol))
    if hi <= THIRD:
        points.sort(key=lambda p: p.a, reverse=descending)
        return SolutionBranch(tuple(points))

    accepted, failed, failure = _trace_nontrivial(hi, step, h_min, lmax, tol)
    if failed:
        print_warning(f"Гілка часткова: {failure}")
    reached = max(s.a for s, _ in accepted)

    nontrivial_lo = max(lo, THIRD)
    for state, iters in accepted[1:]:
        if nontrivial_lo <= state.a <= hi:
            points.append(_to_point(state, iters))

    wanted = sorted({float(a) for a in (*targets, a_start, a_end) if THIRD < float(a) <= hi})
    for a in wanted:
        if a > reached:
            print_warning(f"a={a:g} поза досягнутою частиною гілки (до {reached:.6g})")
            continue
        init = _initial_guess(accepted, a)
        try:
            result = newton_iterate(a, init, tol)
        except OnofriLabError as e:
            print_warning(f"a={a:g}: {e}")
            failed, failure = True, failure or f"ціль a={a:g}: {e}"
            continue
        points = [p for p in points if abs(p.a - a) > 1e-12]
        points.append(BranchPoint(a, result.profile, diagnostics(result.profile, a), result.iterations))

    points.sort(key=lambda p: p.a, reverse=descending)
    return SolutionBranch(tuple(points), failed=failed, failure=failure)


def near_third_report(branch: SolutionBranch, window: float = NEAR_THIRD_WINDOW) -> pd.DataFrame:
    """profile_corr, beta_ratio та ‖û‖/‖u‖∞² для точок з a − 1/3 ∈ (0, window]."""
    rows = []
    for point in branch.points:
        gap = point.a - THIRD
        if 0.0 < gap <= window and point.diagnostics.sup_norm > 0:
            d = point.diagnostics
            rows.append({
                "a": point.a,
                "profile_corr": d.profile_corr,
                "beta_ratio": d.beta_ratio,
                "uhat_ratio": d.uhat_l2 / d.sup_norm ** 2,
            })
    return pd.DataFrame(rows, columns=["a", "profile_corr", "beta_ratio", "uhat_ratio"])
