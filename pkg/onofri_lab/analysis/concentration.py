"""
Дискретні міри концентрації Σνᵢδ_{pᵢ}, граничні матриці Λ∞ та пошук
мінімуму ‖Λ∞‖² серед центрованих конфігурацій.

Пошук: багатостартовий BFGS зі штрафом за центр мас, далі SLSQP з точним
обмеженням Σνᵢpᵢ = 0, далі проєкція ваг і канонічне обертання.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..core.errors import ConfigurationError, InfeasibleConfigurationError
from ..core.utils import print_debug, resolve_threads
from ..sphere.geometry import NORTH_POLE, Rotation, SpherePoint, as_points, rotation_mapping
from ..sphere.moments import MomentMatrix, lambda_norm_sq

WEIGHT_SUM_TOL = 1e-12
DISTINCT_TOL = 1e-9
MERGE_TOL = 1e-6
PENALTY_WEIGHT = 1e6


@dataclass(frozen=True)
class PointMeasure:
    """Ймовірнісна міра з атомами у різних точках сфери."""
    weights: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        p = np.array(self.points, dtype=float).reshape(-1, 3)
        if w.shape[0] != p.shape[0] or w.shape[0] == 0:
            raise ConfigurationError("Кількість ваг має дорівнювати кількості атомів (≥ 1)")
        if np.any(w <= 0):
            raise ConfigurationError("Ваги атомів мають бути додатними")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
            raise ConfigurationError(f"Сума ваг {float(np.sum(w))!r} ≠ 1")
        for x in p:
            SpherePoint.from_vector(x)
        if p.shape[0] > 1:
            gaps = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
            gaps[np.diag_indices_from(gaps)] = np.inf
            if np.min(gaps) < DISTINCT_TOL:
                raise ConfigurationError("Атоми міри мають бути попарно різними")
        w.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "points", p)

    @classmethod
    def uniform(cls, points) -> "PointMeasure":
        p = as_points(points)
        return cls(np.full(p.shape[0], 1.0 / p.shape[0]), p)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def atoms(self) -> list[tuple[float, SpherePoint]]:
        return [(float(w), SpherePoint.from_vector(p)) for w, p in zip(self.weights, self.points)]

    def transformed(self, A: Rotation) -> "PointMeasure":
        """Образ міри при u ↦ u∘A: атоми переходять у Aᵀpᵢ."""
        return PointMeasure(self.weights, self.points @ A.matrix)


def centroid(mu: PointMeasure) -> np.ndarray:
    return mu.weights @ mu.points


def _lambda_entries(weights: np.ndarray, points: np.ndarray) -> np.ndarray:
    m = (points.T * weights) @ points - np.eye(3) / 3.0
    return 0.5 * (m + m.T)


def lambda_infty(mu: PointMeasure) -> MomentMatrix:
    """Σνᵢpᵢpᵢᵀ − I/3."""
    return MomentMatrix(_lambda_entries(mu.weights, mu.points))


# --- параметризація: кути (θ, φ) для точок, softmax-логіти для ваг ---

def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / np.sum(e)


def _points_and_derivatives(theta: np.ndarray, phi: np.ndarray):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    P = np.stack([st * cp, st * sp, ct], axis=1)
    d_theta = np.stack([ct * cp, ct * sp, -st], axis=1)
    d_phi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=1)
    return P, d_theta, d_phi


def _unpack(x: np.ndarray, n: int):
    P, d_theta, d_phi = _points_and_derivatives(x[:n], x[n:2 * n])
    nu = _softmax(x[2 * n:3 * n])
    return P, d_theta, d_phi, nu


def _objective(x: np.ndarray, n: int, penalty: float = 0.0) -> tuple[float, np.ndarray]:
    """‖Λ∞‖² (+ penalty·‖c‖²) та аналітичний градієнт за (θ, φ, z)."""
    P, d_theta, d_phi, nu = _unpack(x, n)
    Lam = (P.T * nu) @ P - np.eye(3) / 3.0
    value = float(np.sum(Lam * Lam))
    LamP = P @ Lam
    g_theta = 4.0 * nu * np.sum(LamP * d_theta, axis=1)
    g_phi = 4.0 * nu * np.sum(LamP * d_phi, axis=1)
    g_nu = 2.0 * np.sum(LamP * P, axis=1)
    g_z = nu * (g_nu - nu @ g_nu)
    if penalty:
        c = nu @ P
        value += penalty * float(c @ c)
        grad_c = 2.0 * penalty * c
        g_theta = g_theta + nu * (d_theta @ grad_c)
        g_phi = g_phi + nu * (d_phi @ grad_c)
        g_z = g_z + nu * ((P - c) @ grad_c)
    return value, np.concatenate([g_theta, g_phi, g_z])


def _centroid_constraint(x: np.ndarray, n: int) -> np.ndarray:
    P, _, _, nu = _unpack(x, n)
    return nu @ P


def _centroid_jacobian(x: np.ndarray, n: int) -> np.ndarray:
    P, d_theta, d_phi, nu = _unpack(x, n)
    c = nu @ P
    J = np.zeros((3, 3 * n))
    J[:, :n] = (d_theta * nu[:, None]).T
    J[:, n:2 * n] = (d_phi * nu[:, None]).T
    J[:, 2 * n:] = ((P - c) * nu[:, None]).T
    return J


def stationarity_residual(x: np.ndarray, n: int, constrained: bool = True) -> float:
    """‖∇f − Jᵀμ*‖, μ*: найменші квадрати; без обмеження просто ‖∇f‖."""
    _, grad = _objective(x, n)
    if not constrained:
        return float(np.linalg.norm(grad))
    J = _centroid_jacobian(x, n)
    mu, *_ = np.linalg.lstsq(J.T, grad, rcond=None)
    return float(np.linalg.norm(grad - J.T @ mu))


def _random_start(rng: np.random.Generator, n: int) -> np.ndarray:
    theta = np.arccos(rng.uniform(-1.0, 1.0, n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    z = 0.1 * rng.standard_normal(n)
    return np.concatenate([theta, phi, z])


def _local_search(x0: np.ndarray, n: int, constrained: bool) -> np.ndarray:
    if not constrained:
        res = minimize(_objective, x0, args=(n,), jac=True, method="BFGS",
                       options={"gtol": 1e-12, "maxiter": 2000})
        return res.x
    res = minimize(_objective, x0, args=(n, PENALTY_WEIGHT), jac=True, method="BFGS",
                   options={"gtol": 1e-10, "maxiter": 2000})
    polish = minimize(
        _objective,
        res.x,
        args=(n,),
        jac=True,
        method="SLSQP",
        constraints=[{
            "type": "eq",
            "fun": _centroid_constraint,
            "jac": _centroid_jacobian,
            "args": (n,),
        }],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    return polish.x


def project_weights(weights: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Найближчі ваги з Σνᵢpᵢ = 0 та Σνᵢ = 1 (мінімальна поправка через псевдообернену).

    Якщо проєкція робить якусь вагу недодатною, повертаються вихідні ваги.
    """
    A = np.vstack([points.T, np.ones(points.shape[0])])
    b = np.array([0.0, 0.0, 0.0, 1.0])
    projected = weights + np.linalg.pinv(A) @ (b - A @ weights)
    if np.any(projected <= 0):
        return weights / np.sum(weights)
    return projected / np.sum(projected)


def _merge_atoms(weights: np.ndarray, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    kept_w: list[float] = []
    kept_p: list[np.ndarray] = []
    for w, p in zip(weights, points):
        for i, q in enumerate(kept_p):
            if np.linalg.norm(p - q) < MERGE_TOL:
                kept_w[i] += float(w)
                break
        else:
            kept_w.append(float(w))
            kept_p.append(p)
    return np.array(kept_w), np.array(kept_p)


def canonical_rotation(points: np.ndarray) -> Rotation:
    """Перший атом → північний полюс, другий: у площину {x₁ = 0} з x₂ ≥ 0."""
    R1 = rotation_mapping(points[0], NORTH_POLE)
    if points.shape[0] < 2:
        return R1
    q = R1.apply(points[1])
    rho = float(np.hypot(q[0], q[1]))
    if rho < 1e-12:
        return R1
    alpha = np.pi / 2 - np.arctan2(q[1], q[0])
    Rz = Rotation(np.array([
        [np.cos(alpha), -np.sin(alpha), 0.0],
        [np.sin(alpha), np.cos(alpha), 0.0],
        [0.0, 0.0, 1.0],
    ]))
    return Rz @ R1


@dataclass(frozen=True)
class SearchResult:
    N: int
    even: bool
    infimum: float
    measure: PointMeasure
    stationarity_residual: float
    starts: int

    def to_record(self) -> dict:
        return {
            "N": self.N,
            "even": self.even,
            "infimum": self.infimum,
            "atoms": [
                {"nu": float(w), "p": [float(x) for x in p]}
                for w, p in zip(self.measure.weights, self.measure.points)
            ],
            "stationarity_residual": self.stationarity_residual,
        }


def _pair_result() -> SearchResult:
    measure = PointMeasure([0.5, 0.5], [NORTH_POLE, -NORTH_POLE])
    return SearchResult(
        N=2,
        even=True,
        infimum=lambda_norm_sq(lambda_infty(measure)),
        measure=measure,
        stationarity_residual=0.0,
        starts=0,
    )


def min_lambda_over_configs(
    N: int,
    even_symmetric: bool = False,
    starts: int = 200,
    seed: int = 0,
    threads: int = 0,
) -> SearchResult:
    """
    inf ‖Λ∞(μ)‖² серед мір з N атомами та нульовим центром мас.

    even_symmetric: атоми парами ±pₖ з рівними вагами (N має бути парним).
    Для N = 2 центрування змушує антиподальну пару, значення 2/3 аналітичне.
    """
    if N < 2:
        raise InfeasibleConfigurationError(f"N={N}: одноатомну міру неможливо центрувати")
    if even_symmetric and N % 2:
        raise InfeasibleConfigurationError(f"N={N}: непарне N несумісне з симетрією ±p")
    if starts < 1:
        raise ConfigurationError(f"Кількість стартів має бути ≥ 1, отримано: {starts}")
    if N == 2:
        return _pair_result()

    n = N // 2 if even_symmetric else N
    constrained = not even_symmetric
    children = np.random.SeedSequence(seed).spawn(starts)

    def run(index: int) -> tuple[float, int, np.ndarray]:
        rng = np.random.default_rng(children[index])
        x = _local_search(_random_start(rng, n), n, constrained)
        value, _ = _objective(x, n)
        if constrained:
            value += PENALTY_WEIGHT * float(np.sum(_centroid_constraint(x, n) ** 2))
        return value, index, x

    workers = resolve_threads(threads, starts)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, range(starts)))
    best_value, best_index, best_x = min(results, key=lambda item: (item[0], item[1]))
    print_debug(f"Найкращий старт #{best_index}: {best_value:.3e}")

    residual = stationarity_residual(best_x, n, constrained)
    P, _, _, nu = _unpack(best_x, n)
    if even_symmetric:
        weights = np.concatenate([nu / 2.0, nu / 2.0])
        points = np.concatenate([P, -P])
    else:
        weights = project_weights(nu, P)
        points = P
    weights, points = _merge_atoms(weights, points)
    order = np.argsort(-weights, kind="stable")
    weights, points = weights[order], points[order]

    A = canonical_rotation(points)
    points = A.apply(points)
    points = points / np.linalg.norm(points, axis=1, keepdims=True)
    measure = PointMeasure(weights / np.sum(weights), points)
    return SearchResult(
        N=N,
        even=even_symmetric,
        infimum=lambda_norm_sq(lambda_infty(measure)),
        measure=measure,
        stationarity_residual=residual,
        starts=starts,
    )


def pairwise_dots(measure: PointMeasure) -> np.ndarray:
    """Скалярні добутки pᵢ·pⱼ для i < j."""
    G = measure.points @ measure.points.T
    return G[np.triu_indices(measure.size, k=1)]

