"""
Квадратури на сфері.

- build_gauss_grid: L вузлів Гауса–Лежандра по t = x₃ × 2L рівновіддалених довгот
- build_cap_patches: полярні шапки радіуса 2δ навколо точок концентрації
- composite_integrate: шапки + глобальна сітка через тотожність віднімання фону
- quadrature_exactness_suite: перевірка мономів x₁^a x₂^b x₃^c проти точних значень
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy.special import gamma, roots_legendre

from ..core.errors import ConfigurationError, QuadratureError
from .geometry import SpherePoint, as_points, pairwise_distances, tangent_frame

FOUR_PI = 4.0 * np.pi
WEIGHT_SUM_TOL = 1e-11

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureGrid:
    """
    Глобальна сітка Гауса–Лежандра.

    Вузли впорядковані за широтами: індекс = i·2L + j, де i: вузол t_i,
    j: довгота φ_j = πj/L.
    """
    L: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    gauss_weights: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if np.any(self.weights <= 0):
            raise QuadratureError("Ваги квадратури мають бути додатними")
        total = float(np.sum(self.weights))
        if abs(total - FOUR_PI) > WEIGHT_SUM_TOL:
            raise QuadratureError(f"Сума ваг {total!r} ≠ 4π")

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_lon(self) -> int:
        return 2 * self.L


@dataclass(frozen=True)
class CapPatch:
    """Полярна шапка B_{2δ}(center) з локальними вузлами (r, θ)."""
    center: SpherePoint
    outer_radius: float
    n_r: int
    n_ang: int
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def area(self) -> float:
        return float(2.0 * np.pi * (1.0 - np.cos(self.outer_radius)))


def build_gauss_grid(L: int) -> QuadratureGrid:
    """Сітка L × 2L, точна для поліномів степеня ≤ 2L−1 по t і частот < 2L по довготі."""
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise ConfigurationError(f"Роздільність сітки L має бути цілим ≥ 2, отримано: {L!r}")
    L = int(L)
    t, gw = roots_legendre(L)
    phi = np.pi * np.arange(2 * L) / L
    sin_theta = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    x1 = np.outer(sin_theta, np.cos(phi))
    x2 = np.outer(sin_theta, np.sin(phi))
    x3 = np.repeat(t[:, None], 2 * L, axis=1)
    nodes = np.stack([x1.ravel(), x2.ravel(), x3.ravel()], axis=1)
    weights = np.repeat(gw * (np.pi / L), 2 * L)
    return QuadratureGrid(L=L, nodes=nodes, weights=weights, t=t, gauss_weights=gw, phi=phi)


def _check_finite(values: np.ndarray, nodes: np.ndarray) -> None:
    if np.all(np.isfinite(values)):
        return
    flat = values.reshape(values.shape[0], -1)
    bad = int(np.argmax(~np.all(np.isfinite(flat), axis=1)))
    x = nodes[bad]
    raise QuadratureError(
        f"Нескінченне значення підінтегральної функції у вузлі "
        f"({x[0]:.6g}, {x[1]:.6g}, {x[2]:.6g})"
    )


def weighted_sum(weights: np.ndarray, values: np.ndarray, nodes: np.ndarray):
    """Σ wᵢ f(pᵢ) з перевіркою скінченності; значення можуть мати хвостові осі."""
    values = np.asarray(values, dtype=float)
    _check_finite(values, nodes)
    return np.tensordot(weights, values, axes=(0, 0))


def integrate(grid: QuadratureGrid, f) -> float:
    """Σ wᵢ f(pᵢ); f: функція від масиву вузлів (n, 3) або готові значення у вузлах."""
    values = f(grid.nodes) if callable(f) else np.asarray(f, dtype=float)
    if values.shape != (grid.size,):
        raise QuadratureError(
            f"Очікувалось {grid.size} значень у вузлах, отримано форму {values.shape}"
        )
    return float(weighted_sum(grid.weights, values, grid.nodes))


def _radial_rule(delta: float, n_r: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Радіальні вузли та ваги dr на [0, 2δ].

    [0, δ]: r = δ·s³ (згущення до r = 0), n_r вузлів Гауса по s.
    [δ, 2δ]: звичайний Гаус, max(16, n_r // 4) вузлів. Розбиття в r = δ
    відділяє злам третьої похідної зрізу.
    """
    x, w = roots_legendre(n_r)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w
    r_inner = delta * s ** 3
    w_inner = 3.0 * delta * s * s * ws

    n_outer = max(16, n_r // 4)
    x, w = roots_legendre(n_outer)
    r_outer = delta + 0.5 * delta * (x + 1.0)
    w_outer = 0.5 * delta * w
    return np.concatenate([r_inner, r_outer]), np.concatenate([w_inner, w_outer])


def _build_patch(center: np.ndarray, two_delta: float, n_r: int, n_ang: int) -> CapPatch:
    delta = 0.5 * two_delta
    r, wr = _radial_rule(delta, n_r)
    theta = 2.0 * np.pi * np.arange(n_ang) / n_ang
    e1, e2 = tangent_frame(center)

    rr, tt = np.meshgrid(r, theta, indexing="ij")
    direction = np.cos(tt)[..., None] * e1 + np.sin(tt)[..., None] * e2
    nodes = np.cos(rr)[..., None] * center + np.sin(rr)[..., None] * direction
    weights = np.outer(wr * np.sin(r), np.full(n_ang, 2.0 * np.pi / n_ang))

    patch = CapPatch(
        center=SpherePoint.from_vector(center),
        outer_radius=two_delta,
        n_r=n_r,
        n_ang=n_ang,
        r=rr.ravel(),
        theta=tt.ravel(),
        nodes=nodes.reshape(-1, 3),
        weights=weights.ravel(),
    )
    total = float(np.sum(patch.weights))
    if abs(total - patch.area) > WEIGHT_SUM_TOL:
        raise QuadratureError(
            f"Сума ваг шапки {total!r} відрізняється від площі {patch.area!r}"
        )
    return patch


def build_cap_patches(
    centers: Sequence,
    two_delta: float,
    n_r: int = 200,
    n_ang: int = 32,
) -> tuple[CapPatch, ...]:
    """Шапки радіуса 2δ навколо центрів; центри мають бути на відстані > 2·(2δ)."""
    if two_delta <= 0 or two_delta >= np.pi / 2:
        raise ConfigurationError(f"Радіус шапки 2δ має лежати в (0, π/2), отримано: {two_delta}")
    if n_r < 2 or n_ang < 2:
        raise ConfigurationError("n_r та n_ang мають бути ≥ 2")
    pts = as_points(centers)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if len(pts) > 1:
        dist = pairwise_distances(pts)
        iu = np.triu_indices(len(pts), k=1)
        closest = int(np.argmin(dist[iu]))
        d_min = float(dist[iu][closest])
        if d_min <= 2.0 * two_delta:
            i, j = iu[0][closest], iu[1][closest]
            raise QuadratureError(
                f"Шапки перекриваються: центри {i} та {j} на відстані {d_min:.6g} ≤ 2·{two_delta:.6g}"
            )
    return tuple(_build_patch(c, two_delta, n_r, n_ang) for c in pts)


def composite_integrate(
    grid: QuadratureGrid,
    patches: Sequence[CapPatch],
    integrand: Integrand,
    evaluate: Callable[[np.ndarray], np.ndarray],
    background: float = 0.0,
):
    """
    ∫F(u) = Σ_global w·F(b) + Σ_caps Σ w·[F(u) − F(b)].

    Точно, коли поза шапками u ≡ b; integrand(values, points) -> масив (n, ...).
    """
    bg_values = np.full(grid.size, background, dtype=float)
    total = weighted_sum(grid.weights, integrand(bg_values, grid.nodes), grid.nodes)
    for patch in patches:
        values = evaluate(patch.nodes)
        diff = integrand(values, patch.nodes) - integrand(
            np.full_like(values, background), patch.nodes
        )
        total = total + weighted_sum(patch.weights, diff, patch.nodes)
    return total


def monomial_integral(a: int, b: int, c: int) -> float:
    """∫ x₁^a x₂^b x₃^c dV у замкненій формі."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    return float(
        2.0 * gamma((a + 1) / 2) * gamma((b + 1) / 2) * gamma((c + 1) / 2)
        / gamma((a + b + c + 3) / 2)
    )


def quadrature_exactness_suite(L: int, max_degree: int = 4, tol: float = 1e-12) -> pd.DataFrame:
    """Порівнює квадратуру сітки L з точними інтегралами всіх мономів степеня ≤ max_degree."""
    grid = build_gauss_grid(L)
    x1, x2, x3 = grid.nodes.T
    rows = []
    for degree in range(max_degree + 1):
        for a in range(degree, -1, -1):
            for b in range(degree - a, -1, -1):
                c = degree - a - b
                exact = monomial_integral(a, b, c)
                computed = integrate(grid, x1 ** a * x2 ** b * x3 ** c)
                error = abs(computed - exact)
                rows.append({
                    "a": a,
                    "b": b,
                    "c": c,
                    "degree": degree,
                    "exact": exact,
                    "computed": computed,
                    "abs_error": error,
                    "passed": bool(error <= tol),
                })
    return pd.DataFrame(rows, columns=["a", "b", "c", "degree", "exact", "computed", "abs_error", "passed"])
