"""
Тестові функції-"бульбашки" зі зрізом і перевірка їхньої асимптотики.

u(p) = Σᵢ χ(rᵢ)·Φ_{ε,ν}(rᵢ),  Φ_{ε,ν}(r) = −log(ε² + r²) + ½·log ν,
rᵢ: геодезична відстань до центру i. χ ≡ 1 на [0, δ], χ ≡ 0 на [2δ, π],
між ними квінтичний smoothstep.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.integrate import quad

from ..core.errors import ConfigurationError, OnofriLabError
from ..core.utils import print_warning, resolve_threads
from ..sphere.fields import (
    ScalarField,
    dirichlet_energy,
    exp_first_moments,
    exp_mass,
    mean_value,
)
from ..sphere.geometry import SpherePoint, as_points, geodesic_distances, pairwise_distances
from ..sphere.moments import lambda_matrix, lambda_norm_sq
from ..sphere.quadrature import FOUR_PI, QuadratureGrid, build_cap_patches, build_gauss_grid
from .concentration import PointMeasure, lambda_infty

DEFAULT_DELTA = 0.35
GRADIENT_SIN_TOL = 1e-14

_S = float(np.sqrt(2.0) / 3.0)
_T = float(np.sqrt(2.0 / 3.0))
_H = float(np.sqrt(3.0) / 2.0)

CONFIGURATIONS: dict[str, tuple[np.ndarray, float]] = {
    "PAIR": (np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), 1.0 / 2.0),
    "TRIANGLE": (np.array([[0.0, 0.0, 1.0], [0.0, _H, -0.5], [0.0, -_H, -0.5]]), 1.0 / 3.0),
    "TETRAHEDRON": (
        np.array([
            [0.0, 0.0, 1.0],
            [0.0, 2.0 * _S, -1.0 / 3.0],
            [_T, -_S, -1.0 / 3.0],
            [-_T, -_S, -1.0 / 3.0],
        ]),
        1.0 / 4.0,
    ),
    "OCTAHEDRON": (
        np.array([
            [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
        ]),
        1.0 / 6.0,
    ),
}

REPORT_COLUMNS = [
    "config", "eps", "mass_ratio", "energy_ratio", "lambda_norm_sq", "kw_defect", "mean",
    "energy_ratio_refined", "mean_deviation", "onofri_ratio", "mass", "energy", "error",
]


@dataclass(frozen=True)
class BubbleSpec:
    """Конфігурація центрів, масштаб ε, радіус зрізу δ і маса ν кожної бульбашки."""
    centers: tuple[SpherePoint, ...]
    eps: float
    delta: float = DEFAULT_DELTA
    nu: float = 1.0
    config: str = "CUSTOM"

    def __post_init__(self) -> None:
        if not self.centers:
            raise ConfigurationError("Потрібен хоча б один центр")
        if not self.delta > 0 or 2.0 * self.delta >= np.pi / 2:
            raise ConfigurationError(f"δ має лежати в (0, π/4), отримано: {self.delta}")
        if not (0.0 < self.eps <= self.delta / 10.0):
            raise ConfigurationError(
                f"ε={self.eps:g} поза (0, δ/10 = {self.delta / 10.0:g}]"
            )
        if not (0.0 < self.nu <= 1.0):
            raise ConfigurationError(f"ν має лежати в (0, 1], отримано: {self.nu}")
        if len(self.centers) > 1:
            d = pairwise_distances(self.centers)
            d_min = float(np.min(d[np.triu_indices(len(self.centers), k=1)]))
            if 4.0 * self.delta >= d_min:
                raise ConfigurationError(
                    f"4δ = {4.0 * self.delta:g} ≥ мінімальної відстані між центрами {d_min:.6g}"
                )

    @classmethod
    def named(cls, config: str, eps: float, delta: float = DEFAULT_DELTA) -> "BubbleSpec":
        key = config.upper()
        if key not in CONFIGURATIONS:
            raise ConfigurationError(
                f"Невідома конфігурація '{config}'. Доступні: {', '.join(CONFIGURATIONS)}"
            )
        points, nu = CONFIGURATIONS[key]
        centers = tuple(SpherePoint.from_vector(p) for p in points)
        return cls(centers=centers, eps=eps, delta=delta, nu=nu, config=key)

    @property
    def size(self) -> int:
        return len(self.centers)

    @property
    def center_array(self) -> np.ndarray:
        return as_points(self.centers)


# --- радіальний профіль ---

def cutoff(r: np.ndarray, delta: float) -> np.ndarray:
    """χ(r) = 1 − S(s), S(s) = s³(10 − 15s + 6s²), s = (r − δ)/δ."""
    s = np.clip((np.asarray(r, dtype=float) - delta) / delta, 0.0, 1.0)
    return 1.0 - s ** 3 * (10.0 - 15.0 * s + 6.0 * s * s)


def cutoff_derivative(r: np.ndarray, delta: float) -> np.ndarray:
    s = np.clip((np.asarray(r, dtype=float) - delta) / delta, 0.0, 1.0)
    return -30.0 * s * s * (1.0 - s) ** 2 / delta


def bubble_profile(r: np.ndarray, eps: float, nu: float) -> np.ndarray:
    """Φ_{ε,ν}(r)."""
    r = np.asarray(r, dtype=float)
    return -np.log(eps * eps + r * r) + 0.5 * np.log(nu)


def bubble_profile_derivative(r: np.ndarray, eps: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return -2.0 * r / (eps * eps + r * r)


def radial_value(r: np.ndarray, spec: BubbleSpec) -> np.ndarray:
    return cutoff(r, spec.delta) * bubble_profile(r, spec.eps, spec.nu)


def radial_derivative(r: np.ndarray, spec: BubbleSpec) -> np.ndarray:
    return (
        cutoff_derivative(r, spec.delta) * bubble_profile(r, spec.eps, spec.nu)
        + cutoff(r, spec.delta) * bubble_profile_derivative(r, spec.eps)
    )


def make_bubble_field(
    spec: BubbleSpec,
    grid: QuadratureGrid | None = None,
    n_r: int = 200,
    n_ang: int = 32,
) -> ScalarField:
    """Поле з аналітичними значенням і градієнтом та шапками B_{2δ} навколо центрів."""
    grid = grid or build_gauss_grid(32)
    centers = spec.center_array

    def evaluator(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        total = np.zeros(points.shape[0])
        for c in centers:
            total += radial_value(geodesic_distances(points, c), spec)
        return total

    def gradient(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        total = np.zeros_like(points)
        for c in centers:
            r = geodesic_distances(points, c)
            sin_r = np.sin(r)
            tangent = c[None, :] - (points @ c)[:, None] * points
            safe = sin_r > GRADIENT_SIN_TOL
            coeff = np.zeros_like(r)
            coeff[safe] = -radial_derivative(r[safe], spec) / sin_r[safe]
            total += coeff[:, None] * tangent
        return total

    patches = build_cap_patches(centers, 2.0 * spec.delta, n_r=n_r, n_ang=n_ang)
    return ScalarField.from_function(
        grid,
        evaluator,
        gradient=gradient,
        patches=patches,
        background=0.0,
        label=f"{spec.config}(ε={spec.eps:g})",
    )


# --- передбачення ---

def energy_offset(delta: float, nu: float) -> float:
    """
    κ_δ у розкладі енергії однієї шапки 8π(log(1/ε) + κ_δ) + O(ε² log ε).

    κ_δ = log δ − ½ + ¼[∫₀^δ 4(sin r − r)/r² dr + ∫_δ^{2δ} g₀(r)² sin r dr],
    g₀: радіальна похідна профілю при ε = 0.
    """
    def inner(r: float) -> float:
        if r < 1e-8:
            return -2.0 * r / 3.0
        return 4.0 * (np.sin(r) - r) / (r * r)

    def outer(r: float) -> float:
        g0 = (
            cutoff_derivative(r, delta) * (-2.0 * np.log(r) + 0.5 * np.log(nu))
            + cutoff(r, delta) * (-2.0 / r)
        )
        return float(g0 * g0 * np.sin(r))

    i1, _ = quad(inner, 0.0, delta, epsabs=1e-13, epsrel=1e-12)
    i2, _ = quad(outer, delta, 2.0 * delta, epsabs=1e-13, epsrel=1e-12)
    return float(np.log(delta) - 0.5 + 0.25 * (i1 + i2))


def mean_limit(spec: BubbleSpec) -> float:
    """Границя ū при ε → 0: (1/4π)·N·2π∫₀^{2δ} χ(r)(−2 log r + ½ log ν) sin r dr."""
    def integrand(r: float) -> float:
        if r <= 0.0:
            return 0.0
        return float(cutoff(r, spec.delta) * (-2.0 * np.log(r) + 0.5 * np.log(spec.nu)) * np.sin(r))

    value, _ = quad(integrand, 0.0, 2.0 * spec.delta, points=[spec.delta], epsabs=1e-13, epsrel=1e-12)
    return float(spec.size * 2.0 * np.pi * value / FOUR_PI)


@dataclass(frozen=True)
class AsymptoticReport:
    config: str
    eps: float
    delta: float
    mass: float
    energy: float
    mean: float
    lambda_entries: np.ndarray = field(repr=False)
    kw_defect: float = 0.0
    mass_leading: float = 0.0
    energy_leading: float = 0.0
    energy_refined: float = 0.0
    mean_leading: float = 0.0
    mean_limit: float = 0.0
    lambda_limit: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)), repr=False)

    @property
    def mass_ratio(self) -> float:
        return self.mass / self.mass_leading

    @property
    def energy_ratio(self) -> float:
        return self.energy / self.energy_leading

    @property
    def energy_ratio_refined(self) -> float:
        return self.energy / self.energy_refined

    @property
    def lambda_norm_sq(self) -> float:
        return lambda_norm_sq(self.lambda_entries)

    @property
    def mean_deviation(self) -> float:
        return abs(self.mean - self.mean_limit)

    @property
    def onofri_ratio(self) -> float:
        """(log avg e^{2u} − 2ū) / avg|∇u|²; прямує до 1/N."""
        return (float(np.log(self.mass)) - 2.0 * self.mean) / (self.energy / FOUR_PI)

    @property
    def energy_constant(self) -> float:
        """Емпірична стала O_δ(1) в енергії на одну шапку."""
        n = round(self.energy_leading / (8.0 * np.pi * np.log(1.0 / self.eps)))
        return self.energy / (8.0 * np.pi * n) - float(np.log(1.0 / self.eps))

    def to_row(self) -> dict:
        return {
            "config": self.config,
            "eps": self.eps,
            "mass_ratio": self.mass_ratio,
            "energy_ratio": self.energy_ratio,
            "lambda_norm_sq": self.lambda_norm_sq,
            "kw_defect": self.kw_defect,
            "mean": self.mean,
            "energy_ratio_refined": self.energy_ratio_refined,
            "mean_deviation": self.mean_deviation,
            "onofri_ratio": self.onofri_ratio,
            "mass": self.mass,
            "energy": self.energy,
            "error": "",
        }


def predicted_asymptotics(spec: BubbleSpec) -> dict:
    """Головні члени: маса Nν/(4ε²), енергія 8πN·log(1/ε), ū → 0, Λ → Λ∞ рівномірної міри."""
    log_inv = float(np.log(1.0 / spec.eps))
    return {
        "mass_leading": spec.size * spec.nu / (4.0 * spec.eps ** 2),
        "energy_leading": 8.0 * np.pi * spec.size * log_inv,
        "energy_refined": 8.0 * np.pi * spec.size * (log_inv + energy_offset(spec.delta, spec.nu)),
        "mean_leading": 0.0,
        "mean_limit": mean_limit(spec),
        "lambda_limit": np.array(lambda_infty(PointMeasure.uniform(spec.center_array)).entries),
    }


def verify_asymptotics(
    spec: BubbleSpec,
    grid: QuadratureGrid | None = None,
    n_r: int = 200,
    n_ang: int = 32,
) -> AsymptoticReport:
    u = make_bubble_field(spec, grid, n_r=n_r, n_ang=n_ang)
    mass = exp_mass(u)
    moments = exp_first_moments(u)
    return AsymptoticReport(
        config=spec.config,
        eps=spec.eps,
        delta=spec.delta,
        mass=mass,
        energy=dirichlet_energy(u),
        mean=mean_value(u),
        lambda_entries=np.array(lambda_matrix(u).entries),
        kw_defect=float(np.max(np.abs(moments)) / mass),
        **predicted_asymptotics(spec),
    )


def bubble_report(
    configs: Sequence[str],
    eps_ladder: Sequence[float],
    delta: float = DEFAULT_DELTA,
    grid_L: int = 32,
    n_r: int = 200,
    n_ang: int = 32,
    threads: int = 0,
) -> pd.DataFrame:
    """Таблиця configs × ε; помилка окремого рядка записується в колонку error."""
    grid = build_gauss_grid(grid_L)
    tasks = [(config, float(eps)) for config in configs for eps in eps_ladder]

    def run(task: tuple[str, float]) -> dict:
        config, eps = task
        try:
            spec = BubbleSpec.named(config, eps, delta)
            return verify_asymptotics(spec, grid, n_r=n_r, n_ang=n_ang).to_row()
        except OnofriLabError as e:
            print_warning(f"{config}, ε={eps:g}: {e}")
            row = {column: np.nan for column in REPORT_COLUMNS}
            row.update({"config": config.upper(), "eps": eps, "error": str(e)})
            return row

    with ThreadPoolExecutor(max_workers=resolve_threads(threads, len(tasks))) as pool:
        rows = list(pool.map(run, tasks))
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)



MASS_TOL = 0.05
ENERGY_TOL = 0.05
LAMBDA_TOL = 0.02
KW_TOL = 1e-6

CHECK_COLUMNS = ["config", "eps", "mass_ok", "energy_ok", "lambda_ok", "kw_ok", "trend_ok", "passed"]


def _decreasing(values: pd.Series) -> bool:
    return bool(np.all(np.diff(values.to_numpy(dtype=float)) < 0))


def ladder_checks(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Вердикт по кожній конфігурації таблиці bubble_report.

    Пороги маси, уточненої енергії, ‖Λ‖² і Kazdan–Warner перевіряються на
    найменшому ε; спадання mean_deviation та |energy_ratio − 1| перевіряється
    вздовж сходинки ε. Конфігурації, де всі рядки з помилкою, пропускаються.
    """
    computed = frame[frame["error"].fillna("") == ""]
    rows = []
    for config, group in computed.groupby("config", sort=False):
        points, _ = CONFIGURATIONS[config]
        limit = lambda_norm_sq(lambda_infty(PointMeasure.uniform(points)))
        ladder = group.sort_values("eps", ascending=False)
        last = ladder.iloc[-1]
        trend_ok = True
        if len(ladder) > 1:
            trend_ok = (
                _decreasing(ladder["mean_deviation"])
                and _decreasing((ladder["energy_ratio"] - 1.0).abs())
            )
        row = {
            "config": config,
            "eps": float(last["eps"]),
            "mass_ok": bool(abs(last["mass_ratio"] - 1.0) < MASS_TOL),
            "energy_ok": bool(abs(last["energy_ratio_refined"] - 1.0) < ENERGY_TOL),
            "lambda_ok": bool(abs(last["lambda_norm_sq"] - limit) < LAMBDA_TOL),
            "kw_ok": bool(last["kw_defect"] < KW_TOL),
            "trend_ok": trend_ok,
        }
        row["passed"] = all(row[key] for key in CHECK_COLUMNS[2:7])
        rows.append(row)
    return pd.DataFrame(rows, columns=CHECK_COLUMNS)
