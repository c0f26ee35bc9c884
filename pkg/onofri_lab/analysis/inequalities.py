"""
Набір перевірок нерівностей на випадкових обмежених за спектром полях:
Онофрі, Єнсена та спектральних щілин 6 і 12.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..core.utils import resolve_threads
from ..sphere.fields import ScalarField, dirichlet_energy, exp_mass, mean_value, onofri_gap
from ..sphere.quadrature import build_gauss_grid, weighted_sum
from ..sphere.spectral import random_expansion, synthesize

GAP_TOL = 1e-10
JENSEN_TOL = 1e-12
SPECTRAL_TOL = 1e-9

SAMPLE_COLUMNS = ["index", "onofri_gap", "jensen_gap", "spectral_gap_6", "spectral_gap_12"]


def _l2_sq(u: ScalarField) -> float:
    return float(weighted_sum(u.grid.weights, u.samples ** 2, u.grid.nodes))


@dataclass(frozen=True)
class SampleSuite:
    frame: pd.DataFrame
    worst_field: ScalarField | None = field(default=None, repr=False)

    @property
    def violations(self) -> int:
        f = self.frame
        return int(
            (f["onofri_gap"] < -GAP_TOL).sum()
            + (f["jensen_gap"] < -JENSEN_TOL).sum()
            + (f["spectral_gap_6"] < -SPECTRAL_TOL).sum()
            + (f["spectral_gap_12"] < -SPECTRAL_TOL).sum()
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_record(self) -> dict:
        f = self.frame
        worst = int(f["onofri_gap"].idxmin()) if len(f) else None
        return {
            "count": int(len(f)),
            "min_onofri_gap": float(f["onofri_gap"].min()) if len(f) else None,
            "min_jensen_gap": float(f["jensen_gap"].min()) if len(f) else None,
            "min_spectral_gap_6": float(f["spectral_gap_6"].min()) if len(f) else None,
            "min_spectral_gap_12": float(f["spectral_gap_12"].min()) if len(f) else None,
            "worst_index": worst,
            "violations": self.violations,
            "passed": self.passed,
        }


def random_field_suite(
    count: int = 1000,
    lmax: int = 6,
    amplitude: float = 1.0,
    seed: int = 0,
    grid_L: int = 32,
    threads: int = 0,
) -> SampleSuite:
    """
    Для кожного поля u: щілина Онофрі, щілина Єнсена log avg e^{2u} − 2ū,
    ∫|∇v|² − 6∫v² для v без степенів 0, 1 і ∫|∇w|² − 12∫w² для осесиметричного
    w без степенів 0, 1, 2.
    """
    grid = build_gauss_grid(grid_L)
    children = np.random.SeedSequence(seed).spawn(count)

    def run(index: int) -> tuple[dict, ScalarField]:
        rng = np.random.default_rng(children[index])
        e = random_expansion(lmax, rng, amplitude=amplitude)
        u = synthesize(e, grid)
        v = synthesize(e.high_pass(2), grid)
        w = synthesize(e.axisymmetric().high_pass(3), grid)
        row = {
            "index": index,
            "onofri_gap": onofri_gap(u),
            "jensen_gap": float(np.log(exp_mass(u))) - 2.0 * mean_value(u),
            "spectral_gap_6": dirichlet_energy(v) - 6.0 * _l2_sq(v),
            "spectral_gap_12": dirichlet_energy(w) - 12.0 * _l2_sq(w),
        }
        return row, u

    with ThreadPoolExecutor(max_workers=resolve_threads(threads, count)) as pool:
        results = list(pool.map(run, range(count)))
    frame = pd.DataFrame([row for row, _ in results], columns=SAMPLE_COLUMNS)
    worst = results[int(frame["onofri_gap"].idxmin())][1] if results else None
    return SampleSuite(frame=frame, worst_field=worst)
