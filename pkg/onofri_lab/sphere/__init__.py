from .fields import (
    ScalarField,
    dirichlet_energy,
    dump_field,
    exp_first_moments,
    exp_mass,
    load_field,
    mean_value,
    onofri_functional,
    onofri_gap,
)
from .geometry import (
    NORTH_POLE,
    Rotation,
    SpherePoint,
    geodesic_distance,
    rotation_mapping,
)
from .moments import MomentMatrix, conjugate, lambda_matrix, lambda_norm_sq
from .quadrature import (
    CapPatch,
    QuadratureGrid,
    build_cap_patches,
    build_gauss_grid,
    integrate,
    quadrature_exactness_suite,
)
from .spectral import (
    SHExpansion,
    analyze,
    dirichlet_energy_spectral,
    laplace_beltrami,
    random_expansion,
    synthesize,
)

__all__ = [
    "CapPatch",
    "MomentMatrix",
    "NORTH_POLE",
    "QuadratureGrid",
    "Rotation",
    "SHExpansion",
    "ScalarField",
    "SpherePoint",
    "analyze",
    "build_cap_patches",
    "build_gauss_grid",
    "conjugate",
    "dirichlet_energy",
    "dirichlet_energy_spectral",
    "dump_field",
    "exp_first_moments",
    "exp_mass",
    "geodesic_distance",
    "integrate",
    "lambda_matrix",
    "lambda_norm_sq",
    "laplace_beltrami",
    "load_field",
    "mean_value",
    "onofri_functional",
    "onofri_gap",
    "quadrature_exactness_suite",
    "random_expansion",
    "rotation_mapping",
    "synthesize",
]
