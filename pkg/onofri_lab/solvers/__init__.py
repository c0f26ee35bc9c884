from .continuation import BranchPoint, SolutionBranch, continue_branch, near_third_report
from .meanfield import (
    AxiProfile,
    Diagnostics,
    diagnostics,
    kazdan_warner_defect,
    newton_solve,
    residual,
    trivial_spectrum,
)
from .minimizer import (
    ConstraintSpec,
    MinimizeResult,
    functional_J,
    gradient_J,
    minimize,
    multipliers,
    retract_to_M1,
    sample_lower_bound,
)

__all__ = [
    "AxiProfile",
    "BranchPoint",
    "ConstraintSpec",
    "Diagnostics",
    "MinimizeResult",
    "SolutionBranch",
    "continue_branch",
    "diagnostics",
    "functional_J",
    "gradient_J",
    "kazdan_warner_defect",
    "minimize",
    "multipliers",
    "near_third_report",
    "newton_solve",
    "residual",
    "retract_to_M1",
    "sample_lower_bound",
    "trivial_spectrum",
]
