from .bubbles import (
    CONFIGURATIONS,
    AsymptoticReport,
    BubbleSpec,
    bubble_report,
    make_bubble_field,
    predicted_asymptotics,
    verify_asymptotics,
)
from .concentration import (
    PointMeasure,
    SearchResult,
    centroid,
    lambda_infty,
    min_lambda_over_configs,
)

__all__ = [
    "CONFIGURATIONS",
    "AsymptoticReport",
    "BubbleSpec",
    "PointMeasure",
    "SearchResult",
    "bubble_report",
    "centroid",
    "lambda_infty",
    "make_bubble_field",
    "min_lambda_over_configs",
    "predicted_asymptotics",
    "verify_asymptotics",
]
