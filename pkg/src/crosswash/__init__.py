"""Quantify crosswashing: weighted-sum scoring of taxonomy-aligned activities."""

from .core import (
    CAPEX,
    CONTRIBUTION,
    DEFAULT_WEIGHTS,
    LINK,
    TURNOVER,
    Activity,
    Criterion,
    DecisionMatrix,
    Direction,
    ScoreRow,
    ScoreTable,
    WeightVector,
    apply_deterioration,
    normalize_matrix,
    rescale_scores,
    score_run,
    weighted_sum,
)

__version__ = "0.1.0"

__all__ = [
    "CAPEX",
    "CONTRIBUTION",
    "DEFAULT_WEIGHTS",
    "LINK",
    "TURNOVER",
    "Activity",
    "Criterion",
    "DecisionMatrix",
    "Direction",
    "ScoreRow",
    "ScoreTable",
    "WeightVector",
    "apply_deterioration",
    "normalize_matrix",
    "rescale_scores",
    "score_run",
    "weighted_sum",
]
