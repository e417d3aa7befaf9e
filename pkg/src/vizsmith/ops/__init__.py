"""Operations on a generated visualization: refine, explain, evaluate, repair, recommend."""

from vizsmith.ops.evaluate import (
    DIMENSIONS,
    DimensionScore,
    EvaluationReport,
    dimension_prompt,
    evaluate,
)
from vizsmith.ops.explain import explain
from vizsmith.ops.recommend import recommend
from vizsmith.ops.refine import RefinementSession, RefinementTurn, refine
from vizsmith.ops.repair import repair

__all__ = [
    "DIMENSIONS",
    "DimensionScore",
    "EvaluationReport",
    "RefinementSession",
    "RefinementTurn",
    "dimension_prompt",
    "evaluate",
    "explain",
    "recommend",
    "refine",
    "repair",
]
