"""Pixel-L1 and Chamfer evaluation of generated glyphs."""

from src.evaluation.metrics import (
    N_P_EVAL,
    EvalReport,
    EvalRow,
    IdentityOracle,
    ModelGenerator,
    eval_chamfer,
    eval_pixel,
    eval_split,
)

__all__ = [
    "N_P_EVAL",
    "EvalReport",
    "EvalRow",
    "IdentityOracle",
    "ModelGenerator",
    "eval_chamfer",
    "eval_pixel",
    "eval_split",
]
