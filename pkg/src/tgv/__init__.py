"""Tensor-free total generalized variation of any order.

Compact and direct matrix forms of TGV^n, their operators, and a
primal-dual restoration solver.
"""

from .errors import ArgumentError, CapacityError, ConsistencyError, PgmParseError
from .evaluate import (EvalConfig, EvalResult, TgvParams, eval_tgv_compact, eval_tgv_direct,
                       eval_tv, objective_compact, objective_direct)
from .grid_ops import Image
from .solver import (ForwardOp, RestoreResult, SolverConfig, add_gaussian_noise,
                     default_alphas, restore, restore_objective)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "CapacityError",
    "ConsistencyError",
    "PgmParseError",
    "EvalConfig",
    "EvalResult",
    "TgvParams",
    "eval_tgv_compact",
    "eval_tgv_direct",
    "eval_tv",
    "objective_compact",
    "objective_direct",
    "Image",
    "ForwardOp",
    "RestoreResult",
    "SolverConfig",
    "add_gaussian_noise",
    "default_alphas",
    "restore",
    "restore_objective",
]
