"""Values of TV^n and TGV^n for a given image.

``TgvParams.alphas[i]`` is ``alpha_i``.  Term ``i`` of the TGV cost (the one
comparing the order-``i`` field with the order-``i+1`` field) is weighted by
``alpha_{n-i-1}``, so ``alphas[-1]`` multiplies the first-order term
``||D_0 g - p_1||`` and ``alphas[0]`` the highest-order term.
"""

from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .errors import ArgumentError, CapacityError
from .grid_ops import Image, iterated_derivative
from .norms_prox import mixed_norm
from .pdhg import ChainProblem, solve_chain

__all__ = [
    "TgvParams",
    "EvalConfig",
    "EvalResult",
    "MAX_DIRECT_ORDER",
    "as_image",
    "eval_tv",
    "eval_tgv_compact",
    "eval_tgv_direct",
    "objective_compact",
    "objective_direct",
]

MAX_DIRECT_ORDER = 8


@dataclass(frozen=True)
class TgvParams:
    order: int
    alphas: tuple

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if self.order < 1:
            raise ArgumentError(f"TGV order must be >= 1, got {self.order}")
        if len(alphas) != self.order:
            raise ArgumentError(
                f"order {self.order} needs {self.order} weights, got {len(alphas)}")
        if not all(a > 0 and np.isfinite(a) for a in alphas):
            raise ArgumentError(f"weights must be positive and finite: {alphas}")

    def term_weight(self, i):
        """Weight of term ``i``, i.e. ``alpha_{n-i-1}``."""
        return self.alphas[self.order - 1 - i]

    @property
    def term_weights(self):
        return [self.term_weight(i) for i in range(self.order)]


@dataclass(frozen=True)
class EvalConfig:
    tol: float = 1e-8
    max_iters: int = 20000
    window: int = 10
    seed: int = 0
    log_every: int = 0


@dataclass
class EvalResult:
    """Outcome of a TGV evaluation.

    ``fields`` holds the auxiliary fields ``p_1 .. p_{n-1}`` (compact) or
    ``u_1 .. u_{n-1}`` (direct) at the returned iterate; ``trace`` lists
    ``(iteration, cost)`` of the returned iterate after each step.
    """

    value: float
    fields: list
    iterations: int
    residual: float
    converged: bool = True
    trace: list = field(default_factory=list)


def as_image(g):
    if isinstance(g, Image):
        return g
    return Image.from_array(g)


def eval_tv(g, n):
    """``n``-th order total variation: mixed norm of the ``n``-fold derivative."""
    if n < 1:
        raise ArgumentError(f"TV order must be >= 1, got {n}")
    g = as_image(g)
    Y = g.data[:, None]
    for _ in range(n):
        Y = iterated_derivative(Y, g.shape)
    return mixed_norm(Y)


def _check_fields(fields, n, width, N):
    fields = list(fields)
    if len(fields) != n - 1:
        raise ArgumentError(f"order {n} needs {n - 1} fields, got {len(fields)}")
    out = []
    for i, p in enumerate(fields, start=1):
        p = np.asarray(p, dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        if p.shape != (N, width(i)):
            raise ArgumentError(
                f"field {i} has shape {p.shape}, expected {(N, width(i))}")
        out.append(p)
    return out


def compact_chain(shape, params):
    n = params.order
    return ChainProblem(
        forward=[lambda x, i=i: ops.compact_sym_derivative(x, i, shape) for i in range(n)],
        adjoint=[lambda y, i=i: ops.compact_sym_derivative_adjoint(y, i, shape)
                 for i in range(n)],
        weights=params.term_weights,
        project=[None] * n,
    )


def direct_chain(shape, params):
    n = params.order
    return ChainProblem(
        forward=[lambda x, i=i: ops.direct_sym_derivative(x, i, shape) for i in range(n)],
        adjoint=[lambda y, i=i: ops.direct_sym_derivative_adjoint(y, i, shape)
                 for i in range(n)],
        weights=params.term_weights,
        project=[None] + [lambda x, i=i: ops.pi_project(x, i) for i in range(1, n)],
    )


def objective_compact(g, fields, params):
    """TGV cost in compact form at fixed fields ``p_1 .. p_{n-1}``."""
    g = as_image(g)
    fields = _check_fields(fields, params.order, lambda i: i + 1, g.size)
    return compact_chain(g.shape, params).objective([g.data[:, None]] + fields)


def objective_direct(g, fields, params):
    """TGV cost in direct form at fixed fields ``u_1 .. u_{n-1}``.

    Fields are used as given; symmetry is not enforced here.
    """
    g = as_image(g)
    fields = _check_fields(fields, params.order, lambda i: 1 << i, g.size)
    return direct_chain(g.shape, params).objective([g.data[:, None]] + fields)


def _run(problem, g, widths, cfg):
    xs = [g.data[:, None]] + [np.zeros((g.size, w)) for w in widths]
    out = solve_chain(problem, xs, tol=cfg.tol, max_iters=cfg.max_iters,
                      window=cfg.window, seed=cfg.seed, log_every=cfg.log_every)
    return EvalResult(value=out.value, fields=out.xs[1:], iterations=out.iterations,
                      residual=out.residual, converged=out.converged, trace=out.trace)


def eval_tgv_compact(g, params, cfg=EvalConfig()):
    """TGV^n of ``g`` by minimizing the compact cost over ``p_1 .. p_{n-1}``.

    For ``n = 1`` there is nothing to minimize and the value is exact.
    Unconverged runs return their best value with ``converged=False``.
    """
    g = as_image(g)
    widths = [i + 1 for i in range(1, params.order)]
    return _run(compact_chain(g.shape, params), g, widths, cfg)


def eval_tgv_direct(g, params, cfg=EvalConfig()):
    """TGV^n of ``g`` by minimizing the direct cost over symmetric ``u_1 .. u_{n-1}``.

    Field ``u_i`` has ``2**i`` columns and is kept in the range of the
    order-``i`` symmetrizer by projecting after every primal step.
    """
    if params.order > MAX_DIRECT_ORDER:
        raise CapacityError(
            f"direct form is capped at order {MAX_DIRECT_ORDER}, got {params.order}")
    g = as_image(g)
    widths = [1 << i for i in range(1, params.order)]
    return _run(direct_chain(g.shape, params), g, widths, cfg)
