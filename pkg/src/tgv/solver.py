"""TGV-regularized restoration with a quadratic data term.

Solves ``min_u (lam/2) ||K u - f||^2 + TGV^n(u)`` jointly over ``u`` and the
compact auxiliary fields with one PDHG loop.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from . import operators as ops
from .errors import ArgumentError
from .evaluate import TgvParams, as_image
from .grid_ops import Image
from .norms_prox import mixed_norm
from .pdhg import ChainProblem, estimate_operator_norm, solve_chain

__all__ = [
    "ForwardOp",
    "SolverConfig",
    "RestoreResult",
    "restore",
    "restore_objective",
    "default_alphas",
    "add_gaussian_noise",
    "synthetic_ramp",
    "estimate_operator_norm",
    "CG_MAX_ITERS",
    "CG_TOL",
]

CG_MAX_ITERS = 30
CG_TOL = 1e-10


@dataclass(frozen=True)
class ForwardOp:
    """Identity or periodic 2-D convolution with an odd-sized centered kernel."""

    kind: str = "identity"
    kernel: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("identity", "convolution"):
            raise ArgumentError(f"unknown forward operator kind {self.kind!r}")
        if self.kind == "convolution":
            if self.kernel is None:
                raise ArgumentError("convolution operator needs a kernel")
            k = np.atleast_2d(np.asarray(self.kernel, dtype=np.float64))
            if k.size == 0 or k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
                raise ArgumentError(f"kernel must be a non-empty odd-sized 2-D array, got {k.shape}")
            if not np.all(np.isfinite(k)):
                raise ArgumentError("kernel entries must be finite")
            k.setflags(write=False)
            object.__setattr__(self, "kernel", k)

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def convolution(cls, kernel):
        return cls("convolution", kernel)

    def _taps(self):
        ch, cw = self.kernel.shape[0] // 2, self.kernel.shape[1] // 2
        for a, b in np.ndindex(*self.kernel.shape):
            if self.kernel[a, b] != 0:
                yield self.kernel[a, b], a - ch, b - cw

    def _filter(self, v, shape, sign):
        v = np.asarray(v, dtype=np.float64)
        grid = v.reshape(shape + v.shape[1:])
        out = np.zeros_like(grid)
        for w, sa, sb in self._taps():
            out += w * np.roll(grid, (sign * sa, sign * sb), axis=(0, 1))
        return out.reshape(v.shape)

    def apply(self, v, shape):
        """``K v``; columns of an ``(N, m)`` input are filtered separately."""
        if self.kind == "identity":
            return np.array(v, dtype=np.float64)
        return self._filter(v, shape, 1)

    def adjoint(self, v, shape):
        """``K^T v``: correlation with the kernel, i.e. convolution with its flip."""
        if self.kind == "identity":
            return np.array(v, dtype=np.float64)
        return self._filter(v, shape, -1)


@dataclass(frozen=True)
class SolverConfig:
    data_weight: float = 1.0
    max_iters: int = 10000
    tol: float = 1e-7
    seed: int = 0
    log_every: int = 0
    window: int = 10

    def __post_init__(self):
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ArgumentError("tol must be positive")
        if not self.data_weight > 0:
            raise ArgumentError("data_weight must be positive")


@dataclass
class RestoreResult:
    image: Image
    fields: list
    objective_trace: list
    converged: bool
    iterations: int = 0
    objective: float = math.nan
    initial_objective: float = math.nan


def default_alphas(n, a=1.0):
    """Geometric weights ``(2**(n-1) a, ..., 2a, a)``.

    The first-order term gets weight ``a`` and each higher-order term twice
    the weight of the one below it, e.g. ``(2a, a)`` for TGV^2.
    """
    if n < 1:
        raise ArgumentError(f"order must be >= 1, got {n}")
    return tuple(a * 2.0 ** (n - 1 - i) for i in range(n))


def _data_prox(K, f, lam, shape):
    if K.kind == "identity":
        def prox(v, tau):
            return (v + tau * lam * f) / (1.0 + tau * lam)
        return prox

    N = f.shape[0]
    Ktf = K.adjoint(f, shape)

    def prox(v, tau):
        c = tau * lam
        A = LinearOperator((N, N), dtype=np.float64,
                           matvec=lambda x: x + c * K.adjoint(K.apply(x, shape), shape))
        rhs = (v + c * Ktf)[:, 0]
        x, _ = cg(A, rhs, x0=v[:, 0], rtol=CG_TOL, maxiter=CG_MAX_ITERS)
        return x[:, None]
    return prox


def _problem(f, K, params, lam, shape):
    n = params.order
    f = f.reshape(-1, 1)

    def data_value(u):
        r = K.apply(u, shape) - f
        return 0.5 * lam * float(np.vdot(r, r))

    return ChainProblem(
        forward=[lambda x, i=i: ops.compact_sym_derivative(x, i, shape) for i in range(n)],
        adjoint=[lambda y, i=i: ops.compact_sym_derivative_adjoint(y, i, shape)
                 for i in range(n)],
        weights=params.term_weights,
        project=[None] * n,
        data_prox=_data_prox(K, f, lam, shape),
        data_value=data_value,
    )


def restore_objective(u, fields, f, K, params, data_weight):
    """``(lam/2)||K u - f||^2`` plus the compact TGV cost at ``(u, fields)``."""
    f = as_image(f)
    u = np.asarray(u.data if isinstance(u, Image) else u, dtype=np.float64)
    xs = [u.reshape(-1, 1)] + [np.asarray(p, dtype=np.float64) for p in fields]
    return _problem(f.data, K, params, data_weight, f.shape).objective(xs)


def restore(f, K, params, cfg=SolverConfig()):
    """Restore ``f`` with order-``params.order`` TGV.

    Starts from ``u = f`` and zero fields and duals.  The returned iterate is
    the lowest-cost one visited.
    """
    f = as_image(f)
    if not np.all(np.isfinite(f.data)):
        raise ArgumentError("input image has non-finite samples")
    if not isinstance(params, TgvParams):
        raise ArgumentError("params must be a TgvParams")
    problem = _problem(f.data, K, params, cfg.data_weight, f.shape)
    xs = [f.data[:, None].copy()] + [np.zeros((f.size, i + 1))
                                     for i in range(1, params.order)]
    init = problem.objective(xs)
    out = solve_chain(problem, xs, tol=cfg.tol, max_iters=cfg.max_iters,
                      window=cfg.window, seed=cfg.seed, log_every=cfg.log_every)
    return RestoreResult(
        image=f.with_data(out.xs[0][:, 0]),
        fields=out.xs[1:],
        objective_trace=out.trace,
        converged=out.converged,
        iterations=out.iterations,
        objective=out.value,
        initial_objective=init,
    )


def add_gaussian_noise(f, sigma, seed):
    """``f + sigma * z`` with ``z`` from numpy's PCG64 generator seeded by ``seed``."""
    if sigma < 0:
        raise ArgumentError(f"sigma must be non-negative, got {sigma}")
    f = as_image(f)
    if sigma == 0:
        return f.with_data(f.data.copy())
    z = np.random.default_rng(seed).standard_normal(f.size)
    return f.with_data(f.data + sigma * z)


def synthetic_ramp(size=64):
    """Piecewise-affine test image on ``[0, 1]``: ramps separated by plateaus."""
    h = w = size
    r, c = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.empty((h, w))
    top = r < h // 2
    left = c < w // 4
    right = c >= 3 * w // 4
    ramp = 0.2 + 0.6 * (c - w // 4) / (w // 2)
    img[top & left] = 0.2
    img[top & right] = 0.8
    mid = top & ~left & ~right
    img[mid] = ramp[mid]
    bottom = ~top
    img[bottom] = 0.7 - 0.4 * (r[bottom] - h // 2) / (h - h // 2)
    box = (r >= 5 * h // 8) & (r < 7 * h // 8) & (c >= w // 4) & (c < w // 2)
    img[box] = 0.9
    return Image.from_array(img)
