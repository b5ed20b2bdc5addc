"""Primal-dual hybrid gradient iterations for chained TGV costs.

The cost handled here is

    data(x_0) + sum_i w_i * mixed_norm(F_i(x_i) - x_{i+1}),   x_n = 0,

where each ``F_i`` is a linear symmetric-derivative operator.  The first
variable is either held fixed (TGV evaluation) or updated through the prox
of a data term (restoration).  The remaining variables may be constrained
to a subspace via an orthogonal projector.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .norms_prox import mixed_norm, project_rows_l2_ball

__all__ = ["ChainProblem", "PdhgOutcome", "estimate_operator_norm", "solve_chain"]

log = logging.getLogger(__name__)


def estimate_operator_norm(apply, apply_adjoint, x0, max_iters=1000, tol=1e-8):
    """Largest singular value of a linear map by power iteration.

    Parameters
    ----------
    apply, apply_adjoint : callable
        The map and its transpose.
    x0 : array or list of arrays
        Starting point; its structure defines the domain of ``apply``.
    max_iters : int
        Iteration cap.
    tol : float
        Stop once the relative change of the estimate drops below ``tol``.

    Returns
    -------
    float
        The estimate, or 0.0 for the zero operator.
    """
    structured = isinstance(x0, (list, tuple))
    x = _as_list(x0)
    nrm = _norm(x)
    if nrm == 0:
        return 0.0
    x = [a / nrm for a in x]
    est = 0.0
    for _ in range(max_iters):
        y = _as_list(apply_adjoint(apply(x if structured else x[0])))
        nrm = _norm(y)
        if nrm == 0:
            return 0.0
        new = np.sqrt(nrm)
        x = [a / nrm for a in y]
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return float(est)


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _norm(xs):
    return float(np.sqrt(sum(float(np.vdot(a, a)) for a in xs)))


@dataclass
class ChainProblem:
    """Operators and weights of one chained TGV cost.

    ``forward[i]`` / ``adjoint[i]`` implement ``F_i`` and its transpose.
    ``project[j]`` (``j >= 1``) projects ``x_j`` onto its feasible subspace
    or is ``None``.  ``data_prox(v, tau)`` returns the prox of ``tau * data``
    at ``v``; ``data_value(x0)`` evaluates the data term.  Leave both
    ``None`` to keep ``x_0`` fixed.
    """

    forward: list
    adjoint: list
    weights: list
    project: list
    data_prox: object = None
    data_value: object = None

    @property
    def order(self):
        return len(self.weights)

    @property
    def first_free(self):
        return 0 if self.data_prox is not None else 1

    def residuals(self, xs):
        n = self.order
        out = []
        for i in range(n):
            r = self.forward[i](xs[i])
            if i + 1 < n:
                r = r - xs[i + 1]
            out.append(r)
        return out

    def objective(self, xs):
        val = sum(w * mixed_norm(r) for w, r in zip(self.weights, self.residuals(xs)))
        if self.data_value is not None:
            val += self.data_value(xs[0])
        return float(val)

    def apply_free(self, free):
        """Linear part of the residuals as a function of the free variables."""
        xs = [None] * self.first_free + list(free)
        n = self.order
        out = []
        for i in range(n):
            r = self.forward[i](xs[i]) if xs[i] is not None else 0.0
            if i + 1 < n:
                r = r - xs[i + 1]
            out.append(r)
        return out

    def adjoint_free(self, ys):
        n = self.order
        out = []
        for j in range(self.first_free, n):
            g = self.adjoint[j](ys[j])
            if j >= 1:
                g = g - ys[j - 1]
            out.append(g)
        return out


@dataclass
class PdhgOutcome:
    xs: list
    ys: list
    value: float
    iterations: int
    residual: float
    converged: bool
    trace: list = field(default_factory=list)
    step: float = 0.0


def solve_chain(problem, xs, *, tol, max_iters, window=10, min_iters=0,
                seed=0, norm_iters=1000, norm_tol=1e-8, log_every=0):
    """Run PDHG from ``xs`` (a list of ``order`` arrays, ``xs[0]`` first).

    The returned iterate is the one with the smallest cost seen so far, and
    ``trace`` holds ``(iteration, cost)`` of that iterate after every step,
    so it never increases.  Iteration stops once the relative change of the
    current cost over ``window`` steps falls below ``tol``.
    """
    n = problem.order
    xs = [np.array(x, dtype=np.float64, copy=True) for x in xs]
    ff = problem.first_free
    free_shapes = [x.shape for x in xs[ff:]]

    rng = np.random.default_rng(seed)
    start = [rng.standard_normal(s) for s in free_shapes]
    L = estimate_operator_norm(problem.apply_free, problem.adjoint_free, start,
                               max_iters=norm_iters, tol=norm_tol) if start else 0.0

    value = problem.objective(xs)
    trace = [(0, value)]
    if not start or L == 0.0:
        return PdhgOutcome(xs, [], value, 0, 0.0, True, trace)

    step = 0.99 / L
    ys = [np.zeros_like(r) for r in problem.residuals(xs)]
    xbar = [x.copy() for x in xs]
    best_xs = [x.copy() for x in xs]
    best = value
    history = [value]
    converged = False
    residual = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        res = problem.residuals(xbar)
        for i in range(n):
            ys[i] = project_rows_l2_ball(ys[i] + step * res[i], problem.weights[i])
        grads = problem.adjoint_free(ys)
        new = list(xs)
        for j, g in zip(range(ff, n), grads):
            v = xs[j] - step * g
            if j == 0:
                v = problem.data_prox(v, step)
            elif problem.project[j] is not None:
                v = problem.project[j](v)
            new[j] = v
        for j in range(ff, n):
            xbar[j] = 2.0 * new[j] - xs[j]
        xs = new

        value = problem.objective(xs)
        history.append(value)
        if value < best:
            best = value
            best_xs = [x.copy() for x in xs]
        trace.append((it, best))
        if log_every and it % log_every == 0:
            log.info("iter %d cost %.12g best %.12g", it, value, best)
        if it >= max(window, min_iters):
            ref = history[-1 - window]
            residual = abs(value - ref) / max(abs(value), 1e-300)
            if residual < tol:
                converged = True
                break
    return PdhgOutcome(best_xs, ys, best, it, float(residual), converged, trace, step)
