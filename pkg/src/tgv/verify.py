"""Numerical checks of the operator identities, used by ``tgv verify``."""

import contextlib
from dataclasses import dataclass

import numpy as np

from . import combinatorics as comb
from . import grid_ops as go
from . import operators as ops
from .norms_prox import mixed_norm, project_rows_l2_ball, prox_mixed_norm
from .solver import ForwardOp

__all__ = ["Check", "run_checks", "inject_scaling_fault", "rel_adjoint_error"]


@dataclass
class Check:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_error <= self.tolerance)


def rel_adjoint_error(fwd, adj, x, y):
    """``|<K x, y> - <x, K^T y>|`` relative to the larger of the two."""
    a = float(np.vdot(fwd(x), y))
    b = float(np.vdot(x, adj(y)))
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)


@contextlib.contextmanager
def inject_scaling_fault(order=2):
    """Temporarily perturb one entry of the scaling matrix of ``order``.

    Lets the suite demonstrate that it catches a broken operator.
    """
    original = ops.scaling_matrix

    def faulty(k):
        M = original(k)
        if k != order:
            return M
        M = M.copy()
        M[1, 1] += 0.25
        M.setflags(write=False)
        return M

    ops.scaling_matrix = faulty
    try:
        yield
    finally:
        ops.scaling_matrix = original


def run_checks(seed=0, max_order=4, trials=10, shape=(6, 5)):
    """Run every check and return a list of :class:`Check`.

    Random data come from ``numpy.random.default_rng(seed)``, so the result
    is reproducible.
    """
    rng = np.random.default_rng(seed)
    npix = shape[0] * shape[1]
    checks = []

    def record(name, errors, tol):
        checks.append(Check(name, float(max(errors, default=0.0)), tol))

    eye_err = []
    for k in range(0, max(max_order, 8) + 1):
        M = ops.scaling_matrix(k)
        eye_err.append(np.max(np.abs(M.T @ M - np.eye(k + 2))))
    record("scaling orthonormal columns", eye_err, 1e-14)

    idem, selfadj, explicit, enum = [], [], [], []
    for k in range(1, max_order + 1):
        for _ in range(trials):
            P, Q = rng.standard_normal((2, npix, 1 << k))
            PP = ops.pi_project(P, k)
            idem.append(np.max(np.abs(ops.pi_project(PP, k) - PP)))
            selfadj.append(rel_adjoint_error(lambda x: ops.pi_project(x, k),
                                             lambda y: ops.pi_project(y, k), P, Q))
            if k <= min(max_order, 5):
                lit = ops.pi_project_explicit(P, k)
                rev = ops.pi_project_explicit(P, k, comb.enumerate_permutations(k)[::-1])
                explicit.append(np.max(np.abs(lit - PP)))
                enum.append(float(np.any(lit != rev)))
    record("projector idempotent", idem, 1e-14)
    record("projector self-adjoint", selfadj, 1e-12)
    record("projector equals permutation average", explicit, 1e-14)
    record("projector enumeration independent", enum, 0.0)

    adj = {name: [] for name in ("dx", "dy", "iterated derivative", "scaling",
                                 "compact sym derivative", "direct sym derivative",
                                 "forward convolution")}
    for _ in range(trials):
        x, y = rng.standard_normal((2, npix))
        adj["dx"].append(rel_adjoint_error(lambda v: go.dx(v, shape),
                                           lambda v: go.dx_adjoint(v, shape), x, y))
        adj["dy"].append(rel_adjoint_error(lambda v: go.dy(v, shape),
                                           lambda v: go.dy_adjoint(v, shape), x, y))
        kernel = rng.standard_normal((3, 3))
        K = ForwardOp.convolution(kernel)
        adj["forward convolution"].append(rel_adjoint_error(
            lambda v: K.apply(v, shape), lambda v: K.adjoint(v, shape), x, y))
        for k in range(0, max_order + 1):
            Y = rng.standard_normal((npix, k + 1))
            Z = rng.standard_normal((npix, 2 * k + 2))
            Q = rng.standard_normal((npix, k + 2))
            adj["iterated derivative"].append(rel_adjoint_error(
                lambda v: go.iterated_derivative(v, shape),
                lambda v: go.iterated_derivative_adjoint(v, shape), Y, Z))
            adj["scaling"].append(rel_adjoint_error(
                lambda v: ops.apply_scaling(v, k),
                lambda v: ops.apply_scaling_adjoint(v, k), Z, Q))
            adj["compact sym derivative"].append(rel_adjoint_error(
                lambda v: ops.compact_sym_derivative(v, k, shape),
                lambda v: ops.compact_sym_derivative_adjoint(v, k, shape), Y, Q))
            U = rng.standard_normal((npix, 1 << k))
            V = rng.standard_normal((npix, 1 << (k + 1)))
            adj["direct sym derivative"].append(rel_adjoint_error(
                lambda v: ops.direct_sym_derivative(v, k, shape),
                lambda v: ops.direct_sym_derivative_adjoint(v, k, shape), U, V))
    for name, errs in adj.items():
        record(f"adjoint {name}", errs, 1e-12)

    lemma, roundtrip, symmetric = [], [], []
    for k in range(0, max_order + 1):
        for _ in range(trials):
            p = rng.standard_normal((npix, k + 1))
            q = rng.standard_normal((npix, k + 2))
            lhs = mixed_norm(ops.compact_sym_derivative(p, k, shape) - q)
            lifted = ops.direct_sym_derivative(ops.lift_compact_to_direct(p, k), k, shape)
            rhs = mixed_norm(lifted - ops.lift_compact_to_direct(q, k + 1))
            lemma.append(abs(lhs - rhs) / lhs)
            u = ops.lift_compact_to_direct(p, k)
            roundtrip.append(np.max(np.abs(ops.project_direct_to_compact(u, k) - p)))
            symmetric.append(np.max(np.abs(ops.pi_project(lifted, k + 1) - lifted)))
    record("lifted cost equals compact cost", lemma, 1e-10)
    record("lift round trip", roundtrip, 1e-14)
    record("direct derivative keeps symmetry", symmetric, 1e-12)

    moreau = []
    for _ in range(trials):
        A = rng.standard_normal((npix, 3))
        alpha = float(rng.uniform(0.5, 2.0))
        moreau.append(np.max(np.abs(prox_mixed_norm(A, alpha)
                                    + project_rows_l2_ball(A, alpha) - A)))
    record("Moreau decomposition", moreau, 1e-14)
    return checks
