"""Symmetrization, scaling and symmetric-derivative operators.

Two coefficient layouts are used for an order-``k`` symmetric tensor field
on ``N`` pixels:

* compact: ``(N, k+1)``, column ``r`` holds the coefficient of the
  orthonormal symmetric basis element with ``r`` "y" slots;
* direct: ``(N, 2**k)``, column ``j`` holds the coefficient of the standard
  basis element whose slot pattern is the ``k``-bit code of ``j``
  (bit 0 = x, bit 1 = y).

:func:`lift_compact_to_direct` and :func:`project_direct_to_compact` convert
between them; the lift is an isometry for the mixed norm.
"""

import math
from functools import lru_cache

import numpy as np

from . import combinatorics as comb
from .errors import ArgumentError, ConsistencyError
from .grid_ops import iterated_derivative, iterated_derivative_adjoint

__all__ = [
    "pi_project",
    "pi_project_explicit",
    "is_symmetric",
    "scaling_matrix",
    "apply_scaling",
    "apply_scaling_adjoint",
    "compact_sym_derivative",
    "compact_sym_derivative_adjoint",
    "direct_sym_derivative",
    "direct_sym_derivative_adjoint",
    "lift_compact_to_direct",
    "project_direct_to_compact",
    "SYMMETRY_TOL",
]

SYMMETRY_TOL = 1e-10


def _check_cols(P, ncols, what):
    P = np.asarray(P, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or P.shape[1] != ncols:
        raise ArgumentError(f"{what} needs {ncols} columns, got shape {P.shape}")
    return P


def pi_project(P, k):
    """Orthogonal projection onto symmetric direct fields of order ``k``.

    Column ``j`` of the result is the mean of the columns of ``P`` over the
    orbit of ``j`` (all codes with the same number of ones).  This equals the
    average over the ``k!`` permuted indices, because every orbit element
    occurs equally often in that list.
    """
    P = _check_cols(P, 1 << k, f"order-{k} projection")
    if k <= _DENSE_MIX_MAX_ORDER:
        return P @ _mixing_matrix(k)
    out = np.empty_like(P)
    for group in comb.orbit_groups(k):
        idx = np.array(group)
        out[:, idx] = P[:, idx].mean(axis=1, keepdims=True)
    return out


# Above this order the 2**k x 2**k mixing matrix gets too large to cache.
_DENSE_MIX_MAX_ORDER = 8


@lru_cache(maxsize=None)
def _mixing_matrix(k):
    """Symmetric matrix with entry 1/|orbit| for column pairs in one orbit."""
    mix = np.zeros((1 << k, 1 << k))
    for group in comb.orbit_groups(k):
        idx = np.array(group)
        mix[np.ix_(idx, idx)] = 1.0 / len(group)
    mix.setflags(write=False)
    return mix


def pi_project_explicit(P, k, perms=None):
    """Literal k!-term average over the symmetric index vectors.

    ``perms`` fixes the enumeration of S_k.  Gathered values are sorted
    before summing so the result does not depend on that enumeration, bit
    for bit.  Cost grows like ``k!``; intended for checks at small ``k``.
    """
    P = _check_cols(P, 1 << k, f"order-{k} projection")
    if k == 0:
        return P.copy()
    if perms is None:
        perms = comb.enumerate_permutations(k)
    nperm = len(perms)
    out = np.empty_like(P)
    for j in range(1 << k):
        t = comb.sym_index_vector(j, k, perms)
        out[:, j] = np.sort(P[:, t], axis=1).sum(axis=1) / nperm
    return out


def orbit_spread(u, k):
    """Largest deviation of orbit columns from their orbit mean."""
    u = _check_cols(u, 1 << k, f"order-{k} direct field")
    return float(np.max(np.abs(u - pi_project(u, k)), initial=0.0))


def is_symmetric(u, k, tol=SYMMETRY_TOL):
    """True when ``u`` is fixed by :func:`pi_project` up to ``tol`` (relative)."""
    u = np.asarray(u, dtype=np.float64)
    scale = max(float(np.max(np.abs(u), initial=0.0)), 1.0)
    return orbit_spread(u, k) <= tol * scale


@lru_cache(maxsize=None)
def scaling_matrix(k):
    """The ``(2k+2, k+2)`` matrix merging interleaved derivatives.

    Input row ``2r`` carries ``Dx y_r`` and row ``2r+1`` carries ``Dy y_r``.
    Output column ``r`` collects ``Dx y_r`` with weight
    ``sqrt(C(k,r) / C(k+1,r))`` and ``Dy y_{r-1}`` with weight
    ``sqrt(C(k,r-1) / C(k+1,r))``.  The columns are orthonormal.

    The returned array is read-only and shared between calls.
    """
    if k < 0:
        raise ArgumentError(f"order must be non-negative, got {k}")
    M = np.zeros((2 * k + 2, k + 2))
    for r in range(k + 2):
        denom = comb.binom(k + 1, r)
        if r <= k:
            M[2 * r, r] = math.sqrt(comb.binom(k, r) / denom)
        if r >= 1:
            M[2 * r - 1, r] = math.sqrt(comb.binom(k, r - 1) / denom)
    M.setflags(write=False)
    return M


def apply_scaling(Z, k):
    Z = _check_cols(Z, 2 * k + 2, f"order-{k} scaling")
    return Z @ scaling_matrix(k)


def apply_scaling_adjoint(Q, k):
    Q = _check_cols(Q, k + 2, f"order-{k} scaling adjoint")
    return Q @ scaling_matrix(k).T


def compact_sym_derivative(p, k, shape):
    """Symmetric derivative of a compact order-``k`` field, shape (N, k+2)."""
    p = _check_cols(p, k + 1, f"order-{k} compact field")
    return apply_scaling(iterated_derivative(p, shape), k)


def compact_sym_derivative_adjoint(q, k, shape):
    q = _check_cols(q, k + 2, f"order-{k + 1} compact field")
    return iterated_derivative_adjoint(apply_scaling_adjoint(q, k), shape)


def direct_sym_derivative(u, k, shape):
    """Symmetric derivative of a direct order-``k`` field, shape (N, 2**(k+1)).

    Derivative column ``2j`` (``Dx``) has code ``(b(j), 0)`` and column
    ``2j+1`` (``Dy``) has code ``(b(j), 1)``, so the interleaved layout of
    :func:`~tgv.grid_ops.iterated_derivative` is already the order-``k+1``
    standard layout.
    """
    u = _check_cols(u, 1 << k, f"order-{k} direct field")
    return pi_project(iterated_derivative(u, shape), k + 1)


def direct_sym_derivative_adjoint(v, k, shape):
    v = _check_cols(v, 1 << (k + 1), f"order-{k + 1} direct field")
    return iterated_derivative_adjoint(pi_project(v, k + 1), shape)


def _lift_weights(k):
    return np.array([1.0 / math.sqrt(comb.binom(k, bin(j).count("1")))
                     for j in range(1 << k)])


def lift_compact_to_direct(p, k):
    """Direct field with column ``j`` = ``p[:, s] / sqrt(C(k, s))``, ``s`` = bit sum of ``j``."""
    p = _check_cols(p, k + 1, f"order-{k} compact field")
    sums = [bin(j).count("1") for j in range(1 << k)]
    return p[:, sums] * _lift_weights(k)


def project_direct_to_compact(u, k, tol=SYMMETRY_TOL):
    """Inverse of the lift on symmetric direct fields.

    Orbit columns are averaged before rescaling.  Raises
    :class:`ConsistencyError` when the orbit spread exceeds ``tol`` relative
    to the largest entry of ``u``.
    """
    u = _check_cols(u, 1 << k, f"order-{k} direct field")
    if not is_symmetric(u, k, tol):
        raise ConsistencyError(
            f"direct field is not symmetric (orbit spread {orbit_spread(u, k):.3e})")
    out = np.empty((u.shape[0], k + 1))
    for r, group in enumerate(comb.orbit_groups(k)):
        out[:, r] = math.sqrt(comb.binom(k, r)) * u[:, list(group)].mean(axis=1)
    return out
