"""The mixed l1/l2 norm over matrix rows and its proximal maps."""

import numpy as np

from .errors import ArgumentError

__all__ = ["mixed_norm", "prox_mixed_norm", "project_rows_l2_ball", "row_norms"]


def _rows(M):
    M = np.asarray(M, dtype=np.float64)
    return M[:, None] if M.ndim == 1 else M


def row_norms(M):
    return np.sqrt(np.sum(_rows(M) ** 2, axis=1))


def mixed_norm(M):
    """Sum over rows of the row Euclidean norms.

    A 1-D input is read as a single column.
    """
    return float(np.sum(row_norms(M)))


def prox_mixed_norm(A, lam=1.0):
    """Row-wise block soft thresholding.

    Solves ``argmin_B lam * mixed_norm(B) + 0.5 * ||B - A||_F**2``; each row
    is scaled by ``max(0, 1 - lam / ||row||)`` and zero rows stay zero.
    """
    if lam < 0:
        raise ArgumentError(f"prox parameter must be non-negative, got {lam}")
    A = _rows(A)
    norms = row_norms(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > lam, 1.0 - lam / norms, 0.0)
    if lam == 0:
        scale = np.ones_like(norms)
    return A * scale[:, None]


def project_rows_l2_ball(A, alpha):
    """Project every row onto the Euclidean ball of radius ``alpha``.

    This is the prox of the convex conjugate of ``alpha * mixed_norm``.
    """
    if not alpha > 0:
        raise ArgumentError(f"ball radius must be positive, got {alpha}")
    A = _rows(A)
    norms = row_norms(A)
    return A / np.maximum(1.0, norms / alpha)[:, None]
