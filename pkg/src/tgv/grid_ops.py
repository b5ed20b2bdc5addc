"""Periodic forward differences on scanned images.

A scanned image of ``height x width`` pixels is a length-``N`` vector in
row-major order: pixel ``(r, c)`` sits at index ``r * width + c``.  A
coefficient matrix is an ``(N, m)`` array whose columns are scanned images
sharing one grid.  Every function here accepts either a single column of
shape ``(N,)`` or a matrix of shape ``(N, m)`` and acts column-wise.

``dx`` differences along the horizontal (column) direction, ``dy`` along the
vertical (row) direction; both wrap around, so they are BCCB matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

__all__ = [
    "Image",
    "dx",
    "dy",
    "dx_adjoint",
    "dy_adjoint",
    "iterated_derivative",
    "iterated_derivative_adjoint",
    "gradient_matrix",
]


@dataclass(frozen=True, eq=False)
class Image:
    """A grayscale image in scanned (row-major) form."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ArgumentError(f"invalid image size {self.width}x{self.height}")
        data = np.asarray(self.data, dtype=np.float64).reshape(-1)
        if data.size != self.width * self.height:
            raise ArgumentError(
                f"{data.size} samples for a {self.width}x{self.height} image")
        object.__setattr__(self, "data", data)

    @property
    def shape(self):
        """Grid shape as ``(height, width)``."""
        return (self.height, self.width)

    @property
    def size(self):
        return self.width * self.height

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ArgumentError(f"expected a 2-D array, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr.reshape(-1))

    def to_array(self):
        return self.data.reshape(self.height, self.width)

    def with_data(self, data):
        return Image(self.width, self.height, data)


def _grid(v, shape):
    v = np.asarray(v, dtype=np.float64)
    h, w = shape
    if v.shape[0] != h * w:
        raise ArgumentError(f"{v.shape[0]} pixels do not fit a {h}x{w} grid")
    return v.reshape((h, w) + v.shape[1:])


def _roll(v, shape, shift, axis):
    g = _grid(v, shape)
    return np.roll(g, shift, axis=axis).reshape(v.shape)


def dx(v, shape):
    """Forward difference along x: ``out(r, c) = in(r, c+1) - in(r, c)``."""
    v = np.asarray(v, dtype=np.float64)
    return _roll(v, shape, -1, 1) - v


def dy(v, shape):
    """Forward difference along y: ``out(r, c) = in(r+1, c) - in(r, c)``."""
    v = np.asarray(v, dtype=np.float64)
    return _roll(v, shape, -1, 0) - v


def dx_adjoint(v, shape):
    """Transpose of :func:`dx`: ``out(r, c) = in(r, c-1) - in(r, c)``."""
    v = np.asarray(v, dtype=np.float64)
    return _roll(v, shape, 1, 1) - v


def dy_adjoint(v, shape):
    """Transpose of :func:`dy`."""
    v = np.asarray(v, dtype=np.float64)
    return _roll(v, shape, 1, 0) - v


def _as_columns(Y):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        return Y[:, None]
    if Y.ndim != 2:
        raise ArgumentError(f"expected an (N, m) matrix, got shape {Y.shape}")
    return Y


def iterated_derivative(Y, shape):
    """Map ``[y_0, ..., y_m]`` to ``[Dx y_0, Dy y_0, ..., Dx y_m, Dy y_m]``.

    Parameters
    ----------
    Y : array, shape (N,) or (N, m+1)
        Coefficient matrix; a 1-D input is treated as a single column.
    shape : tuple of int
        Grid shape ``(height, width)``.

    Returns
    -------
    array, shape (N, 2m+2)
    """
    Y = _as_columns(Y)
    out = np.empty((Y.shape[0], 2 * Y.shape[1]))
    out[:, 0::2] = dx(Y, shape)
    out[:, 1::2] = dy(Y, shape)
    return out


def iterated_derivative_adjoint(Z, shape):
    """Transpose of :func:`iterated_derivative`."""
    Z = _as_columns(Z)
    if Z.shape[1] % 2:
        raise ArgumentError(f"odd column count {Z.shape[1]}")
    return dx_adjoint(Z[:, 0::2], shape) + dy_adjoint(Z[:, 1::2], shape)


def gradient_matrix(shape, axis):
    """Dense ``N x N`` matrix of ``dx`` (``axis='x'``) or ``dy`` (``axis='y'``).

    Only meant for small grids in checks.
    """
    n = shape[0] * shape[1]
    op = {"x": dx, "y": dy}[axis]
    return op(np.eye(n), shape)
