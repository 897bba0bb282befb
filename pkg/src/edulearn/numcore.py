"""Minimal dense linear algebra used by every other module.

Vectors and matrices are immutable wrappers around float64 numpy arrays.
Construction validates dimensionality and finiteness, so downstream code can
assume well-formed values after any public operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError, SingularMatrixError

__all__ = [
    "DenseVector",
    "DenseMatrix",
    "as_vector",
    "as_matrix",
    "dot",
    "matvec",
    "solve_spd",
]


def _validated(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise DimensionError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DenseVector:
    """Ordered sequence of 64-bit floats; immutable after construction."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, 1, "vector"))

    def __len__(self) -> int:
        return self.values.shape[0]

    def to_list(self) -> list[float]:
        return [float(v) for v in self.values]


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Row-major dense matrix of 64-bit floats; immutable after construction."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, 2, "matrix"))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def row_major(self) -> list[float]:
        """Entries flattened in row-major order."""
        return [float(v) for v in self.values.ravel(order="C")]


def as_vector(x) -> np.ndarray:
    """Normalize a DenseVector or 1-D array-like to a float64 ndarray."""
    if isinstance(x, DenseVector):
        return x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    return arr


def as_matrix(x) -> np.ndarray:
    """Normalize a DenseMatrix or 2-D array-like to a float64 ndarray."""
    if isinstance(x, DenseMatrix):
        return x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    return arr


def dot(a, b) -> float:
    """Inner product of two equal-length vectors."""
    av, bv = as_vector(a), as_vector(b)
    if av.shape[0] != bv.shape[0]:
        raise DimensionError(f"dot: lengths differ ({av.shape[0]} vs {bv.shape[0]})")
    return float(av @ bv)


def matvec(a, x) -> DenseVector:
    """Matrix-vector product A @ x."""
    am, xv = as_matrix(a), as_vector(x)
    if am.shape[1] != xv.shape[0]:
        raise DimensionError(f"matvec: {am.shape[0]}x{am.shape[1]} matrix with length-{xv.shape[0]} vector")
    return DenseVector(am @ xv)


def _cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises SingularMatrixError at the first bad pivot.

    Only the lower triangle of ``a`` is read; symmetry is the caller's
    responsibility per the solve_spd contract.
    """
    n = a.shape[0]
    lower = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not np.isfinite(d) or d <= 0.0:
            raise SingularMatrixError(
                f"matrix is not positive definite: pivot {j} is {d:.6e}", pivot=j
            )
        ljj = math.sqrt(d)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return lower


def solve_spd(a, b) -> DenseVector:
    """Solve A x = b for symmetric positive definite A via Cholesky."""
    am, bv = as_matrix(a), as_vector(b)
    if am.shape[0] != am.shape[1]:
        raise DimensionError(f"solve_spd: matrix is {am.shape[0]}x{am.shape[1]}, not square")
    if am.shape[0] != bv.shape[0]:
        raise DimensionError(
            f"solve_spd: matrix order {am.shape[0]} but right-hand side length {bv.shape[0]}"
        )
    lower = _cholesky_lower(am)
    n = am.shape[0]
    # forward substitution L y = b
    y = np.zeros(n)
    for i in range(n):
        y[i] = (bv[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    # back substitution L^T x = y
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return DenseVector(x)
