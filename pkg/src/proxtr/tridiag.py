"""Tridiagonal matrices: symmetric SPD storage, Thomas solves, P1 mass assembly.

The symmetric type stores a single off-diagonal array and factors via the
symmetric LDL^T recurrence, so positive definiteness is certified by pivot
positivity during the solve.  The general (nonsymmetric) type backs PDE
Jacobians and delegates its solves to LAPACK's banded LU.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


def _frozen_array(values, name: str) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    if out.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TridiagMatrix:
    """Symmetric tridiagonal matrix with main diagonal ``diag`` and
    sub/super-diagonal ``off`` (shared by symmetry).

    Instances are immutable; the LDL^T factorization is computed lazily on
    the first solve and cached.
    """

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = _frozen_array(self.diag, "diag")
        off = _frozen_array(self.off, "off")
        if diag.size < 1:
            raise ValueError("matrix dimension must be at least 1")
        if off.size != diag.size - 1:
            raise ValueError(
                f"off-diagonal has length {off.size}, expected {diag.size - 1}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)
        object.__setattr__(self, "_ldl", None)

    @property
    def n(self) -> int:
        return self.diag.size

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix-vector product ``M v``."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.n},)")
        out = self.diag * v
        if self.n > 1:
            out[:-1] += self.off * v[1:]
            out[1:] += self.off * v[:-1]
        return out

    def row_sums(self) -> np.ndarray:
        return self.apply(np.ones(self.n))

    def _factorize(self):
        """Symmetric LDL^T pivots; raises if any pivot is not positive."""
        if self._ldl is not None:
            return self._ldl
        piv = np.empty(self.n)
        low = np.empty(max(self.n - 1, 0))
        piv[0] = self.diag[0]
        for i in range(self.n - 1):
            if piv[i] <= 0.0:
                raise np.linalg.LinAlgError(
                    f"non-positive pivot {piv[i]!r} at index {i}: matrix is not SPD"
                )
            low[i] = self.off[i] / piv[i]
            piv[i + 1] = self.diag[i + 1] - self.off[i] * low[i]
        if piv[-1] <= 0.0:
            raise np.linalg.LinAlgError(
                f"non-positive pivot {piv[-1]!r} at index {self.n - 1}: matrix is not SPD"
            )
        object.__setattr__(self, "_ldl", (low, piv))
        return low, piv

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Thomas solve of ``M x = rhs`` in O(n); requires SPD."""
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise ValueError(f"rhs has shape {rhs.shape}, expected ({self.n},)")
        low, piv = self._factorize()
        x = rhs.copy()
        for i in range(self.n - 1):
            x[i + 1] -= low[i] * x[i]
        x /= piv
        for i in range(self.n - 2, -1, -1):
            x[i] -= low[i] * x[i + 1]
        return x


@dataclass(frozen=True)
class GeneralTridiagMatrix:
    """Nonsymmetric tridiagonal matrix (PDE Jacobians).

    ``lower[i]`` couples row ``i+1`` to column ``i``; ``upper[i]`` couples row
    ``i`` to column ``i+1``.  Solves use LAPACK's pivoted banded LU.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen_array(self.lower, "lower")
        diag = _frozen_array(self.diag, "diag")
        upper = _frozen_array(self.upper, "upper")
        if diag.size < 1:
            raise ValueError("matrix dimension must be at least 1")
        if lower.size != diag.size - 1 or upper.size != diag.size - 1:
            raise ValueError("lower/upper diagonals must have length n-1")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return self.diag.size

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.n},)")
        out = self.diag * v
        if self.n > 1:
            out[:-1] += self.upper * v[1:]
            out[1:] += self.lower * v[:-1]
        return out

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.n},)")
        out = self.diag * v
        if self.n > 1:
            out[:-1] += self.lower * v[1:]
            out[1:] += self.upper * v[:-1]
        return out

    def _bands(self, transpose: bool) -> np.ndarray:
        ab = np.zeros((3, self.n))
        up = self.lower if transpose else self.upper
        lo = self.upper if transpose else self.lower
        ab[0, 1:] = up
        ab[1, :] = self.diag
        ab[2, :-1] = lo
        return ab

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return solve_banded((1, 1), self._bands(transpose=False), np.asarray(rhs, dtype=float))

    def solve_transpose(self, rhs: np.ndarray) -> np.ndarray:
        return solve_banded((1, 1), self._bands(transpose=True), np.asarray(rhs, dtype=float))


def assemble_mass(n_dof: int, h: float) -> TridiagMatrix:
    """Consistent P1 mass matrix on the interior nodes of a uniform mesh.

    Diagonal entries are ``4h/6`` (including the first and last rows, which
    correspond to the interior-node pattern after eliminating Dirichlet
    nodes) and off-diagonal entries are ``h/6``.
    """
    if n_dof < 1:
        raise ValueError(f"n_dof must be at least 1, got {n_dof}")
    if h <= 0.0:
        raise ValueError(f"mesh width must be positive, got {h}")
    diag = np.full(n_dof, 4.0 * h / 6.0)
    off = np.full(max(n_dof - 1, 0), h / 6.0)
    return TridiagMatrix(diag, off)


def lump(m: TridiagMatrix) -> np.ndarray:
    """Row-sum lumping of a tridiagonal matrix into a positive diagonal.

    For the interior-node P1 mass matrix this gives ``h`` on interior rows
    and ``5h/6`` on the two end rows.
    """
    sums = m.row_sums()
    if np.any(sums <= 0.0):
        bad = int(np.argmin(sums))
        raise ValueError(
            f"row {bad} sums to {sums[bad]!r}; lumping requires positive row sums"
        )
    return sums
