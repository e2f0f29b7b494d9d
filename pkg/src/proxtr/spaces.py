"""Weighted inner-product spaces: a primary metric M, a diagonal surrogate
metric D, and the spectral equivalence constants relating them.

The surrogate metric exists so that separable nonsmooth terms keep an
analytic proximity operator; the constants ``alpha1 <= alpha2`` certify
``alpha1 * x'Mx <= x'Dx <= alpha2 * x'Mx`` and drive every accuracy bound in
the inexact-prox machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tridiag import TridiagMatrix, _frozen_array

#: Outward relative margin applied to the estimated spectral bounds so that
#: the equivalence inequality holds despite iteration truncation error.
SPECTRAL_MARGIN = 0.005


@dataclass(frozen=True)
class WeightedSpace:
    """R^n with primary inner product ``<x,y> = x'My`` and surrogate
    diagonal inner product ``x'Dy``.

    ``alpha1``/``alpha2`` must satisfy ``alpha1 x'Mx <= x'Dx <= alpha2 x'Mx``;
    use :func:`estimate_spectral_bounds` (or :meth:`from_matrices`) to obtain
    certified values.
    """

    m: TridiagMatrix
    d: np.ndarray
    alpha1: float
    alpha2: float

    def __post_init__(self):
        d = _frozen_array(self.d, "d")
        if d.size != self.m.n:
            raise ValueError(f"diagonal has length {d.size}, expected {self.m.n}")
        if np.any(d <= 0.0):
            raise ValueError("surrogate diagonal must be strictly positive")
        if not (0.0 < self.alpha1 <= self.alpha2):
            raise ValueError(
                f"need 0 < alpha1 <= alpha2, got ({self.alpha1}, {self.alpha2})"
            )
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrices(
        cls, m: TridiagMatrix, d: np.ndarray, max_iters: int = 5000, seed: int = 0
    ) -> "WeightedSpace":
        a1, a2 = estimate_spectral_bounds(m, d, max_iters=max_iters, seed=seed)
        return cls(m, d, a1, a2)

    @property
    def n(self) -> int:
        return self.m.n

    def _check_pair(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.n,) or y.shape != (self.n,):
            raise ValueError(
                f"vectors have shapes {x.shape}, {y.shape}; expected ({self.n},)"
            )
        return x, y

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        """Primary inner product ``x'My`` (evaluated symmetrically so that
        swapping the arguments gives the bitwise-identical result)."""
        x, y = self._check_pair(x, y)
        total = float(np.sum(self.m.diag * x * y))
        if self.n > 1:
            total += float(np.sum(self.m.off * (x[:-1] * y[1:] + x[1:] * y[:-1])))
        return total

    def inner_d(self, x: np.ndarray, y: np.ndarray) -> float:
        """Surrogate inner product ``x'Dy``."""
        x, y = self._check_pair(x, y)
        return float(np.sum(x * self.d * y))

    def norm(self, x: np.ndarray) -> float:
        return np.sqrt(max(self.inner(x, x), 0.0))

    def norm_d(self, x: np.ndarray) -> float:
        return np.sqrt(max(self.inner_d(x, x), 0.0))

    def apply_a(self, v: np.ndarray) -> np.ndarray:
        """Action of ``A = M^{-1} D`` (one tridiagonal solve)."""
        v = np.asarray(v, dtype=float)
        return self.m.solve(self.d * v)

    def apply_a_inverse(self, v: np.ndarray) -> np.ndarray:
        """Action of ``A^{-1} = D^{-1} M`` (no linear solve)."""
        v = np.asarray(v, dtype=float)
        return self.m.apply(v) / self.d


def _pencil_rayleigh(m: TridiagMatrix, d: np.ndarray, v: np.ndarray) -> float:
    return float((v * d) @ v) / float(v @ m.apply(v))


def estimate_spectral_bounds(
    m: TridiagMatrix,
    d: np.ndarray,
    max_iters: int = 5000,
    seed: int = 0,
    rel_tol: float = 1e-6,
    margin: float = SPECTRAL_MARGIN,
) -> tuple[float, float]:
    """Estimate the extreme generalized Rayleigh quotients ``x'Dx / x'Mx``.

    The maximum comes from power iteration on ``M^{-1}D`` and the minimum
    from power iteration on the inverse ``D^{-1}M``; each runs until the
    Rayleigh quotient stabilizes to ``rel_tol`` or ``max_iters`` is reached.
    The estimates are pushed outward by ``margin`` (lower bound down, upper
    bound up) so the returned pair certifies the equivalence inequality.
    """
    d = np.asarray(d, dtype=float)
    if d.size != m.n:
        raise ValueError(f"diagonal has length {d.size}, expected {m.n}")
    if np.any(d <= 0.0):
        raise ValueError("diagonal must be strictly positive")
    rng = np.random.default_rng(seed)

    def dominant(step, start):
        v = start / np.linalg.norm(start)
        rq = _pencil_rayleigh(m, d, v)
        for _ in range(max_iters):
            v = step(v)
            v /= np.linalg.norm(v)
            rq_new = _pencil_rayleigh(m, d, v)
            done = abs(rq_new - rq) <= rel_tol * abs(rq_new)
            rq = rq_new
            if done:
                return rq
        raise np.linalg.LinAlgError(
            f"spectral bound estimation did not stabilize in {max_iters} iterations"
        )

    start = rng.standard_normal(m.n)
    # max of the pencil: iterate with A = M^{-1} D
    rq_max = dominant(lambda v: m.solve(d * v), start)
    # min of the pencil: iterate with A^{-1} = D^{-1} M
    rq_min = dominant(lambda v: m.apply(v) / d, start)
    return rq_min * (1.0 - margin), rq_max * (1.0 + margin)
