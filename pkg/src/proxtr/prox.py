"""Inexact proximity operators for weighted-l1 penalties under mass-matrix
metrics.

The proximity operator of ``phi`` at ``x`` with stepsize ``r`` minimizes
``|p - x|^2/(2r) + phi(p)``.  Under the primary metric M this has no closed
form, so we run the surrogate-metric proximal gradient iteration

    u_0 = prox_D(x),    u_{l+1} = prox_D(u_l - A^{-1}(u_l - x)),

where ``prox_D`` is componentwise soft thresholding and ``A^{-1} = D^{-1}M``
costs one matvec.  Stopping once the successive-iterate step
``|u_l - u_{l+1}|_D`` falls below ``step_tol`` certifies that the returned
point satisfies the prox optimality inequality up to an additive slack
``delta * |z - p|``; the certified slack is

    delta = step_tol * (1 + alpha2) / (r * sqrt(alpha1)).

Conversely :func:`step_tol_for_slack` maps a requested slack to the stopping
tolerance that certifies it, and :func:`prox_error_bound` converts the
stopping tolerance into a distance bound from the exact prox (valid for
``alpha1`` in ``(1/sqrt(2), sqrt(2)]``; the engine rescales the surrogate
diagonal to restore that range when violated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spaces import WeightedSpace
from .tridiag import _frozen_array

#: alpha1 range on which the contraction error bound is valid.
_ALPHA1_LO = 1.0 / math.sqrt(2.0)
_ALPHA1_HI = math.sqrt(2.0)


class ProxConvergenceError(RuntimeError):
    """Inner prox iteration hit its cap; carries the best iterate."""

    def __init__(self, message: str, best: "ProxResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class WeightedL1:
    """Separable penalty ``phi(z) = beta * sum_i weights[i] * |z[i]|``."""

    weights: np.ndarray
    beta: float

    def __post_init__(self):
        w = _frozen_array(self.weights, "weights")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if self.beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    def value(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n,):
            raise ValueError(f"vector has shape {z.shape}, expected ({self.n},)")
        return float(self.beta * np.sum(self.weights * np.abs(z)))

    def prox_diag(self, d: np.ndarray, x: np.ndarray, r: float) -> np.ndarray:
        """Exact prox under the diagonal metric ``d``: componentwise soft
        thresholding at ``r * beta * weights / d``."""
        d = np.asarray(d, dtype=float)
        x = np.asarray(x, dtype=float)
        if r <= 0.0:
            raise ValueError(f"stepsize must be positive, got {r}")
        if np.any(d <= 0.0):
            raise ValueError("metric diagonal must be strictly positive")
        if x.shape != (self.n,) or d.shape != (self.n,):
            raise ValueError("dimension mismatch in prox_diag")
        thresh = r * self.beta * self.weights / d
        return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)


@dataclass(frozen=True)
class ProxResult:
    """Output of :func:`weighted_prox_gradient`.

    ``iterations`` is the count of completed update passes before the stop
    (0 if the very first update already met the tolerance).
    ``last_step_norm`` is measured in the surrogate norm the iteration ran
    in; on success it does not exceed ``step_tol``.  ``slack_certified``
    equals ``step_tol * (1 + alpha2) / (r * sqrt(alpha1))`` for the
    effective constants of that metric.
    """

    u: np.ndarray
    iterations: int
    last_step_norm: float
    step_tol: float
    slack_certified: float


def effective_metric(space: WeightedSpace) -> tuple[np.ndarray, float, float]:
    """Surrogate diagonal and constants actually used by the inner iteration.

    When ``alpha1`` lies outside ``(1/sqrt(2), sqrt(2)]`` the diagonal is
    rescaled by ``1/alpha1``, which maps the constants to
    ``(1, alpha2/alpha1)`` and restores validity of the error bound.
    """
    if _ALPHA1_LO < space.alpha1 <= _ALPHA1_HI:
        return space.d, space.alpha1, space.alpha2
    return space.d / space.alpha1, 1.0, space.alpha2 / space.alpha1


def step_tol_for_slack(r: float, slack: float, alpha1: float, alpha2: float) -> float:
    """Stopping tolerance certifying the requested prox slack:
    ``r * slack * sqrt(alpha1) / (1 + alpha2)``."""
    if r <= 0.0:
        raise ValueError(f"stepsize must be positive, got {r}")
    if slack < 0.0:
        raise ValueError(f"slack must be nonnegative, got {slack}")
    if not (0.0 < alpha1 <= alpha2):
        raise ValueError(f"need 0 < alpha1 <= alpha2, got ({alpha1}, {alpha2})")
    return r * slack * math.sqrt(alpha1) / (1.0 + alpha2)


def prox_error_bound(step_tol: float, alpha1: float) -> float:
    """Distance bound (primary norm) from the exact prox at exit:
    ``alpha1^{-1/2} (1 - alpha1^{-2}/2)^{-1} * step_tol``.

    Valid only for ``alpha1`` in ``(1/sqrt(2), sqrt(2)]``.
    """
    if step_tol < 0.0:
        raise ValueError(f"step_tol must be nonnegative, got {step_tol}")
    if not (_ALPHA1_LO < alpha1 <= _ALPHA1_HI):
        raise ValueError(
            f"error bound requires alpha1 in (1/sqrt(2), sqrt(2)], got {alpha1}"
        )
    return step_tol / (math.sqrt(alpha1) * (1.0 - 0.5 / alpha1**2))


def weighted_prox_gradient(
    space: WeightedSpace,
    phi: WeightedL1,
    x: np.ndarray,
    r: float,
    step_tol: float,
    max_iters: int = 10000,
) -> ProxResult:
    """Approximate the primary-metric prox of ``phi`` at ``x`` by the
    surrogate-metric proximal gradient iteration.

    Returns the last computed iterate (the one the stopping certificate
    applies to).  Raises :class:`ProxConvergenceError` carrying the best
    iterate if ``max_iters`` passes do not meet ``step_tol``.
    """
    x = np.asarray(x, dtype=float)
    if r <= 0.0:
        raise ValueError(f"stepsize must be positive, got {r}")
    if step_tol <= 0.0:
        raise ValueError(f"step_tol must be positive, got {step_tol}")
    d_eff, a1_eff, a2_eff = effective_metric(space)
    certified = step_tol * (1.0 + a2_eff) / (r * math.sqrt(a1_eff))

    def norm_eff(v: np.ndarray) -> float:
        return math.sqrt(max(float(np.sum(v * d_eff * v)), 0.0))

    u_prev = phi.prox_diag(d_eff, x, r)
    iterations = 0
    while True:
        u = phi.prox_diag(d_eff, u_prev - space.apply_a_inverse(u_prev - x), r)
        step = norm_eff(u_prev - u)
        if step <= step_tol:
            return ProxResult(
                u=u,
                iterations=iterations,
                last_step_norm=step,
                step_tol=step_tol,
                slack_certified=certified,
            )
        iterations += 1
        if iterations >= max_iters:
            best = ProxResult(
                u=u,
                iterations=iterations,
                last_step_norm=step,
                step_tol=step_tol,
                slack_certified=step * (1.0 + a2_eff) / (r * math.sqrt(a1_eff)),
            )
            raise ProxConvergenceError(
                f"prox iteration did not reach step tolerance {step_tol:g} in "
                f"{max_iters} iterations (last step {step:g})",
                best,
            )
        u_prev = u


def _prox_objective(
    space: WeightedSpace, phi: WeightedL1, x: np.ndarray, r: float, z: np.ndarray
) -> float:
    diff = z - x
    return 0.5 / r * space.inner(diff, diff) + phi.value(z)


def check_inexact_prox(
    space: WeightedSpace,
    phi: WeightedL1,
    x: np.ndarray,
    r: float,
    slack: float,
    u: np.ndarray,
    sample_count: int = 50,
    seed: int = 0,
) -> tuple[bool, float]:
    """Empirically test the slack-``delta`` prox inequality at ``u``.

    Candidate comparison points are a tightly solved reference prox, ``x``
    itself, the origin, coordinate perturbations of ``u``, and
    ``sample_count`` random points.  Returns ``(holds, worst_violation)``
    where ``holds`` allows a ``1e-12``-scale slack and the violation is the
    largest signed excess of the left-hand side over the right.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if r <= 0.0:
        raise ValueError(f"stepsize must be positive, got {r}")
    if slack < 0.0:
        raise ValueError(f"slack must be nonnegative, got {slack}")
    rng = np.random.default_rng(seed)

    scale = max(1.0, float(np.max(np.abs(u))), float(np.max(np.abs(x))))
    candidates = [x, np.zeros_like(x)]
    try:
        tight = weighted_prox_gradient(
            space, phi, x, r, step_tol=max(1e-14, 1e-14 * scale), max_iters=200000
        )
        candidates.append(tight.u)
    except ProxConvergenceError as err:  # reference is only a test point
        candidates.append(err.best.u)
    for i in range(u.size):
        for mag in (0.1 * scale, 1e-3 * scale):
            e = np.zeros_like(u)
            e[i] = mag
            candidates.append(u + e)
            candidates.append(u - e)
    for _ in range(sample_count):
        candidates.append(u + scale * rng.standard_normal(u.size))

    lhs = _prox_objective(space, phi, x, r, u)
    worst = -math.inf
    for z in candidates:
        rhs = _prox_objective(space, phi, x, r, z) + slack * space.norm(z - u)
        worst = max(worst, lhs - rhs)
    tol = 1e-12 * max(1.0, abs(lhs))
    return worst <= tol, worst


def subgradient_residual(
    space: WeightedSpace,
    phi: WeightedL1,
    x: np.ndarray,
    r: float,
    u_prev: np.ndarray,
    u: np.ndarray,
) -> float:
    """Distance of the iteration's implicit subgradient certificate from the
    weighted-l1 subdifferential at ``u``.

    For consecutive inner iterates the candidate
    ``s = (A - I)(u_prev - u)/r - (u - x)/r`` lies in the subdifferential of
    ``phi`` exactly; pairing through M turns that into the componentwise box
    ``|.| <= beta * w_i`` with an equality sign condition where ``u_i != 0``.
    Returns the worst componentwise distance (0 when the inclusion holds).
    """
    x = np.asarray(x, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    u = np.asarray(u, dtype=float)
    if not (x.shape == u_prev.shape == u.shape == (space.n,)):
        raise ValueError("dimension mismatch in subgradient_residual")
    # M s = [D(u_prev - u) - M(u_prev - x)]/r computes the paired certificate
    # without a linear solve.
    paired = (space.d * (u_prev - u) - space.m.apply(u_prev - x)) / r
    bound = phi.beta * phi.weights
    dist = np.where(
        u != 0.0,
        np.abs(paired - np.sign(u) * bound),
        np.maximum(np.abs(paired) - bound, 0.0),
    )
    return float(np.max(dist)) if dist.size else 0.0
