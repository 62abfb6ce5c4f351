"""Derivative-free minimization shared by the likelihood and score-loss fits.

A plain Nelder-Mead simplex with multiple jittered restarts.  Model fits
optimize over unconstrained coordinates; bijective transforms (log for
positivity, logistic for intervals, ordered differences for chained
inequalities) map those coordinates onto the constrained parameter space, so
the simplex itself never sees an infeasible point.  Objectives signal
numerically invalid points by returning ``inf`` rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, OptimizationError

__all__ = ["ObjectiveSpec", "OptimResult", "minimize"]

# Standard simplex coefficients: reflect, expand, contract, shrink.
_REFLECT = 1.0
_EXPAND = 2.0
_CONTRACT = 0.5
_SHRINK = 0.5

#: Edge length of the initial simplex in unconstrained coordinates.
INITIAL_EDGE = 0.1

#: Simplex value spread below which a restart counts as converged.
VALUE_SPREAD_TOL = 1e-9

#: The simplex must also collapse geometrically before declaring convergence;
#: a value-spread check alone stops early on simplexes that straddle a
#: minimum symmetrically (equal values, wrong point).
X_DIAMETER_TOL = 1e-7

#: Standard deviation of the restart jitter in unconstrained coordinates.
JITTER_SCALE = 0.5


@dataclass(frozen=True)
class ObjectiveSpec:
    """Everything `minimize` needs to know about one fitting problem."""

    dimension: int
    evaluate: Callable[[np.ndarray], float]
    transform: Callable[[np.ndarray], object]
    x0: np.ndarray = field(repr=False)
    budget: int = 2000
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError("objective dimension must be at least 1")
        if self.budget < 50 * self.dimension:
            raise InvalidInputError("evaluation budget must be at least 50 per dimension")
        if self.restarts < 1:
            raise InvalidInputError("need at least one restart")
        x0 = np.asarray(self.x0, dtype=float).copy()
        if x0.shape != (self.dimension,):
            raise InvalidInputError("x0 must be a vector of length `dimension`")
        x0.flags.writeable = False
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class OptimResult:
    best_point: object
    best_value: float
    best_x: np.ndarray = field(repr=False)
    evaluations_used: int
    converged: bool
    restart_values: tuple[float, ...]


def _safe_eval(fn: Callable[[np.ndarray], float], x: np.ndarray) -> float:
    value = fn(x)
    if value is None or math.isnan(value):
        return math.inf
    return float(value)


def _nelder_mead(
    fn: Callable[[np.ndarray], float], x0: np.ndarray, budget: int
) -> tuple[np.ndarray, float, int, bool]:
    """One simplex descent; returns (best_x, best_f, evaluations, converged)."""
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += INITIAL_EDGE
    values = np.empty(n + 1)
    evals = 0
    for i in range(n + 1):
        values[i] = _safe_eval(fn, simplex[i])
        evals += 1

    converged = False
    while evals < budget:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if (
            np.isfinite(values[-1])
            and values[-1] - values[0] < VALUE_SPREAD_TOL
            and diameter < X_DIAMETER_TOL
        ):
            converged = True
            break

        centroid = simplex[:-1].mean(axis=0)
        reflected = centroid + _REFLECT * (centroid - simplex[-1])
        f_reflected = _safe_eval(fn, reflected)
        evals += 1

        if f_reflected < values[0]:
            expanded = centroid + _EXPAND * (reflected - centroid)
            f_expanded = _safe_eval(fn, expanded)
            evals += 1
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + _CONTRACT * (reflected - centroid)
            else:
                contracted = centroid + _CONTRACT * (simplex[-1] - centroid)
            f_contracted = _safe_eval(fn, contracted)
            evals += 1
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                for i in range(1, n + 1):
                    if evals >= budget:
                        break
                    simplex[i] = simplex[0] + _SHRINK * (simplex[i] - simplex[0])
                    values[i] = _safe_eval(fn, simplex[i])
                    evals += 1

    i_best = int(np.argmin(values))
    return simplex[i_best].copy(), float(values[i_best]), evals, converged


def minimize(spec: ObjectiveSpec) -> OptimResult:
    """Run `spec.restarts` jittered simplex descents and keep the best.

    Restart 0 starts exactly at ``spec.x0``; later restarts perturb it with
    seeded Gaussian noise.  Each restart's jitter depends only on its index,
    so adding restarts never changes (or worsens) the earlier ones.
    """
    best_x: Optional[np.ndarray] = None
    best_value = math.inf
    best_converged = False
    total_evals = 0
    restart_values = []

    for k in range(spec.restarts):
        if k == 0:
            start = spec.x0.copy()
        else:
            rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(k,)))
            start = spec.x0 + JITTER_SCALE * rng.standard_normal(spec.dimension)
        x, value, evals, converged = _nelder_mead(spec.evaluate, start, spec.budget)
        total_evals += evals
        restart_values.append(value)
        if value < best_value:
            best_x, best_value, best_converged = x, value, converged

    if best_x is None or not math.isfinite(best_value):
        raise OptimizationError("objective was not finite at any visited point")

    return OptimResult(
        best_point=spec.transform(best_x),
        best_value=best_value,
        best_x=best_x,
        evaluations_used=total_evals,
        converged=best_converged,
        restart_values=tuple(restart_values),
    )


# Transform helpers used by the model fits. Each maps an unconstrained real
# (vector slice) onto its constrained range and back.


def to_positive(u: float) -> float:
    return math.exp(u)


def from_positive(x: float) -> float:
    if x <= 0:
        raise InvalidInputError("value must be positive")
    return math.log(x)


def to_unit_interval(u: float) -> float:
    # Logistic map onto (0, 1); clipping guards exp overflow for |u| > ~700.
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    z = math.exp(u)
    return z / (1.0 + z)


def from_unit_interval(x: float) -> float:
    if not 0.0 < x < 1.0:
        raise InvalidInputError("value must lie strictly inside (0, 1)")
    return math.log(x / (1.0 - x))


def to_interval(u: float, lo: float, hi: float) -> float:
    return lo + (hi - lo) * to_unit_interval(u)


def from_interval(x: float, lo: float, hi: float) -> float:
    return from_unit_interval((x - lo) / (hi - lo))


def to_ordered_negative(u1: float, u2: float) -> tuple[float, float]:
    """Map two reals onto (a, b) with b < a < 0."""
    a = -math.exp(u1)
    b = a - math.exp(u2)
    return a, b


def from_ordered_negative(a: float, b: float) -> tuple[float, float]:
    if not b < a < 0:
        raise InvalidInputError("need b < a < 0")
    return math.log(-a), math.log(a - b)
