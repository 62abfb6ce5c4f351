"""One-factor score-driven VaR/ES model fitted by the zero-homogeneous joint loss.

The VaR and expected-shortfall forecasts share a single latent state:
``v_t = a * exp(kappa_t)`` and ``e_t = b * exp(kappa_t)`` with b < a < 0.
The state updates through the scaled score of the joint loss,

    kappa_t = beta * kappa_{t-1}
              + gamma * (1 / e_{t-1}) * (indicator(r_{t-1} <= v_{t-1}) * r_{t-1} / alpha - e_{t-1})

(the intercept is fixed at zero).  Fitting minimizes the mean joint loss

    loss(r, v, e) = -(1 / (alpha * e)) * indicator(r <= v) * (v - r) + v / e + log(-e) - 1

over the training sample.  State overflow is an error, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .. import optim
from ..dist import empirical_quantile, validate_level
from ..errors import FilterOverflowError, FitError, InvalidInputError
from ..series import ReturnSeries

__all__ = ["GasParams", "gas_filter", "fit_gas", "fz0_loss"]

MIN_TRAIN_LENGTH = 250


@dataclass(frozen=True)
class GasParams:
    """Fitted one-factor model: loadings (a, b), persistence beta, score gain gamma."""

    a: float
    b: float
    beta: float
    gamma: float
    alpha: float
    kappa0: float = 0.0
    mean_loss: Optional[float] = None
    degenerate: bool = False

    def __post_init__(self):
        validate_level(self.alpha)
        if not (self.b < self.a < 0.0 < self.gamma):
            raise InvalidInputError("need b < a < 0 < gamma")
        if not 0.0 <= self.beta < 1.0:
            raise InvalidInputError("persistence beta must lie in [0, 1)")


def _state_recursion(returns, a, b, beta, gamma, alpha, kappa0):
    """Sequential state update; returns (kappa_path, var_path, first_bad_index).

    ``first_bad_index`` is -1 on success, otherwise the 1-based step at which
    the state left the representable range.
    """
    n = returns.shape[0]
    kappa = np.empty(n + 1)
    var = np.empty(n + 1)
    k = kappa0
    kappa[0] = k
    var[0] = a * math.exp(k)
    for t in range(1, n + 1):
        ek = math.exp(k)
        e_prev = b * ek
        v_prev = a * ek
        if not e_prev < 0.0 or e_prev == -math.inf:
            return kappa, var, t
        r = returns[t - 1]
        hit_term = r / alpha if r <= v_prev else 0.0
        k = beta * k + gamma * (hit_term - e_prev) / e_prev
        if not math.isfinite(k):
            return kappa, var, t
        kappa[t] = k
        var[t] = a * math.exp(k)
    return kappa, var, -1


try:  # jit the hot loop when numba is present; the python fallback is identical
    from numba import njit

    _state_recursion = njit(cache=True)(_state_recursion)
except ImportError:  # pragma: no cover
    pass


def gas_filter(params: GasParams, returns: ReturnSeries) -> tuple[np.ndarray, np.ndarray]:
    """State and VaR paths of length T + 1 (final entry = next-day forecast state)."""
    r = np.ascontiguousarray(returns.returns, dtype=float)
    kappa, var, bad = _state_recursion(
        r, params.a, params.b, params.beta, params.gamma, params.alpha, params.kappa0
    )
    if bad >= 0:
        raise FilterOverflowError(
            f"state recursion left the representable range at step {bad}",
            diagnostics={"step": int(bad), "params": params},
        )
    return kappa, var


def fz0_loss(returns: np.ndarray, var: np.ndarray, es: np.ndarray, alpha: float) -> np.ndarray:
    """Per-observation joint VaR/ES loss; requires es < 0."""
    r = np.asarray(returns, dtype=float)
    hit = (r <= var).astype(float)
    return -hit * (var - r) / (alpha * es) + var / es + np.log(-es) - 1.0


def _mean_loss(u: np.ndarray, r: np.ndarray, alpha: float, kappa0: float) -> float:
    try:
        a, b = optim.to_ordered_negative(u[0], u[1])
    except OverflowError:
        return math.inf
    beta = optim.to_unit_interval(u[2])
    gamma = optim.to_positive(u[3]) if u[3] < 700 else math.inf
    if not all(map(math.isfinite, (a, b, gamma))):
        return math.inf
    kappa, var, bad = _state_recursion(r, a, b, beta, gamma, alpha, kappa0)
    if bad >= 0:
        return math.inf
    es = var[:-1] * (b / a)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = float(np.mean(fz0_loss(r, var[:-1], es, alpha)))
    return value if math.isfinite(value) else math.inf


def fit_gas(
    train: ReturnSeries,
    alpha: float,
    seed: int = 0,
    budget: int = 2000,
    restarts: int = 5,
) -> GasParams:
    """Fit the one-factor model by minimizing the mean joint loss.

    The VaR loading starts at the training sample's empirical alpha-quantile
    and the ES loading at the mean of returns at or below it, which puts
    exp(kappa) near 1 at a data-calibrated scale.  The result carries a
    degeneracy warning when the fitted in-sample path is never violated.
    """
    alpha = validate_level(alpha)
    if len(train) < MIN_TRAIN_LENGTH:
        raise InvalidInputError(f"need at least {MIN_TRAIN_LENGTH} training observations, got {len(train)}")
    r = np.ascontiguousarray(train.returns, dtype=float)

    a0 = empirical_quantile(r, alpha)
    if a0 >= 0.0:
        a0 = -max(float(np.std(r)), 1e-8)
    tail = r[r <= a0]
    b0 = float(np.mean(tail)) if tail.size else 2.0 * a0
    if b0 >= a0:
        b0 = a0 - max(0.5 * abs(a0), 1e-8)

    x0 = np.array(
        [
            math.log(-a0),
            math.log(a0 - b0),
            optim.from_unit_interval(0.95),
            math.log(0.01),
        ]
    )
    spec = optim.ObjectiveSpec(
        dimension=4,
        evaluate=lambda u: _mean_loss(u, r, alpha, 0.0),
        transform=lambda u: u.copy(),
        x0=x0,
        budget=budget,
        restarts=restarts,
        seed=seed,
    )
    result = optim.minimize(spec)
    u = result.best_x
    a, b = optim.to_ordered_negative(u[0], u[1])
    params = GasParams(
        a=a,
        b=b,
        beta=optim.to_unit_interval(u[2]),
        gamma=optim.to_positive(u[3]),
        alpha=alpha,
        kappa0=0.0,
        mean_loss=result.best_value,
    )
    if not result.converged:
        raise FitError(
            "joint-loss optimization did not reach the convergence spread",
            diagnostics={
                "best_value": result.best_value,
                "params": params,
                "evaluations": result.evaluations_used,
                "restart_values": result.restart_values,
            },
        )
    _, var = gas_filter(params, train)
    if not np.any(r < var[:-1]):
        params = replace(params, degenerate=True)
    return params
