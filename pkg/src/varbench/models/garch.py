"""GARCH(1,1) conditional-volatility models with pluggable innovation shapes.

Returns follow ``r_t = mu_t + sigma_t * eta_t`` with iid standardized
innovations; the conditional variance obeys
``sigma2_t = omega + alpha1 * eps2_{t-1} + beta1 * sigma2_{t-1}``.
The one-day VaR at level alpha is ``mu + sigma * q_alpha`` where ``q_alpha``
is the innovation quantile (parametric, or the empirical quantile of the
standardized training residuals for the EDF variant).

Estimation is maximum likelihood over unconstrained coordinates; the EDF
variant uses the Gaussian quasi-likelihood and keeps the residual sample.
Parameters are frozen after fitting and the filter is run forward through
the evaluation period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .. import optim
from ..dist import Distribution, Empirical, HansenSkewT, Normal, StudentT
from ..errors import FitError, InvalidInputError
from ..series import ReturnSeries, consecutive_dates

__all__ = ["GarchParams", "garch_filter", "garch_var_forecast", "fit_garch", "simulate_garch"]

MIN_TRAIN_LENGTH = 250

#: Persistence at or above this is reported as a boundary (degenerate) fit.
DEGENERATE_PERSISTENCE = 0.999

DIST_FAMILIES = ("normal", "t", "skewt", "edf")


@dataclass(frozen=True)
class GarchParams:
    """Fitted GARCH(1,1) parameter bundle.

    ``ar1 is None`` means a constant conditional mean; otherwise
    ``mu_t = mu + ar1 * r_{t-1}``.  ``residuals`` holds the standardized
    training residuals (the EDF variant draws its quantiles from them).
    """

    mu: float
    omega: float
    alpha1: float
    beta1: float
    dist: Distribution
    ar1: Optional[float] = None
    residuals: Optional[np.ndarray] = field(default=None, repr=False)
    log_likelihood: Optional[float] = None
    degenerate: bool = False

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidInputError("omega must be strictly positive")
        if self.alpha1 < 0 or self.beta1 < 0:
            raise InvalidInputError("alpha1 and beta1 must be nonnegative")
        if not self.alpha1 + self.beta1 < 1:
            raise InvalidInputError("need alpha1 + beta1 < 1 for covariance stationarity")
        if self.ar1 is not None and not abs(self.ar1) < 1:
            raise InvalidInputError("AR(1) coefficient must satisfy |ar1| < 1")
        if self.residuals is not None:
            arr = np.asarray(self.residuals, dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, "residuals", arr)

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha1 - self.beta1)


def _mean_path(params: GarchParams, returns: np.ndarray) -> np.ndarray:
    """Conditional mean for each observation plus the one-step-ahead value."""
    n = returns.size
    if params.ar1 is None:
        return np.full(n + 1, params.mu)
    mu_path = np.empty(n + 1)
    mu_path[0] = params.mu / (1.0 - params.ar1)
    mu_path[1:] = params.mu + params.ar1 * returns
    return mu_path


def _variance_path(
    omega: float, alpha1: float, beta1: float, eps: np.ndarray
) -> np.ndarray:
    """Variance recursion, seeded at the unconditional variance.

    Runs as a linear filter so likelihood evaluation stays O(T) in C; the
    recursion is y[t] = (omega + alpha1 * eps2[t-1]) + beta1 * y[t-1].
    """
    v0 = omega / (1.0 - alpha1 - beta1)
    driver = omega + alpha1 * eps * eps
    tail, _ = lfilter([1.0], [1.0, -beta1], driver, zi=np.array([beta1 * v0]))
    return np.concatenate(([v0], tail))


def garch_filter(params: GarchParams, returns: ReturnSeries) -> tuple[np.ndarray, np.ndarray]:
    """Conditional (mu, sigma) paths of length T + 1.

    Entry t < T is the state for observation t; the final entry is the
    one-step-ahead prediction state for the day after the sample ends.
    """
    r = np.asarray(returns.returns, dtype=float)
    mu_path = _mean_path(params, r)
    eps = r - mu_path[:-1]
    sigma2 = _variance_path(params.omega, params.alpha1, params.beta1, eps)
    return mu_path, np.sqrt(sigma2)


def garch_var_forecast(
    params: GarchParams, state: tuple[float, float], alpha: float
) -> float:
    """VaR = mu + sigma * q_alpha for a one-step-ahead (mu, sigma) state."""
    mu, sigma = state
    return float(mu + sigma * params.dist.quantile(alpha))


def _transform(u: np.ndarray, family: str, mean_mode: str):
    """Map unconstrained optimizer coordinates onto valid model parameters."""
    mu = u[0]
    omega = optim.to_positive(u[1])
    persistence = optim.to_unit_interval(u[2])
    arch_share = optim.to_unit_interval(u[3])
    alpha1 = persistence * arch_share
    beta1 = persistence * (1.0 - arch_share)
    idx = 4
    ar1 = None
    if mean_mode == "ar1":
        ar1 = optim.to_interval(u[idx], -1.0, 1.0)
        idx += 1
    if family in ("normal", "edf"):
        dist: Distribution = Normal()
    elif family == "t":
        dist = StudentT(2.0 + optim.to_positive(u[idx]))
    else:
        dist = HansenSkewT(2.0 + optim.to_positive(u[idx]), optim.to_interval(u[idx + 1], -1.0, 1.0))
    return mu, omega, alpha1, beta1, ar1, dist


def _negative_mean_loglik(u: np.ndarray, r: np.ndarray, family: str, mean_mode: str) -> float:
    try:
        mu, omega, alpha1, beta1, ar1, dist = _transform(u, family, mean_mode)
    except (OverflowError, InvalidInputError):
        return math.inf
    if not all(map(math.isfinite, (mu, omega, alpha1, beta1))):
        return math.inf
    n = r.size
    if ar1 is None:
        eps = r - mu
    else:
        mu_path = np.empty(n)
        mu_path[0] = mu / (1.0 - ar1)
        mu_path[1:] = mu + ar1 * r[:-1]
        eps = r - mu_path
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sigma2 = _variance_path(omega, alpha1, beta1, eps)[:-1]
        if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0.0):
            return math.inf
        sigma = np.sqrt(sigma2)
        ll = np.sum(dist.log_density(eps / sigma)) - np.sum(np.log(sigma))
    if not math.isfinite(ll):
        return math.inf
    return -ll / n


def fit_garch(
    train: ReturnSeries,
    dist: str = "normal",
    mean_mode: str = "constant",
    seed: int = 0,
    budget: int = 2000,
    restarts: int = 5,
) -> GarchParams:
    """Maximum-likelihood GARCH(1,1) fit with frozen post-fit parameters.

    ``dist`` selects the innovation family: "normal", "t" (Student-t with
    fitted tail), "skewt" (fitted tail and skew), or "edf" (Gaussian
    quasi-likelihood, empirical residual distribution).  Data are scaled to
    unit variance internally for optimizer conditioning and the estimates
    mapped back.  Raises FitError when no restart reaches the convergence
    spread, carrying best-so-far diagnostics.
    """
    if dist not in DIST_FAMILIES:
        raise InvalidInputError(f"unknown innovation family {dist!r}, expected one of {DIST_FAMILIES}")
    if mean_mode not in ("constant", "ar1"):
        raise InvalidInputError("mean_mode must be 'constant' or 'ar1'")
    if len(train) < MIN_TRAIN_LENGTH:
        raise InvalidInputError(f"need at least {MIN_TRAIN_LENGTH} training observations, got {len(train)}")

    r_raw = np.asarray(train.returns, dtype=float)
    scale = float(np.std(r_raw))
    if scale <= 0.0 or not math.isfinite(scale):
        raise FitError("training returns have zero variance; volatility is unidentified")
    r = r_raw / scale

    family = dist
    mle_family = "normal" if family == "edf" else family
    dim = 4 + (1 if mean_mode == "ar1" else 0) + {"normal": 0, "t": 1, "skewt": 2}[mle_family]
    x0 = np.zeros(dim)
    x0[0] = float(np.mean(r))
    x0[1] = math.log(0.05)  # omega at 5% of the (unit) sample variance
    x0[2] = optim.from_unit_interval(0.95)  # persistence alpha1 + beta1
    x0[3] = optim.from_unit_interval(0.10)  # ARCH share of persistence
    idx = 4
    if mean_mode == "ar1":
        x0[idx] = 0.0
        idx += 1
    if mle_family in ("t", "skewt"):
        x0[idx] = math.log(8.0 - 2.0)  # nu = 8
    if mle_family == "skewt":
        x0[idx + 1] = 0.0  # lam = 0

    spec = optim.ObjectiveSpec(
        dimension=dim,
        evaluate=lambda u: _negative_mean_loglik(u, r, mle_family, mean_mode),
        transform=lambda u: _transform(u, mle_family, mean_mode),
        x0=x0,
        budget=budget,
        restarts=restarts,
        seed=seed,
    )
    result = optim.minimize(spec)
    mu_s, omega_s, alpha1, beta1, ar1, dist_fitted = result.best_point
    if not result.converged:
        raise FitError(
            "GARCH likelihood optimization did not reach the convergence spread",
            diagnostics={
                "best_value": result.best_value,
                "best_point": result.best_point,
                "evaluations": result.evaluations_used,
                "restart_values": result.restart_values,
            },
        )

    params = GarchParams(
        mu=mu_s * scale,
        omega=omega_s * scale * scale,
        alpha1=alpha1,
        beta1=beta1,
        dist=dist_fitted,
        ar1=ar1,
    )
    mu_path, sigma_path = garch_filter(params, train)
    residuals = (r_raw - mu_path[:-1]) / sigma_path[:-1]
    log_likelihood = -result.best_value * r.size - r.size * math.log(scale)
    degenerate = (
        alpha1 + beta1 >= DEGENERATE_PERSISTENCE
        or omega_s <= 1e-12
        or not np.all(np.isfinite(residuals))
    )
    if family == "edf":
        final_dist: Distribution = Empirical(residuals)
    else:
        final_dist = dist_fitted
    return replace(
        params,
        dist=final_dist,
        residuals=residuals,
        log_likelihood=log_likelihood,
        degenerate=degenerate,
    )


def simulate_garch(
    params: GarchParams,
    n: int,
    seed: int,
    asset_id: str = "sim",
    start: date = date(2000, 1, 3),
) -> ReturnSeries:
    """Simulate a return path from the model's data-generating equation.

    The variance starts at its unconditional level, so the path is
    stationary from the first observation; deterministic per seed.
    """
    if n < 1:
        raise InvalidInputError("need at least one simulated observation")
    eta = params.dist.sample(n, seed)
    r = np.empty(n)
    sigma2 = params.unconditional_variance
    mu_prev = params.mu / (1.0 - params.ar1) if params.ar1 is not None else params.mu
    for t in range(n):
        if params.ar1 is not None and t > 0:
            mu_t = params.mu + params.ar1 * r[t - 1]
        else:
            mu_t = mu_prev
        eps = math.sqrt(sigma2) * eta[t]
        r[t] = mu_t + eps
        sigma2 = params.omega + params.alpha1 * eps * eps + params.beta1 * sigma2
    return ReturnSeries(asset_id, consecutive_dates(start, n), r)
