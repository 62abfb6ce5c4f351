"""Score-driven VaR/ES model: filter recursion, loss, and fitting."""

import math

import numpy as np
import pytest

from varbench import (
    GasParams,
    Normal,
    GarchParams,
    ae_ratio,
    compute_hits,
    fit_gas,
    gas_filter,
    simulate_garch,
)
from varbench.errors import FilterOverflowError, InvalidInputError
from varbench.forecast import ForecastSeries
from varbench.models.gas import fz0_loss, _state_recursion

from conftest import make_returns


def state_loop_oracle(returns, a, b, beta, gamma, alpha, kappa0):
    """Independent recursion, written with explicit expected-shortfall terms."""
    kappa = [kappa0]
    for t in range(1, len(returns) + 1):
        k_prev = kappa[t - 1]
        v_prev = a * math.exp(k_prev)
        e_prev = b * math.exp(k_prev)
        r_prev = returns[t - 1]
        indicator = 1.0 if r_prev <= v_prev else 0.0
        forcing = (indicator * r_prev / alpha - e_prev) / e_prev
        kappa.append(beta * k_prev + gamma * forcing)
    kappa = np.array(kappa)
    return kappa, a * np.exp(kappa)


def mean_fz0_oracle(returns, var, es, alpha):
    """Per-observation joint loss averaged with a plain python loop."""
    total = 0.0
    for r, v, e in zip(returns, var, es):
        hit = 1.0 if r <= v else 0.0
        total += -hit * (v - r) / (alpha * e) + v / e + math.log(-e) - 1.0
    return total / len(returns)


class TestFilter:
    def test_pure_decay_without_score(self):
        # gamma = 0 disables the data influence entirely (kernel-level check;
        # the public parameter type requires gamma > 0)
        returns = np.zeros(10)
        kappa, _, bad = _state_recursion(returns, -2.0, -3.0, 0.9, 0.0, 0.05, 1.0)
        assert bad == -1
        np.testing.assert_allclose(kappa, 0.9 ** np.arange(11), rtol=1e-12)

    def test_one_step_hand_arithmetic(self):
        params = GasParams(a=-2.0, b=-3.0, beta=0.0, gamma=0.1, alpha=0.05, kappa0=0.0)
        kappa, var = gas_filter(params, make_returns([0.0]))
        # no violation: score reduces to -gamma
        assert kappa[1] == pytest.approx(0.1 * (1.0 / -3.0) * (0.0 - -3.0), rel=1e-12)
        assert kappa[1] == pytest.approx(-0.1, rel=1e-12)
        assert var[1] == pytest.approx(-2.0 * math.exp(-0.1), rel=1e-12)

    def test_emits_terminal_state(self):
        params = GasParams(a=-2.0, b=-3.0, beta=0.9, gamma=0.05, alpha=0.05)
        returns = make_returns(np.random.default_rng(0).normal(0, 1, 25))
        kappa, var = gas_filter(params, returns)
        assert kappa.shape == (26,) and var.shape == (26,)

    def test_matches_loop_oracle(self, rng):
        for _ in range(50):
            a = -float(rng.uniform(0.5, 3.0))
            b = a - float(rng.uniform(0.1, 2.0))
            params = GasParams(
                a=a,
                b=b,
                beta=float(rng.uniform(0.0, 0.99)),
                gamma=float(rng.uniform(1e-4, 0.3)),
                alpha=float(rng.uniform(0.01, 0.2)),
                kappa0=float(rng.normal(0, 0.3)),
            )
            returns = make_returns(rng.normal(0, 1.5, int(rng.integers(5, 200))))
            kappa, var = gas_filter(params, returns)
            kappa_ref, var_ref = state_loop_oracle(
                returns.returns, params.a, params.b, params.beta, params.gamma, params.alpha, params.kappa0
            )
            # rtol alone is meaningless where kappa crosses zero; the absolute
            # floor sits far below any economically meaningful state change
            np.testing.assert_allclose(kappa, kappa_ref, rtol=1e-12, atol=1e-10)
            np.testing.assert_allclose(var, var_ref, rtol=1e-12)

    def test_violation_lowers_next_var(self, rng):
        # a hit at t-1 pushes kappa up and the (negative) VaR down: risk rises
        for _ in range(200):
            a = -float(rng.uniform(0.5, 3.0))
            b = a - float(rng.uniform(0.1, 2.0))
            params = GasParams(
                a=a,
                b=b,
                beta=float(rng.uniform(0.0, 0.99)),
                gamma=float(rng.uniform(1e-3, 0.3)),
                alpha=float(rng.uniform(0.01, 0.2)),
                kappa0=float(rng.normal(0, 0.3)),
            )
            v1 = params.a * math.exp(params.kappa0)
            hit_return = v1 - float(rng.uniform(0.0, 1.0))
            safe_return = v1 + float(rng.uniform(0.01, 1.0))
            _, var_hit = gas_filter(params, make_returns([hit_return]))
            _, var_safe = gas_filter(params, make_returns([safe_return]))
            assert var_hit[1] < var_safe[1]

    def test_overflow_raises(self):
        params = GasParams(a=-1.0, b=-2.0, beta=0.99, gamma=400.0, alpha=0.01, kappa0=0.0)
        crash = make_returns(np.full(300, -50.0))
        with pytest.raises(FilterOverflowError):
            gas_filter(params, crash)

    def test_invariants_enforced(self):
        with pytest.raises(InvalidInputError):
            GasParams(a=-1.0, b=-0.5, beta=0.9, gamma=0.1, alpha=0.05)  # b >= a
        with pytest.raises(InvalidInputError):
            GasParams(a=1.0, b=-2.0, beta=0.9, gamma=0.1, alpha=0.05)  # a >= 0
        with pytest.raises(InvalidInputError):
            GasParams(a=-1.0, b=-2.0, beta=1.0, gamma=0.1, alpha=0.05)  # beta out of range
        with pytest.raises(InvalidInputError):
            GasParams(a=-1.0, b=-2.0, beta=0.9, gamma=0.0, alpha=0.05)  # gamma not positive


class TestLoss:
    def test_matches_loop_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(5, 100))
            r = rng.normal(0, 1.5, n)
            var = -np.abs(rng.normal(1.5, 0.3, n))
            es = var - np.abs(rng.normal(0.5, 0.2, n))
            alpha = float(rng.uniform(0.01, 0.2))
            values = fz0_loss(r, var, es, alpha)
            assert float(np.mean(values)) == pytest.approx(
                mean_fz0_oracle(r, var, es, alpha), rel=1e-12
            )


class TestFit:
    def test_sane_on_simulated_volatility_data(self):
        true = GarchParams(mu=0.0, omega=0.05, alpha1=0.08, beta1=0.90, dist=Normal())
        sim = simulate_garch(true, 5000, seed=7)
        params = fit_gas(sim, 0.05, seed=7)
        _, var = gas_filter(params, sim)
        forecast = ForecastSeries(sim.asset_id, "gas", 0.05, sim.dates, var[:-1])
        ae = ae_ratio(compute_hits(sim, forecast))
        assert 0.8 <= ae <= 1.2
        assert not params.degenerate
        assert params.mean_loss is not None

    def test_optimum_beats_random_feasible_draws(self, rng):
        true = GarchParams(mu=0.0, omega=0.05, alpha1=0.08, beta1=0.90, dist=Normal())
        sim = simulate_garch(true, 2000, seed=17)
        alpha = 0.05
        params = fit_gas(sim, alpha, seed=17)
        r = sim.returns
        es_scale = params.b / params.a
        _, var = gas_filter(params, sim)
        fitted = mean_fz0_oracle(r, var[:-1], var[:-1] * es_scale, alpha)
        assert fitted == pytest.approx(params.mean_loss, rel=1e-9)
        for _ in range(100):
            a = -float(rng.uniform(0.2, 5.0))
            b = a - float(rng.uniform(0.05, 3.0))
            probe = GasParams(
                a=a,
                b=b,
                beta=float(rng.uniform(0.0, 0.999)),
                gamma=float(rng.uniform(1e-4, 0.5)),
                alpha=alpha,
            )
            try:
                _, var_p = gas_filter(probe, sim)
            except FilterOverflowError:
                continue
            probe_loss = mean_fz0_oracle(r, var_p[:-1], var_p[:-1] * (probe.b / probe.a), alpha)
            assert probe_loss >= fitted - 1e-12

    def test_degenerate_warning_without_tail_data(self):
        # strictly positive returns never violate a negative VaR path
        rs = make_returns(np.random.default_rng(3).uniform(0.5, 1.5, 300))
        params = fit_gas(rs, 0.05, seed=3)
        assert params.degenerate

    def test_short_sample_rejected(self):
        with pytest.raises(InvalidInputError):
            fit_gas(make_returns(np.random.default_rng(0).normal(0, 1, 100)), 0.05)
