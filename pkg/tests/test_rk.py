import math

import numpy as np
import pytest

from shearmhd.errors import ConfigError, IntegrationError
from shearmhd.rk import solve_ifrk45


def test_exponential_decay_exact_factor():
    # y' = -lam y handled entirely by the decay factor: machine accurate
    lam = 50.0

    def rhs(t, y):
        return np.zeros_like(y)

    def decay(a, b):
        return np.array([math.exp(-lam * (b - a))])

    res = solve_ifrk45(rhs, 0.0, np.array([1.0 + 0j]), 2.0, rtol=1e-8,
                       decay=decay)
    assert abs(res.y[0] - math.exp(-100.0)) < 1e-16


def test_forced_oscillator_order():
    # fixed-step refinement on a smooth non-autonomous problem: order >= 4
    def rhs(t, y):
        return np.array([1j * y[0] * math.cos(t)])

    y0 = np.array([1.0 + 0j])
    exact = np.exp(1j * math.sin(3.0))
    errs = []
    for h in [0.1, 0.05, 0.025]:
        res = solve_ifrk45(rhs, 0.0, y0, 3.0, rtol=0.5e-3, atol=1e6,
                           h0=h, max_step=h)
        errs.append(abs(res.y[0] - exact))
    order1 = math.log2(errs[0] / errs[1])
    order2 = math.log2(errs[1] / errs[2])
    assert order1 >= 4.0 and order2 >= 4.0


def test_sampling_hits_times():
    def rhs(t, y):
        return np.array([y[0]])

    res = solve_ifrk45(rhs, 0.0, np.array([1.0 + 0j]), 1.0, rtol=1e-10,
                       sample_times=[0.0, 0.3, 0.7, 1.0])
    assert res.sample_t == [0.0, 0.3, 0.7, 1.0]
    for t, y in zip(res.sample_t, res.sample_y):
        assert abs(y[0] - math.exp(t)) < 1e-8


def test_rejects_bad_span_and_reports_underflow():
    def rhs(t, y):
        return np.array([0.0 + 0j])

    with pytest.raises(ConfigError):
        solve_ifrk45(rhs, 1.0, np.array([1.0 + 0j]), 0.5, rtol=1e-8)

    # a right-hand side that blows up in finite time forces the step
    # size to underflow; the error carries the time reached
    def blow(t, y):
        return np.array([y[0] ** 2])

    with pytest.raises(IntegrationError) as exc:
        solve_ifrk45(blow, 0.0, np.array([1.0 + 0j]), 2.0, rtol=1e-10)
    assert exc.value.t_reached is not None
    assert 0.9 < exc.value.t_reached <= 1.05


def test_zero_initial_data_fast_path():
    def rhs(t, y):
        return np.zeros_like(y)

    res = solve_ifrk45(rhs, 0.0, np.zeros(3, dtype=complex), 5.0, rtol=1e-9)
    assert res.t == pytest.approx(5.0)
    assert np.all(res.y == 0)
