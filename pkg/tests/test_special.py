import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import e1_integral, e1_mpmath, mean_log2_product_2d
from riscap import NumericError, ValidationError
from riscap.special import EULER_GAMMA, exe1, exp_integral_e1, laguerre_rule, mean_log1p_exp_product

LOG_GRID = np.logspace(-3, 3, 61)


def test_e1_at_one():
    assert exp_integral_e1(1.0) == pytest.approx(0.2193839344, abs=1e-9)
    assert exp_integral_e1(1.0) == pytest.approx(e1_integral(1.0), rel=1e-12)


def test_e1_log_grid_vs_quadrature():
    rel = [abs(exp_integral_e1(x) / e1_integral(x) - 1) for x in LOG_GRID if x <= 300]
    assert max(rel) < 1e-9


def test_e1_log_grid_vs_mpmath():
    small = LOG_GRID[LOG_GRID <= 500]
    ref = np.array([e1_mpmath(x) for x in small])
    assert np.max(np.abs(exp_integral_e1(small) / ref - 1)) < 1e-10


def test_exe1_log_grid_vs_mpmath():
    ref = np.array([e1_mpmath(x, scaled=True) for x in LOG_GRID])
    assert np.max(np.abs(exe1(LOG_GRID) / ref - 1)) < 1e-10


def test_exe1_large_argument_no_overflow():
    for x in (1e3, 1e6, 1e12):
        v = exe1(x)
        assert np.isfinite(v)
        # asymptotic series 1/x (1 - 1/x + 2/x^2)
        assert v == pytest.approx((1 - 1 / x + 2 / x**2) / x, rel=1e-8)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
def test_classical_bounds(x):
    # 1/(x+1) < exp(x) E1(x) < 1/x
    assert 1 / (x + 1) < exe1(x) < 1 / x
    assert x * exe1(x) < 1


def test_exe1_decreasing():
    assert np.all(np.diff(exe1(LOG_GRID)) < 0)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.array([1.0, -2.0])])
def test_domain(bad):
    with pytest.raises(ValidationError):
        exp_integral_e1(bad)
    with pytest.raises(ValidationError):
        exe1(bad)


def test_euler_gamma():
    assert EULER_GAMMA == pytest.approx(0.5772156649, abs=1e-10)


def test_laguerre_rule_integrates_polynomials():
    z, w = laguerre_rule(32)
    for k in range(6):
        assert np.dot(w, z**k) == pytest.approx(math.factorial(k), rel=1e-12)


@pytest.mark.parametrize("alpha", [1e-3, 0.5, 1.0, 30.0, 1e4, 1e8])
def test_mean_log_product_vs_2d_quadrature(alpha):
    nats, _ = mean_log1p_exp_product([alpha])
    assert nats[0] / math.log(2) == pytest.approx(mean_log2_product_2d(alpha), rel=1e-6, abs=1e-9)


def test_mean_log_product_zero_stream():
    nats, method = mean_log1p_exp_product([0.0, 2.0])
    assert nats[0] == 0.0 and method[0] == 0


def test_mean_log_product_method_tags():
    _, method = mean_log1p_exp_product([0.01, 1e6])
    assert method[0] > 0  # Laguerre suffices for a weak stream
    assert method[1] < 0  # strong streams need the trapezoid fallback


def test_mean_log_product_rejects_nonfinite():
    with pytest.raises(NumericError):
        mean_log1p_exp_product([np.inf])
    with pytest.raises(NumericError):
        mean_log1p_exp_product([-1.0])


@given(st.floats(1e-6, 1e10))
def test_mean_log_product_below_jensen(alpha):
    # E ln(1 + a X Y) <= ln(1 + a E[XY]) = ln(1 + a)
    nats, _ = mean_log1p_exp_product([alpha])
    assert nats[0] <= math.log1p(alpha) * (1 + 1e-9)


def test_high_snr_asymptote():
    alpha = 1e12
    nats, _ = mean_log1p_exp_product([alpha])
    assert nats[0] == pytest.approx(math.log(alpha) - 2 * EULER_GAMMA, abs=1e-9)
