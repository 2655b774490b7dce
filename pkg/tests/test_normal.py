import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alphagate.model import DomainError
from alphagate.normal import (
    P_FLOOR,
    analytic_power,
    normal_cdf,
    normal_quantile,
    p_value_two_sided,
    p_values_two_sided,
)

from oracles import normal_cdf_series, normal_quantile_bisect, power_by_quadrature


def test_cdf_values():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.959964) == pytest.approx(0.975000, abs=1e-6)
    assert normal_cdf(-8.0) == pytest.approx(6.22e-16, abs=1e-17)


@pytest.mark.parametrize("x", [-37.0, -12.0, -8.0, -5.0, -3.5, -2.0, -0.7, 0.0, 0.3, 1.959964, 2.9, 3.2, 6.0])
def test_cdf_against_series(x):
    assert abs(normal_cdf(x) - normal_cdf_series(x)) < 1e-12


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_cdf_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    assert normal_cdf(lo) <= normal_cdf(hi)


def test_quantile_values():
    assert normal_quantile(0.5) == 0.0
    assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert normal_quantile(0.9875) == pytest.approx(2.241403, abs=1e-6)


@pytest.mark.parametrize("p", [1e-10, 1e-5, 0.0125, 0.3, 0.5, 0.8, 0.975, 0.9875, 1 - 1e-6])
def test_quantile_against_bisection(p):
    assert abs(normal_quantile(p) - normal_quantile_bisect(p)) < 1e-9


@given(st.floats(1e-12, 1 - 1e-12))
def test_quantile_round_trip(p):
    assert abs(normal_cdf(normal_quantile(p)) - p) < 1e-9


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        normal_quantile(p)


def test_p_value_two_sided():
    assert p_value_two_sided(0.0) == 1.0
    assert p_value_two_sided(1.959964) == pytest.approx(0.050, abs=1e-6)
    assert p_value_two_sided(2.241403) == pytest.approx(0.025, abs=1e-6)
    assert p_value_two_sided(-1.959964) == p_value_two_sided(1.959964)
    assert p_value_two_sided(60.0) == P_FLOOR > 0.0


def test_vectorised_p_values_match_scalar():
    z = np.linspace(-40, 40, 2001)
    vec = p_values_two_sided(z)
    assert np.all((vec > 0) & (vec <= 1))
    assert max(abs(vec[i] - p_value_two_sided(float(x))) for i, x in enumerate(z)) < 1e-15


def test_nonfinite_inputs():
    for fn in (normal_cdf, p_value_two_sided):
        with pytest.raises(DomainError):
            fn(math.inf)


def test_analytic_power_values():
    assert analytic_power(0.0, 0.05) == pytest.approx(0.05, abs=1e-12)
    assert analytic_power(2.80158, 0.05) == pytest.approx(0.800, abs=1e-3)
    assert analytic_power(2.80158, 0.025) == pytest.approx(0.7123, abs=1e-3)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, 2.80158, -1.5])
@pytest.mark.parametrize("alpha", [0.05, 0.025, 0.01])
def test_analytic_power_against_quadrature(delta, alpha):
    assert analytic_power(delta, alpha) == pytest.approx(power_by_quadrature(delta, alpha), abs=1e-9)


def test_analytic_power_domain():
    with pytest.raises(DomainError):
        analytic_power(1.0, 0.0)
