import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special as sps

from fraclab.quadrature import (
    boundary_near_weight,
    fitted_near_weight,
    gauss_jacobi,
    gauss_legendre_unit,
    hat_moments,
    power_cell_shift,
)
from fraclab.special import gamma


@given(st.floats(0.01, 30.0))
def test_gamma_matches_math(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)


def test_gamma_known_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    np.testing.assert_allclose(gamma(np.array([1.0, 2.0, 3.0])), [1.0, 1.0, 2.0], rtol=1e-14)


@given(st.floats(0.05, 0.95))
def test_gamma_reflection(x):
    assert gamma(x) * gamma(1 - x) == pytest.approx(math.pi / math.sin(math.pi * x), rel=1e-12)


def test_gauss_legendre_unit_integrates_polynomials():
    x, w = gauss_legendre_unit(6)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert w @ x**11 == pytest.approx(1 / 12, rel=1e-13)


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (-0.5, 0.0), (-0.3, 0.6)])
def test_gauss_jacobi_matches_scipy(alpha, beta):
    x, w = gauss_jacobi(10, alpha, beta)
    xr, wr = sps.roots_jacobi(10, alpha, beta)
    np.testing.assert_allclose(np.sort(x), np.sort(xr), atol=1e-13)
    np.testing.assert_allclose(w.sum(), wr.sum(), rtol=1e-13)


def test_gauss_jacobi_weight_moment():
    # int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
    a, b = -0.4, 0.7
    x, w = gauss_jacobi(8, a, b)
    exact = 2 ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
    assert w.sum() == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_hat_moments_sum_to_cell_integral(s):
    left, right = hat_moments(50, s)
    assert left[0] == left[1] == right[0] == 0.0
    # the two half hats on a cell add up to the kernel integral over it
    k = np.arange(2, 50)
    cell = (k - 1.0) ** (-2 * s) / (2 * s) - k ** (-2 * s) / (2 * s)
    np.testing.assert_allclose(left[2:50] + right[1:49], cell, rtol=1e-13)


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_fitted_near_weight_positive(s):
    w = fitted_near_weight(s, np.arange(1, 40))
    assert np.all(w > 0)
    # far from the boundary the fitted weight returns to the plain near-field weight
    assert w[-1] == pytest.approx(1 / (2 - 2 * s), rel=1e-2)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_boundary_near_weight_positive(s):
    assert boundary_near_weight(s) > 0


@pytest.mark.parametrize("j", [0, 1, 3])
def test_power_cell_shift_nonpositive(j):
    t0 = np.array([2.0, 5.0, 9.0])
    assert np.all(power_cell_shift(0.5, j, t0, 1) <= 0)
