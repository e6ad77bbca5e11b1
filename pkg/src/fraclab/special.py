"""Gamma function by the Lanczos approximation."""

from __future__ import annotations

import math

import numpy as np

# g = 7, n = 9 coefficient set
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _gamma_scalar(x: float) -> float:
    if x < 0.5:
        # reflection formula
        return math.pi / (math.sin(math.pi * x) * _gamma_scalar(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    # split the power to avoid overflow for large x
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def gamma(x):
    """Gamma function for real arguments (scalar or array).

    Poles at the non-positive integers raise ``ValueError``.
    """
    if np.ndim(x) == 0:
        xf = float(x)
        if xf <= 0 and xf == math.floor(xf):
            raise ValueError(f"gamma has a pole at {xf}")
        return _gamma_scalar(xf)
    arr = np.asarray(x, dtype=float)
    return np.vectorize(lambda v: gamma(v), otypes=[float])(arr)
