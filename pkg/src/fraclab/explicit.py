"""Closed-form objects: the half-line Poisson solution and the polynomial families.

``zeta1`` is the s-harmonic function in ``(-1, 1)`` with exterior datum
``sign(x)``, written through the Poisson kernel of the interval as

    zeta1(x) = 2 a_s x (1 - x^2)^s int_1^inf dt / ((t^2 - x^2) (t^2 - 1)^s).

After ``t = 1/tau`` the integral becomes

    int_0^1 tau^(2s) (1 - tau^2)^(-s) / (1 - x^2 tau^2) d tau,

with algebraic end singularities and, as ``|x| -> 1``, a pole approaching
``tau = 1``. It is integrated with Gauss-Jacobi end panels and
Gauss-Legendre panels graded geometrically toward ``tau = 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import numpy as np
from scipy import integrate

from .errors import ConfigError, QuadratureError
from .kernel import FracOrder
from .quadrature import gauss_jacobi, gauss_legendre_unit
from .special import gamma

DEFAULT_TOL = 1.0e-12


def poisson_constant(s: float) -> float:
    """``a_s = sin(pi s) / pi``, the Poisson-kernel constant of an interval."""
    return math.sin(math.pi * s) / math.pi


# {{{ the zeta integral


@lru_cache(maxsize=None)
def _end_rules(s: float, npts: int):
    # weight tau^(2s) at 0 and (1 - tau)^(-s) at 1, both on [-1, 1]
    return gauss_jacobi(npts, 0.0, 2.0 * s), gauss_jacobi(npts, -s, 0.0)


def _panel_breaks(delta: float) -> list[float]:
    brk = [0.0, 0.5]
    width = 0.5
    while width > max(delta, 1.0e-15) and len(brk) < 64:
        width *= 0.5
        brk.append(1.0 - width)
    brk.append(1.0)
    return brk


def zeta_integral(x: float, s: float, npts: int = 20) -> float:
    """``int_0^1 tau^(2s) (1 - tau^2)^(-s) / (1 - x^2 tau^2) d tau`` for ``|x| < 1``."""
    ax = abs(x)
    d = 1.0 - ax  # exact for ax >= 1/2
    brk = _panel_breaks(d)
    (xa, wa), (xb, wb) = _end_rules(s, npts)

    def denom(tau, omt):
        # 1 - x^2 tau^2 with 1 - |x| tau = (1 - tau) + tau (1 - |x|), free of cancellation near 1
        return (omt + tau * d) * (1.0 + ax * tau)

    # first panel: tau^(2s) is the weight
    a = brk[1]
    tau = 0.5 * a * (xa + 1.0)
    smooth = (1.0 - tau * tau) ** (-s) / denom(tau, 1.0 - tau)
    total = (0.5 * a) ** (1.0 + 2.0 * s) * (wa @ smooth)

    xg, wg = gauss_legendre_unit(npts)
    for lo, hi in zip(brk[1:-2], brk[2:-1]):
        omt = (1.0 - lo) - (hi - lo) * xg
        tau = 1.0 - omt
        f = tau ** (2.0 * s) * (omt * (1.0 + tau)) ** (-s) / denom(tau, omt)
        total += (hi - lo) * (wg @ f)

    # last panel: (1 - tau)^(-s) is the weight
    w = 1.0 - brk[-2]
    omt = 0.5 * w * (1.0 - xb)
    tau = 1.0 - omt
    smooth = tau ** (2.0 * s) * (1.0 + tau) ** (-s) / denom(tau, omt)
    total += (0.5 * w) ** (1.0 - s) * (wb @ smooth)
    return float(total)


def zeta_integral_reference(x: float, s: float) -> float:
    """The same integral by adaptive algebraic-weight quadrature (QAWS)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda t: 1.0 / ((1.0 - x * x * t * t) * (1.0 + t) ** s), 0.0, 1.0,
                                weight="alg", wvar=(2.0 * s, -s), epsabs=1.0e-14,
                                epsrel=1.0e-12, limit=500)
    return val


def _checked_integral(x: float, s: float, tol: float) -> float:
    lo = zeta_integral(x, s, 20)
    hi = zeta_integral(x, s, 28)
    if abs(hi - lo) > tol * max(1.0, abs(hi)):
        raise QuadratureError(f"zeta integral at x={x:g}, s={s:g} not converged", abs(hi - lo))
    return hi


# }}}


# {{{ zeta_1, zeta_R, c_0


def _order_1d(order: FracOrder) -> float:
    if order.n != 1:
        raise ConfigError("the Poisson solution is one-dimensional")
    return order.s


def zeta1(x, order: FracOrder, tol: float = DEFAULT_TOL):
    """``zeta_1`` at ``x``; points with ``|x| >= 1`` return the datum ``sign(x)``."""
    s = _order_1d(order)
    a_s = poisson_constant(s)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.sign(xs)
    for i, xi in enumerate(xs):
        if abs(xi) < 1.0 and xi != 0.0:
            out[i] = 2.0 * a_s * xi * ((1.0 - abs(xi)) * (1.0 + abs(xi))) ** s * _checked_integral(xi, s, tol)
    return out if np.ndim(x) else float(out[0])


def zeta_R(x, R: float, order: FracOrder, tol: float = DEFAULT_TOL):
    """``zeta_R(x) = R zeta_1(x / R)``, exterior datum ``+-R``."""
    if not R > 0:
        raise ConfigError(f"R must be positive: {R}")
    return R * zeta1(np.asarray(x, dtype=float) / R, order, tol)


def zeta_ratio(x, R: float, order: FracOrder, tol: float = DEFAULT_TOL):
    """``zeta_R(x) / x`` for ``|x| < R``, evaluated without dividing (finite at 0)."""
    s = _order_1d(order)
    a_s = poisson_constant(s)
    xs = np.atleast_1d(np.asarray(x, dtype=float)) / R
    if np.any(np.abs(xs) >= 1.0):
        raise ConfigError("zeta_ratio needs |x| < R")
    out = np.array([2.0 * a_s * ((1.0 - abs(y)) * (1.0 + abs(y))) ** s * _checked_integral(y, s, tol) for y in xs])
    return out if np.ndim(x) else float(out[0])


def c0(order: FracOrder, tol: float = DEFAULT_TOL) -> float:
    """``c_0 = 2 a_s int_1^inf dt / (t^2 (t^2 - 1)^s)``, the slope of ``zeta_R`` at 0 as ``R -> inf``."""
    s = _order_1d(order)
    return 2.0 * poisson_constant(s) * _checked_integral(0.0, s, tol)


def c0_closed_form(order: FracOrder) -> float:
    """``a_s B(s + 1/2, 1 - s)``, from ``u = tau^2`` in the defining integral."""
    s = _order_1d(order)
    beta = gamma(s + 0.5) * gamma(1.0 - s) / gamma(1.5)
    return poisson_constant(s) * beta


def ratio_deviation(R: float, order: FracOrder, half_width: float = 2.0, n: int = 201) -> float:
    """``sup_{|x| <= half_width} |zeta_R(x)/x - c_0|`` on ``n`` nodes."""
    x = np.linspace(-half_width, half_width, n)
    return float(np.max(np.abs(zeta_ratio(x, R, order) - c0(order))))


def edge_profile(order: FracOrder, depths=(1e-4, 1e-6, 1e-8, 1e-10)) -> dict:
    """Measured approach of ``zeta_1`` to its datum at ``x = 1``.

    Returns the deficits ``1 - zeta_1(1 - d)`` and the log-log slope of
    the deficit in ``d`` over the given depths.
    """
    d = np.asarray(depths, dtype=float)
    gap = 1.0 - zeta1(1.0 - d, order)
    slope = float(np.polyfit(np.log(d), np.log(gap), 1)[0])
    return {"depths": d.tolist(), "deficits": gap.tolist(), "exponent": slope,
            "value_at_edge": float(zeta1(1.0 - d[-1], order))}


# }}}


# {{{ polynomials


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # decimal literals such as 0.2 are meant exactly
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class OddPolynomial:
    """``sum_k coeffs[k] x^(2k+1)`` with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return 2 * len(self.coeffs) - 1

    def exact(self, x) -> Fraction:
        x = _fraction(x)
        x2 = x * x
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x2 + c
        return acc * x

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x2 + float(c)
        return acc * x

    def derivative_roots(self) -> np.ndarray:
        """Real critical points: ``f'`` is a polynomial in ``y = x^2``."""
        # f'(x) = sum (2k+1) c_k y^k
        dy = [float((2 * k + 1) * c) for k, c in enumerate(self.coeffs)]
        while len(dy) > 1 and dy[-1] == 0.0:
            dy.pop()
        if len(dy) == 1:
            return np.array([])
        y = np.roots(dy[::-1])  # companion-matrix eigenvalues
        y = y[np.abs(y.imag) <= 1.0e-6 * np.maximum(1.0, np.abs(y))].real  # double roots split slightly
        y = y[y >= 0.0]
        r = np.sqrt(y)
        return np.unique(np.concatenate([r, -r]))

    def extremize(self, lo: float, hi: float) -> tuple[float, float, float, float]:
        """``(min, argmin, max, argmax)`` over ``[lo, hi]``."""
        if not lo <= hi:
            raise ConfigError(f"empty interval [{lo}, {hi}]")
        crit = self.derivative_roots()
        cand = np.concatenate([[lo, hi], crit[(crit > lo) & (crit < hi)]])
        vals = self(cand)
        i, j = int(np.argmin(vals)), int(np.argmax(vals))
        return float(vals[i]), float(cand[i]), float(vals[j]), float(cand[j])


@dataclass(frozen=True)
class HarnackPoly(OddPolynomial):
    """The family ``f_eps(x) = a x + b x^3 + c x^5 + d x^7`` with a Harnack gap of ``2/eps``."""

    eps: Fraction = Fraction(0)

    @classmethod
    def build(cls, eps) -> "HarnackPoly":
        e = _fraction(eps)
        if not 0 < e < 1:
            raise ConfigError(f"eps must lie in (0, 1): {eps}")
        a = Fraction(5, 54) * (64 + 5 * e)
        b = -(128 + 73 * e) / Fraction(72)
        c = (-8 + 23 * e) / Fraction(36)
        d = (16 - 19 * e) / Fraction(216)
        return cls((a, b, c, d), e)


def harnack_poly(eps) -> HarnackPoly:
    return HarnackPoly.build(eps)


TOUCHING_COEFFS = (Fraction(301, 50), Fraction(-4193, 2160), Fraction(-2681, 14400),
                   Fraction(167, 1440), Fraction(-371, 43200))


def touching_poly() -> OddPolynomial:
    """The degree-9 odd polynomial with ``f(2) = 1``, ``f(3) = 5``, ``f >= 1`` on ``[1, 3]``."""
    return OddPolynomial(TOUCHING_COEFFS)


# }}}


# {{{ figure data


FIGURE_EPS = (0.2, 0.4, 0.6, 0.8)


def figure_data(which: int, n: int = 1001) -> tuple[list[str], np.ndarray]:
    """Sampled curves for figure 1 (the Harnack family) or 2 (the touching polynomial).

    Returns ``(header, table)`` with the abscissa in the first column.
    """
    if which == 1:
        x = np.linspace(-3.0, 3.0, n)
        cols = [harnack_poly(e)(x) for e in FIGURE_EPS]
        header = ["x"] + [f"f_eps_{e:g}" for e in FIGURE_EPS]
    elif which == 2:
        x = np.linspace(-3.5, 3.5, n)
        cols = [touching_poly()(x)]
        header = ["x", "f"]
    else:
        raise ConfigError(f"unknown figure {which}; expected 1 or 2")
    return header, np.column_stack([x] + cols)


def grid_min(poly: OddPolynomial, lo: float, hi: float, n: int = 10_000,
             minus_slope: float = 0.0) -> float:
    """``min (poly(x) - minus_slope x)`` over ``n`` nodes of ``[lo, hi]``."""
    x = np.linspace(lo, hi, n)
    return float(np.min(poly(x) - minus_slope * x))


# }}}
