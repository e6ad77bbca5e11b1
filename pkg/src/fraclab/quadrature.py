"""Gauss rules on reference intervals and exact cell moments of the 1D kernel."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=None)
def gauss_legendre_unit(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (t + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi(npts: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta."""
    x, w = roots_jacobi(npts, alpha, beta)
    return np.asarray(x), np.asarray(w)


def hat_moments(kmax: int, s: float, npts: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Half-hat moments of t^(-1-2s) on unit cells.

    Returns ``(left, right)`` indexed by k = 0..kmax with

        left[k]  = int_{k-1}^{k} (t - (k-1)) t^(-1-2s) dt      (k >= 2)
        right[k] = int_{k}^{k+1} ((k+1) - t) t^(-1-2s) dt      (k >= 1)

    Entries that are not defined (``left[0]``, ``left[1]``, ``right[0]``)
    are zero. The integrands are analytic on each cell, so a fixed
    Gauss-Legendre rule is accurate to rounding without the cancellation
    that the closed-form antiderivatives suffer for large k.
    """
    tau, w = gauss_legendre_unit(npts)
    k = np.arange(kmax + 1, dtype=float)[:, None]
    p = -1.0 - 2.0 * s
    left = np.zeros(kmax + 1)
    right = np.zeros(kmax + 1)
    if kmax >= 2:
        left[2:] = ((k[2:] - 1.0 + tau) ** p * tau) @ w
    if kmax >= 1:
        right[1:] = ((k[1:] + tau) ** p * (1.0 - tau)) @ w
    return left, right


@lru_cache(maxsize=None)
def boundary_near_weight(s: float) -> float:
    """Near-field weight for a node next to a boundary of the domain.

    The two neighbour weights are taken equal (exact on affine functions)
    and fitted so that the first cell is exact on ``(b - y)^s``, the
    leading behaviour of solutions at a boundary point ``b``:

        a = J / (2 - 2^s),  J = int_0^1 (2 - (1-t)^s - (1+t)^s) t^(-1-2s) dt.

    The standard quadratic rule gives ``1 / (2 - 2s)`` instead.
    """
    from scipy import integrate

    def f(t):
        if t < 1.0e-3:
            # series of the bracket, avoids cancellation near t = 0
            c2 = s * (1.0 - s)
            c4 = s * (1.0 - s) * (2.0 - s) * (3.0 - s) / 12.0
            return (c2 * t * t + c4 * t**4) * t ** (-1.0 - 2.0 * s)
        return (2.0 - (1.0 - t) ** s - (1.0 + t) ** s) * t ** (-1.0 - 2.0 * s)

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1.0e-15, epsrel=1.0e-13, limit=200,
                            points=[1.0e-3])
    return val / (2.0 - 2.0**s)


def boundary_cell_shift(s: float, start: np.ndarray, direction: np.ndarray, npts: int = 24) -> np.ndarray:
    """Weight moved from a boundary node to its interior neighbour.

    For a cell whose boundary end sits at distance ``start`` (in units of
    h) from the evaluation node, switching the interpolant from linear to
    ``(distance from boundary / h)^s`` moves

        int_0^1 (sigma^s - sigma) (start + direction*sigma)^(-1-2s) d sigma

    of kernel weight onto the interior node. ``direction`` is +1 when the
    interior node is farther from the evaluation node than the boundary
    node, -1 otherwise.
    """
    xj, wj = gauss_jacobi(npts, 0.0, s)  # weight (1 + x)^s on [-1, 1]
    sig_j = 0.5 * (xj + 1.0)
    wj = wj * 0.5 ** (1.0 + s)
    sig, w = gauss_legendre_unit(npts)
    start = np.asarray(start, dtype=float)[:, None]
    direction = np.asarray(direction, dtype=float)[:, None]
    p = -1.0 - 2.0 * s
    part_s = ((start + direction * sig_j) ** p) @ wj
    part_1 = ((start + direction * sig) ** p * sig) @ w
    return part_s - part_1


def fitted_near_weight(s: float, k: np.ndarray) -> np.ndarray:
    """Near-field weight at ``k`` cells from a boundary node, exact on ``d^s``.

    With equal neighbour weights ``a`` (exact on affine functions),
    ``a = N_k / (2 k^s - (k-1)^s - (k+1)^s)`` where
    ``N_k = int_0^1 (2k^s - (k+t)^s - (k-t)^s) t^(-1-2s) dt``. For
    ``k >= 2`` both are summed from the binomial series; ``k = 1`` uses
    :func:`boundary_near_weight`. Tends to ``1/(2-2s)`` as ``k`` grows.
    """
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    one = k == 1
    out[one] = boundary_near_weight(s)
    kk = k[~one]
    num = np.zeros_like(kk)
    den = np.zeros_like(kk)
    coef = 1.0
    for m in range(1, 40):
        # binomial(s, 2m) built incrementally
        coef *= (s - (2 * m - 2)) * (s - (2 * m - 1)) / ((2 * m - 1) * (2 * m))
        term = -2.0 * coef * kk ** (s - 2 * m)
        num += term / (2 * m - 2.0 * s)
        den += term
    out[~one] = num / den
    return out


def power_cell_shift(s: float, j: int, t0: np.ndarray, direction: int, npts: int = 12) -> np.ndarray:
    """Change of kernel weight on the near node of a cell under ``d^s`` interpolation.

    The cell runs from the node at ``j`` cells from the boundary (offset
    ``t0`` from the evaluation node, in units of h) to the next one in
    ``direction``. Returns ``int_0^1 (psi - (1 - sigma)) |t0 + direction*sigma|^(-1-2s)``
    with ``psi = ((j+1)^s - (j+sigma)^s) / ((j+1)^s - j^s)``; the far node
    gets the opposite change. Values are never positive.
    """
    t0 = np.asarray(t0, dtype=float)
    if j == 0:
        return -boundary_cell_shift(s, np.abs(t0), np.sign(t0) * direction, npts=24)
    sig, w = gauss_legendre_unit(npts)
    psi = ((j + 1.0) ** s - (j + sig) ** s) / ((j + 1.0) ** s - j**s)
    g = (psi - (1.0 - sig)) * w
    t = np.abs(t0[..., None] + direction * sig)
    return (t ** (-1.0 - 2.0 * s)) @ g
