"""Fractional Laplacian in one dimension: constants, evaluators, energy forms.

Two evaluation routes are provided and kept independent of each other:

* closed-form functions (:class:`ClosedForm`) are integrated by adaptive
  quadrature of the symmetrized second difference,
* grid samples (:class:`GridFunction`) use the collocation stencil built
  from exact kernel moments against piecewise-linear interpolation, which
  is also what :mod:`fraclab.solver` assembles.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigError, QuadratureError
from .quadrature import hat_moments
from .special import gamma

ScalarFunction = Callable[[float], float]


# {{{ order and constants


@dataclass(frozen=True)
class FracOrder:
    """Order ``s`` of the operator and spatial dimension ``n``."""

    s: float
    n: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.s < 1.0:
            raise ConfigError(f"fractional order must lie in (0, 1): s = {self.s}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"dimension must be a positive integer: n = {self.n}")

    @property
    def alpha(self) -> float:
        """Kernel exponent 2s."""
        return 2.0 * self.s

    @cached_property
    def constant(self) -> float:
        return kernel_constant(self)


def kernel_constant(order: FracOrder) -> float:
    r"""Normalization :math:`s 4^s \Gamma((n+2s)/2) / (\pi^{n/2} \Gamma(1-s))`."""
    s, n = order.s, order.n
    return s * 4.0**s * gamma(0.5 * (n + 2.0 * s)) / (math.pi ** (0.5 * n) * gamma(1.0 - s))


def kernel_constant_without_pi(order: FracOrder) -> float:
    """The same expression with the ``pi^(n/2)`` factor dropped.

    Kept only so reports can show both values side by side; it does not
    reproduce known closed forms and is never used for evaluation.
    """
    return kernel_constant(order) * math.pi ** (0.5 * order.n)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (0.5 * n) / gamma(0.5 * n + 1.0)


def tail_integral(r: float, order: FracOrder) -> float:
    """Integral of ``|y|^(-n-2s)`` over the complement of the ball of radius ``r``."""
    if r <= 0:
        raise ConfigError(f"radius must be positive: {r}")
    n, a = order.n, order.alpha
    return n * unit_ball_volume(n) * r ** (-a) / a


# }}}


# {{{ quadrature configuration


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for adaptive quadrature.

    ``tol`` bounds the absolute error estimate of the whole evaluation;
    ``tail_rtol`` is the relative tolerance used for far-field tails.
    """

    tol: float = 1.0e-6
    tail_rtol: float = 1.0e-8
    limit: int = 400

    def __post_init__(self) -> None:
        if self.tol <= 0 or self.tail_rtol <= 0 or self.limit < 1:
            raise ConfigError(f"invalid quadrature configuration: {self}")


def _quad(func, a, b, cfg: QuadConfig, points=None, epsabs=None):
    epsabs = cfg.tol if epsabs is None else epsabs
    pts = None
    if points is not None and np.isfinite(b):
        pts = sorted({p for p in points if a < p < b})
        pts = pts or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            func, a, b, points=pts, epsabs=epsabs, epsrel=1.0e-10, limit=cfg.limit
        )
    return val, err


# }}}


# {{{ exterior tails


@dataclass(frozen=True)
class Tail:
    """Values of a function beyond a truncation box ``[-L, L]``.

    Either constant on each side (``left`` / ``right``, zero by default) or
    a callable ``func`` that is integrated numerically.
    """

    left: float = 0.0
    right: float = 0.0
    func: ScalarFunction | None = field(default=None, compare=False)
    name: str = "zero"

    @classmethod
    def zero(cls) -> "Tail":
        return cls()

    @classmethod
    def constant(cls, left: float, right: float) -> "Tail":
        name = "zero" if left == 0 and right == 0 else "constant"
        return cls(left=float(left), right=float(right), name=name)

    @classmethod
    def from_callable(cls, func: ScalarFunction, name: str = "callable") -> "Tail":
        return cls(func=func, name=name)

    @property
    def is_zero(self) -> bool:
        return self.func is None and self.left == 0.0 and self.right == 0.0

    def value(self, x: float) -> float:
        if self.func is not None:
            return float(self.func(x))
        return self.right if x > 0 else self.left

    def sup_positive(self, side: int = 1) -> float:
        """Supremum of the positive part on one side, for constant tails."""
        if self.func is not None:
            raise NotImplementedError("sup of a callable tail is not available")
        return max(self.right if side > 0 else self.left, 0.0)

    def kernel_integral(self, x: float, dist: float, side: int, order: FracOrder,
                        cfg: QuadConfig) -> float:
        """``int_dist^inf g(x + side*r) r^(-1-2s) dr``."""
        a = order.alpha
        if self.func is None:
            g = self.right if side > 0 else self.left
            return g * dist ** (-a) / a
        f = self.func
        val, err = _quad(lambda r: f(x + side * r) * r ** (-1.0 - a), dist, np.inf, cfg,
                         epsabs=0.0)
        if err > cfg.tail_rtol * max(abs(val), 1.0):
            raise QuadratureError(f"tail integral did not converge (error {err:.2e})", err)
        return val


# }}}


# {{{ closed-form functions


@dataclass(frozen=True)
class ClosedForm:
    """A function on the real line given by a formula.

    ``breakpoints`` are kinks the integrator should split at, ``jumps``
    are discontinuities (evaluation there is rejected), and ``limits``
    are the values at ``-inf`` and ``+inf`` (used to integrate the far
    field).
    """

    func: ScalarFunction = field(compare=False)
    name: str = "closed-form"
    breakpoints: tuple[float, ...] = ()
    jumps: tuple[float, ...] = ()
    limits: tuple[float, float] = (0.0, 0.0)

    def __call__(self, x):
        return self.func(x)


def lorentzian() -> ClosedForm:
    """``1 / (1 + x^2)``."""
    return ClosedForm(lambda x: 1.0 / (1.0 + x * x), name="lorentzian")


def lorentzian_half_laplacian(x):
    """Closed form of the half Laplacian of the Lorentzian, ``(1-x^2)/(1+x^2)^2``."""
    x = np.asarray(x, dtype=float)
    return (1.0 - x * x) / (1.0 + x * x) ** 2


def ball_profile(power: float = 0.5, radius: float = 1.0) -> ClosedForm:
    """``(1 - (x/radius)^2)_+^power``."""

    def f(x):
        t = 1.0 - (x / radius) ** 2
        return t**power if t > 0 else 0.0

    return ClosedForm(f, name=f"ball^{power}", breakpoints=(-radius, radius))


def ball_profile_laplacian(order: FracOrder) -> float:
    """Value of ``(-Delta)^s (1-|x|^2)_+^s`` inside the unit ball."""
    s, n = order.s, order.n
    return 4.0**s * gamma(0.5 * n + s) * gamma(1.0 + s) / gamma(0.5 * n)


# }}}


# {{{ grid functions


@dataclass(frozen=True)
class GridFunction:
    """Samples on ``x_i = -L + i h`` together with an exterior tail."""

    L: float
    h: float
    values: np.ndarray = field(compare=False)
    tail: Tail = field(default_factory=Tail)
    antisymmetric: bool = False

    def __post_init__(self) -> None:
        if self.h <= 0 or self.L <= 0:
            raise ConfigError(f"grid needs h > 0 and L > 0: h = {self.h}, L = {self.L}")
        n = grid_size(self.L, self.h)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (n + 1,):
            raise ConfigError(f"expected {n + 1} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("grid function has non-finite samples")
        object.__setattr__(self, "values", values)
        if self.antisymmetric:
            mid = n // 2
            if n % 2 == 0 and values[mid] != 0.0:
                raise ConfigError("antisymmetric grid function must vanish at the origin")
            scale = max(np.max(np.abs(values)), 1.0)
            if np.max(np.abs(values + values[::-1])) > 1.0e-12 * scale:
                raise ConfigError("samples are not antisymmetric about the origin")

    @classmethod
    def from_function(cls, func, L: float, h: float, tail: Tail | None = None,
                      antisymmetric: bool = False) -> "GridFunction":
        x = grid_nodes(L, h)
        vals = np.array([func(xi) for xi in x], dtype=float)
        if antisymmetric:
            vals = 0.5 * (vals - vals[::-1])
        return cls(L, h, vals, tail or Tail(), antisymmetric)

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.L, self.h)

    @property
    def size(self) -> int:
        return self.values.size

    def index_of(self, x: float) -> int:
        """Index of the node at ``x``; raises if ``x`` is not a node."""
        k = (x + self.L) / self.h
        i = int(round(k))
        if abs(k - i) > 1.0e-8 or not 0 <= i < self.size:
            raise ConfigError(f"x = {x} is not a node of the grid")
        return i

    def positive_part(self) -> np.ndarray:
        return np.maximum(self.values, 0.0)

    def negative_part(self) -> np.ndarray:
        return np.maximum(-self.values, 0.0)

    def indicator(self, a: float, b: float) -> np.ndarray:
        x = self.nodes
        return ((x > a) & (x < b)).astype(float)

    def __call__(self, x: float) -> float:
        """Value at a node or in the tail."""
        if abs(x) > self.L + 1.0e-12 * self.L:
            return self.tail.value(x)
        return float(self.values[self.index_of(x)])

    def to_csv(self, path) -> None:
        write_xu_csv(path, self.nodes, self.values)


def grid_size(L: float, h: float) -> int:
    """Number of cells ``2L/h``; must be an integer."""
    k = 2.0 * L / h
    n = int(round(k))
    if n < 2 or abs(k - n) > 1.0e-8 * max(k, 1.0):
        raise ConfigError(f"2L/h must be an integer >= 2: L = {L}, h = {h}")
    return n


def grid_nodes(L: float, h: float) -> np.ndarray:
    n = grid_size(L, h)
    return -L + h * np.arange(n + 1)


def write_xu_csv(path, x, u) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u"])
        for xi, ui in zip(x, u):
            w.writerow([f"{xi:.17g}", f"{ui:.17g}"])


def read_xu_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["x", "u"]:
        raise ConfigError(f"{path}: expected header 'x,u'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return data[:, 0], data[:, 1]


# }}}


# {{{ collocation stencil


@dataclass(frozen=True)
class Stencil:
    """Dimensionless weights of the 1D collocation scheme.

    ``full[k]`` multiplies ``u_i - u_{i+-k}`` for a neighbour at distance
    ``k`` on the interior of the grid, ``edge[k]`` the box-edge node at
    distance ``k``, and ``tail(k)`` is the exact integral of ``t^(-1-2s)``
    over ``[k, inf)``. Physical weights carry the factor ``h^(-2s)``.
    """

    s: float
    full: np.ndarray
    edge: np.ndarray

    @property
    def alpha(self) -> float:
        return 2.0 * self.s

    @property
    def near(self) -> float:
        # second difference approximated by D(h) (z/h)^2 on the first cell
        return 1.0 / (2.0 - self.alpha)

    @property
    def diagonal(self) -> float:
        return 2.0 * (self.near + 1.0 / self.alpha)

    def tail(self, k):
        return np.asarray(k, dtype=float) ** (-self.alpha) / self.alpha


@lru_cache(maxsize=32)
def stencil(s: float, kmax: int) -> Stencil:
    left, right = hat_moments(kmax, s)
    near = 1.0 / (2.0 - 2.0 * s)
    full = left + right
    full[0] = 0.0
    edge = left.copy()
    if kmax >= 1:
        full[1] = near + right[1]
        edge[1] = near
    return Stencil(s, full, edge)


def stencil_rows(s: float, n_cells: int, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dimensionless operator rows for grid nodes ``rows`` (indices in 1..n-1).

    Returns ``(W, tail_left, tail_right)``: ``W`` has shape
    ``(len(rows), n_cells + 1)`` with the diagonal holding the total
    weight (including both tails) and off-diagonals ``-w_ij``. Applied to
    a full grid vector plus tail terms it gives ``h^(2s) (-Delta)^s``.
    """
    rows = np.asarray(rows, dtype=int)
    if rows.size and (rows.min() < 1 or rows.max() > n_cells - 1):
        raise ConfigError("stencil rows must be strictly inside the box")
    st = stencil(s, n_cells)
    cols = np.arange(n_cells + 1)
    dist = np.abs(rows[:, None] - cols[None, :])
    W = -st.full[dist]
    r = np.arange(rows.size)
    W[:, 0] = -st.edge[rows]
    W[:, -1] = -st.edge[n_cells - rows]
    W[r, rows] = 0.0
    tl = st.tail(rows)
    tr = st.tail(n_cells - rows)
    W[r, rows] = -W.sum(axis=1) + tl + tr
    return W, tl, tr


# }}}


# {{{ pointwise evaluation


def frac_laplacian_pointwise(u, x: float, order: FracOrder, quad: QuadConfig | None = None) -> float:
    """``(-Delta)^s u(x)`` for a :class:`ClosedForm` or a :class:`GridFunction`.

    Closed forms use adaptive quadrature of
    ``-(c/2) int (u(x+z) + u(x-z) - 2u(x)) |z|^(-1-2s) dz`` and raise
    :class:`QuadratureError` when the error estimate exceeds ``quad.tol``.
    Grid functions must be evaluated at an interior node.
    """
    if order.n != 1:
        raise ConfigError("pointwise evaluation is one-dimensional")
    quad = quad or QuadConfig()
    if isinstance(u, GridFunction):
        return _grid_pointwise(u, x, order, quad)
    if isinstance(u, ClosedForm):
        return _closed_pointwise(u, x, order, quad)
    raise TypeError(f"cannot evaluate {type(u).__name__}")


def _closed_pointwise(u: ClosedForm, x: float, order: FracOrder, quad: QuadConfig) -> float:
    for j in u.jumps:
        if abs(x - j) < 1.0e-14 * max(1.0, abs(j)):
            raise QuadratureError(f"x = {x} is a discontinuity of {u.name}")
    a = order.alpha
    ux = u(x)
    kinks = [abs(x - b) for b in (*u.breakpoints, *u.jumps)]
    z_far = max([1.0, *kinks]) + 1.0

    def near(z):
        return (u(x + z) + u(x - z) - 2.0 * ux) * z ** (-1.0 - a)

    lo, hi = u.limits

    def far(z):
        return (u(x + z) - hi + u(x - z) - lo) * z ** (-1.0 - a)

    v1, e1 = _quad(near, 0.0, z_far, quad, points=kinks, epsabs=0.5 * quad.tol / order.constant)
    v2, e2 = _quad(far, z_far, np.inf, quad, epsabs=0.5 * quad.tol / order.constant)
    v3 = (hi + lo - 2.0 * ux) * z_far ** (-a) / a
    c = order.constant
    err = c * (e1 + e2)
    if err > quad.tol:
        raise QuadratureError(f"error estimate {err:.2e} exceeds tolerance {quad.tol:.1e}", err)
    return -c * (v1 + v2 + v3)


def _grid_pointwise(u: GridFunction, x: float, order: FracOrder, quad: QuadConfig) -> float:
    i = u.index_of(x)
    n = u.size - 1
    if not 1 <= i <= n - 1:
        raise ConfigError(f"x = {x} is not an interior node of the box")
    W, _, _ = stencil_rows(order.s, n, np.array([i]))
    h, a, c = u.h, order.alpha, order.constant
    val = float(W[0] @ u.values)
    val *= h ** (-a)
    if not u.tail.is_zero:
        xi = u.nodes[i]
        val -= u.tail.kernel_integral(xi, u.L - xi, +1, order, quad)
        val -= u.tail.kernel_integral(xi, xi + u.L, -1, order, quad)
    return c * val


def apply_grid_operator(u: GridFunction, order: FracOrder, quad: QuadConfig | None = None) -> np.ndarray:
    """Discrete ``(-Delta)^s u`` at every node strictly inside the box."""
    quad = quad or QuadConfig()
    n = u.size - 1
    rows = np.arange(1, n)
    W, _, _ = stencil_rows(order.s, n, rows)
    out = (W @ u.values) * u.h ** (-order.alpha)
    if not u.tail.is_zero:
        x = u.nodes
        for k, i in enumerate(rows):
            out[k] -= u.tail.kernel_integral(x[i], u.L - x[i], +1, order, quad)
            out[k] -= u.tail.kernel_integral(x[i], x[i] + u.L, -1, order, quad)
    return order.constant * out


# }}}


# {{{ antisymmetric reduction


@dataclass(frozen=True)
class HalfSpaceFunction:
    """An odd function described only by its values on ``(0, inf)``.

    Either ``func`` (a closed form on the positive half-line, with kinks in
    ``breakpoints`` and value ``limit`` at ``+inf``) or ``grid`` (an odd
    :class:`GridFunction`, of which only the nodes with ``x >= 0`` are read).
    """

    func: ScalarFunction | None = field(default=None, compare=False)
    grid: GridFunction | None = None
    breakpoints: tuple[float, ...] = ()
    limit: float = 0.0

    def __post_init__(self) -> None:
        if (self.func is None) == (self.grid is None):
            raise ConfigError("give exactly one of func or grid")
        if self.grid is not None and not self.grid.antisymmetric:
            raise ConfigError("grid function must carry the antisymmetric flag")

    def __call__(self, x: float) -> float:
        """Value at ``x``; negative arguments go through the reflection."""
        if x < 0:
            return -self(-x)
        if self.func is not None:
            return float(self.func(x)) if x > 0 else 0.0
        return self.grid(x)

    @classmethod
    def from_closed_form(cls, u: ClosedForm) -> "HalfSpaceFunction":
        return cls(func=u.func, breakpoints=tuple(b for b in u.breakpoints if b > 0),
                   limit=u.limits[1])

    def odd_extension(self) -> ClosedForm:
        if self.func is None:
            raise ConfigError("odd extension of a grid half-space function is its grid")
        bp = tuple(sorted({*self.breakpoints, *(-b for b in self.breakpoints), 0.0}))
        return ClosedForm(lambda x: self(x), name="odd-extension", breakpoints=bp,
                          limits=(-self.limit, self.limit))


def antisym_frac_laplacian(u: HalfSpaceFunction, x: float, order: FracOrder,
                           quad: QuadConfig | None = None) -> float:
    r"""``(-Delta)^s u(x)`` for odd ``u`` and ``x > 0``, using the half-line only.

    .. math::

        c \int_0^\infty (K(x-y) - K(x+y)) (u(x) - u(y)) dy
            + 2 c u(x) \int_0^\infty K(x+y) dy,

    with ``K(z) = |z|^(-1-2s)``; the last integral equals ``x^(-2s)/(2s)``.
    """
    if x <= 0:
        raise ConfigError(f"evaluation point must lie in the positive half-line: {x}")
    quad = quad or QuadConfig()
    if u.grid is not None:
        return _grid_antisym(u.grid, x, order, quad)

    a, c = order.alpha, order.constant
    f = u.func
    ux = float(f(x))
    K = lambda z: z ** (-1.0 - a)  # noqa: E731
    eps = 0.25 * quad.tol / c

    # principal value over (0, 2x), symmetrized about x
    kinks = [abs(x - b) for b in u.breakpoints]
    v1, e1 = _quad(lambda z: (2.0 * ux - f(x + z) - f(x - z)) * K(z), 0.0, x, quad,
                   points=kinks, epsabs=eps)
    # direct kernel over (2x, inf)
    b_far = max([2.0 * x + 1.0, *(b + 1.0 for b in u.breakpoints)])
    v2a, e2a = _quad(lambda y: (ux - f(y)) * K(y - x), 2.0 * x, b_far, quad,
                     points=u.breakpoints, epsabs=eps)
    v2b, e2b = _quad(lambda y: (u.limit - f(y)) * K(y - x), b_far, np.inf, quad, epsabs=eps)
    v2c = (ux - u.limit) * (b_far - x) ** (-a) / a
    # reflected kernel over (0, inf)
    v3a, e3a = _quad(lambda y: (ux - f(y)) * K(x + y), 0.0, b_far, quad,
                     points=[x, *u.breakpoints], epsabs=eps)
    v3b, e3b = _quad(lambda y: (u.limit - f(y)) * K(x + y), b_far, np.inf, quad, epsabs=eps)
    v3c = (ux - u.limit) * (b_far + x) ** (-a) / a
    err = c * (e1 + e2a + e2b + e3a + e3b)
    if err > quad.tol:
        raise QuadratureError(f"error estimate {err:.2e} exceeds tolerance {quad.tol:.1e}", err)
    first = v1 + v2a + v2b + v2c - (v3a + v3b + v3c)
    second = 2.0 * ux * x ** (-a) / a
    return c * (first + second)


def _grid_antisym(g: GridFunction, x: float, order: FracOrder, quad: QuadConfig) -> float:
    n = g.size - 1
    mid = n // 2
    i = g.index_of(x) - mid
    if i < 1 or i > mid - 1:
        raise ConfigError(f"x = {x} is not an interior positive node")
    st = stencil(order.s, n)
    up = g.values[mid:]  # u at m = 0..mid, u[0] = 0
    m = np.arange(1, mid + 1)
    direct = st.full[np.abs(i - m)]
    direct[-1] = st.edge[mid - i]
    reflected = st.full[i + m]
    reflected[-1] = st.edge[i + mid]
    ui = up[i]
    diff = ui - up[1:]
    val = np.sum((direct - reflected) * diff)
    val += 2.0 * ui * np.sum(reflected)
    val += st.full[i] * ui  # node at the origin
    val += ui * (st.tail(mid - i) + st.tail(mid + i))
    val *= g.h ** (-order.alpha)
    c = order.constant
    if not g.tail.is_zero:
        val -= g.tail.kernel_integral(x, g.L - x, +1, order, quad)
        val -= g.tail.kernel_integral(x, x + g.L, -1, order, quad)
    return c * val


# }}}


# {{{ energy forms


def gagliardo_energy(u: GridFunction, v: GridFunction, order: FracOrder) -> float:
    """Discrete ``E(u, v) = (c/2) iint (u(x)-u(y))(v(x)-v(y)) |x-y|^(-1-2s)``.

    Both functions must vanish at the box edges and beyond. Pairs of nodes
    inside the box use the collocation weights (the first-cell weight is the
    exact moment of the kernel against the quadratic second difference);
    pairs with one node outside the support are summed in closed form.
    """
    _check_same_grid(u, v)
    for w in (u, v):
        if not w.tail.is_zero or w.values[0] != 0.0 or w.values[-1] != 0.0:
            raise ConfigError("energy needs compactly supported functions with zero tails")
    n = u.size - 1
    st = stencil(order.s, n)
    idx = np.arange(1, n)
    D = np.abs(idx[:, None] - idx[None, :])
    Wm = st.full[D]
    np.fill_diagonal(Wm, 0.0)
    uu, vv = u.values[idx], v.values[idx]
    du = uu[:, None] - uu[None, :]
    dv = vv[:, None] - vv[None, :]
    pair = np.sum(Wm * du * dv)
    # weight towards nodes outside the support: total minus in-support pairs
    outside = st.diagonal - Wm.sum(axis=1)
    single = 2.0 * np.sum(uu * vv * outside)
    return 0.5 * order.constant * u.h ** (1.0 - order.alpha) * (pair + single)


def bilinear_form_with_potential(u: GridFunction, v: GridFunction, c, order: FracOrder,
                                 domain=None) -> float:
    """``E(u, v) + sum_Omega c u v h``.

    ``c`` is a scalar, an array of node samples, or a callable; ``domain``
    (anything with ``contains(x)``) restricts the potential term to Omega,
    otherwise the whole box is used.
    """
    e = gagliardo_energy(u, v, order)
    x = u.nodes
    if callable(c):
        cv = np.array([c(xi) for xi in x], dtype=float)
    else:
        cv = np.broadcast_to(np.asarray(c, dtype=float), x.shape)
    mask = np.ones_like(x, dtype=bool) if domain is None else domain.contains(x)
    return e + float(np.sum(cv[mask] * u.values[mask] * v.values[mask]) * u.h)


def _check_same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.size != v.size or not math.isclose(u.h, v.h) or not math.isclose(u.L, v.L):
        raise ConfigError("grid functions live on different grids")


# }}}


# {{{ mollifier


@lru_cache(maxsize=None)
def _bump_normalization() -> float:
    val, _ = integrate.quad(lambda t: math.exp(-1.0 / (1.0 - t * t)), -1.0, 1.0,
                            epsabs=1.0e-15, epsrel=1.0e-13)
    return 1.0 / val


def bump(x, radius: float = 1.0):
    """Standard mollifier ``C exp(-1/(1 - |x/r|^2)) / r`` with unit integral."""
    if radius <= 0:
        raise ConfigError(f"radius must be positive: {radius}")
    t = np.asarray(x, dtype=float) / radius
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    out *= _bump_normalization() / radius
    return out if out.ndim else float(out)


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)

    def psi(v):
        r = np.zeros_like(v)
        pos = v > 0
        r[pos] = np.exp(-1.0 / v[pos])
        return r

    a, b = psi(t), psi(1.0 - t)
    out = a / (a + b)
    return out if out.ndim else float(out)


# }}}


# {{{ two-dimensional check of the tensor structure


def frac_laplacian_2d_of_1d(v: ClosedForm, x1: float, s: float,
                            quad: QuadConfig | None = None) -> float:
    """2D ``(-Delta)^s`` of ``u(x1, x2) = v(x1)`` on the line ``x2 = 0``.

    Computed in polar coordinates ``z = r (cos t, sin t)`` by nested
    adaptive quadrature, without using the product structure.
    """
    quad = quad or QuadConfig()
    order = FracOrder(s, 2)
    a = order.alpha
    vx = v(x1)
    kinks = [abs(x1 - b) for b in (*v.breakpoints, *v.jumps)]
    lo, hi = v.limits

    def radial(theta: float) -> float:
        ct = math.cos(theta)
        if ct <= 1.0e-15:
            return 0.0
        pts = [k / ct for k in kinks]
        r_far = max([1.0, *pts]) + 1.0

        def near(r):
            return (v(x1 + r * ct) + v(x1 - r * ct) - 2.0 * vx) * r ** (-1.0 - a)

        def far(r):
            return (v(x1 + r * ct) - hi + v(x1 - r * ct) - lo) * r ** (-1.0 - a)

        i1, _ = _quad(near, 0.0, r_far, quad, points=pts, epsabs=1.0e-10)
        i2, _ = _quad(far, r_far, np.inf, quad, epsabs=1.0e-10)
        return i1 + i2 + (hi + lo - 2.0 * vx) * r_far ** (-a) / a

    val, err = _quad(radial, 0.0, 0.5 * math.pi, quad, epsabs=1.0e-9)
    c = order.constant
    if 2.0 * c * err > quad.tol:
        raise QuadratureError(f"error estimate {2 * c * err:.2e} exceeds tolerance", err)
    # four quadrants by the evenness of the second difference in cos(t)
    return -2.0 * c * val


# }}}
