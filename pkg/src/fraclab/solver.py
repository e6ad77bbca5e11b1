"""Nonlocal Dirichlet problems on unions of intervals.

The operator is the collocation stencil of :mod:`fraclab.kernel` restricted
to the nodes inside the domain. Exterior data enter as an affine vector,
built from the box nodes outside the domain and the analytic tails beyond
the box. Off-diagonal entries are non-positive and every row of the pure
operator sums to zero over the whole line, so the assembled matrix is an
M-matrix for non-negative potentials.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, ConvergenceError, SingularSystemError
from .kernel import (
    FracOrder,
    GridFunction,
    QuadConfig,
    Tail,
    grid_nodes,
    grid_size,
    stencil,
    stencil_rows,
)
from .quadrature import (
    fitted_near_weight,
    power_cell_shift,
)

log = logging.getLogger(__name__)

MAX_INTERIOR_NODES = 8192
MIN_NODES_PER_COMPONENT = 8


# {{{ domains


@dataclass(frozen=True)
class Domain1D:
    """Finite union of disjoint open intervals, sorted left to right."""

    components: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        comps = tuple((float(a), float(b)) for a, b in self.components)
        if not comps:
            raise ConfigError("domain needs at least one interval")
        for a, b in comps:
            if not a < b:
                raise ConfigError(f"empty interval ({a}, {b})")
        comps = tuple(sorted(comps))
        for (a0, b0), (a1, b1) in zip(comps, comps[1:]):
            if a1 < b0:
                raise ConfigError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap")
        object.__setattr__(self, "components", comps)

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain1D":
        return cls(((a, b),))

    @classmethod
    def parse(cls, text: str) -> "Domain1D":
        """Parse ``"a,b;a2,b2"``."""
        comps = []
        try:
            for part in text.split(";"):
                a, b = part.split(",")
                comps.append((float(a), float(b)))
        except ValueError as exc:
            raise ConfigError(f"cannot parse domain {text!r}") from exc
        return cls(tuple(comps))

    @classmethod
    def minkowski(cls, G: "Domain1D", R: float) -> "Domain1D":
        """``G + (-R, R)``, merging components that overlap."""
        if R <= 0:
            raise ConfigError(f"R must be positive: {R}")
        grown = sorted((a - R, b + R) for a, b in G.components)
        merged = [list(grown[0])]
        for a, b in grown[1:]:
            if a < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple(map(tuple, merged)))

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.components)

    @property
    def inf(self) -> float:
        return self.components[0][0]

    @property
    def sup(self) -> float:
        return self.components[-1][1]

    @property
    def radius(self) -> float:
        return max(abs(self.inf), abs(self.sup))

    @property
    def endpoints(self) -> list[float]:
        return [p for ab in self.components for p in ab]

    def contains(self, x, margin: float = 0.0):
        """Membership of ``x`` (scalar or array), at distance > margin from the boundary."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.components:
            out |= (x > a + margin) & (x < b - margin)
        return out if out.ndim else bool(out)

    def contains_interval(self, a: float, b: float, tol: float = 1.0e-12) -> bool:
        """Whether the open interval ``(a, b)`` lies inside the domain."""
        return any(lo - tol <= a and b <= hi + tol for lo, hi in self.components)

    def reflect(self) -> "Domain1D":
        return Domain1D(tuple((-b, -a) for a, b in self.components))

    def __str__(self) -> str:
        return " U ".join(f"({a:g}, {b:g})" for a, b in self.components)


# }}}


# {{{ configuration and exterior data


@dataclass(frozen=True)
class SolveConfig:
    h: float = 1.0e-2
    L: float = 2.0
    linear_tol: float = 1.0e-10
    newton_tol: float = 1.0e-10
    max_iter: int = 50
    boundary_layer: bool = True
    quad: QuadConfig = field(default_factory=QuadConfig)

    def __post_init__(self) -> None:
        for name in ("h", "L", "linear_tol", "newton_tol", "max_iter"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive: {getattr(self, name)}")
        grid_size(self.L, self.h)


@dataclass(frozen=True)
class ExteriorData:
    """Dirichlet data on the complement of the domain.

    ``func`` gives the values at box nodes outside the domain and ``tail``
    describes the data beyond the box.
    """

    func: Callable[[float], float] | None = field(default=None, compare=False)
    tail: Tail = field(default_factory=Tail)
    name: str = "zero"

    @classmethod
    def zero(cls) -> "ExteriorData":
        return cls()

    @classmethod
    def odd_step(cls, R: float) -> "ExteriorData":
        """``g_R``: ``R`` for ``x >= R`` and ``-R`` for ``x <= -R``."""
        return cls(lambda x: math.copysign(R, x) if abs(x) >= R else 0.0,
                   Tail.constant(-R, R), name=f"g_R(R={R:g})")

    @classmethod
    def odd_piecewise_linear(cls, knots: Sequence[float], values: Sequence[float],
                             name: str = "odd-pl") -> "ExteriorData":
        """Odd data, linear between ``knots`` on ``x > 0`` and zero beyond them."""
        k = np.asarray(knots, dtype=float)
        v = np.asarray(values, dtype=float)
        if k.shape != v.shape or k.size < 2 or np.any(np.diff(k) <= 0) or k[0] <= 0:
            raise ConfigError("knots must be positive and increasing, one value each")

        def func(x: float) -> float:
            return math.copysign(float(np.interp(abs(x), k, v, left=0.0, right=0.0)), x)

        return cls(func, Tail.zero(), name=name)

    def combine(self, other: "ExteriorData", a: float = 1.0, b: float = 1.0) -> "ExteriorData":
        """``a * self + b * other``; both tails must vanish."""
        if not (self.tail.is_zero and other.tail.is_zero):
            raise ConfigError("only data with zero tails can be combined")
        f, g = self.func or (lambda x: 0.0), other.func or (lambda x: 0.0)
        return ExteriorData(lambda x: a * f(x) + b * g(x), Tail.zero(),
                            name=f"{a:g}*{self.name}+{b:g}*{other.name}")

    @property
    def is_zero(self) -> bool:
        return self.func is None and self.tail.is_zero

    def sample(self, x: np.ndarray) -> np.ndarray:
        if self.func is None:
            return np.zeros_like(x)
        return np.array([self.func(xi) for xi in x], dtype=float)


# }}}


# {{{ operator


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Assembled ``(-Delta)^s + c`` on the interior nodes of a domain.

    ``matrix`` acts on interior values; ``exterior_block`` maps values at
    box nodes outside the domain into the rows; ``tail_left`` and
    ``tail_right`` are the dimensionless far-field weights of every row.
    """

    order: FracOrder
    domain: Domain1D
    cfg: SolveConfig
    nodes: np.ndarray
    interior: np.ndarray
    exterior: np.ndarray
    matrix: np.ndarray
    exterior_block: np.ndarray
    potential: np.ndarray
    tail_left: np.ndarray
    tail_right: np.ndarray

    @property
    def x(self) -> np.ndarray:
        """Coordinates of the interior nodes."""
        return self.nodes[self.interior]

    @property
    def size(self) -> int:
        return self.interior.size

    @property
    def scale(self) -> float:
        return self.order.constant * self.cfg.h ** (-self.order.alpha)

    @property
    def laplacian(self) -> np.ndarray:
        """The matrix without the potential."""
        return self.matrix - np.diag(self.potential)

    def exterior_vector(self, g: ExteriorData) -> np.ndarray:
        """Contribution ``b_g`` of exterior data to every row."""
        b = self.exterior_block @ g.sample(self.nodes[self.exterior])
        if not g.tail.is_zero:
            x = self.x
            L = self.cfg.L
            o, q = self.order, self.cfg.quad
            tails = np.array([
                g.tail.kernel_integral(xi, L - xi, +1, o, q) + g.tail.kernel_integral(xi, xi + L, -1, o, q)
                for xi in x
            ])
            b = b - o.constant * tails
        return b

    def apply(self, u: np.ndarray, g: ExteriorData | None = None) -> np.ndarray:
        """``((-Delta)^s + c) u`` at interior nodes for interior values ``u``."""
        out = self.matrix @ u
        if g is not None and not g.is_zero:
            out = out + self.exterior_vector(g)
        return out

    def apply_grid(self, u: GridFunction) -> np.ndarray:
        """``((-Delta)^s + c) u`` at interior nodes for a full grid function on the same box."""
        if u.size != self.nodes.size or abs(u.h - self.cfg.h) > 1.0e-12 * self.cfg.h:
            raise ConfigError("grid function does not live on the operator's grid")
        out = self.matrix @ u.values[self.interior] + self.exterior_block @ u.values[self.exterior]
        if not u.tail.is_zero:
            out = out + self.exterior_vector(ExteriorData(None, u.tail, "tail"))
        return out

    def to_grid(self, u: np.ndarray, g: ExteriorData | None = None,
                antisymmetric: bool = False) -> GridFunction:
        """Full-box grid function with ``g`` on exterior nodes and as tail."""
        g = g or ExteriorData.zero()
        vals = g.sample(self.nodes)
        vals[self.interior] = u
        if antisymmetric:
            vals = 0.5 * (vals - vals[::-1])
        return GridFunction(self.cfg.L, self.cfg.h, vals, g.tail, antisymmetric)


def _component_runs(interior: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs ``(lo, hi)`` of consecutive interior node indices."""
    breaks = np.flatnonzero(np.diff(interior) > 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [interior.size - 1]])
    return [(int(interior[i]), int(interior[j])) for i, j in zip(starts, ends)]


def _boundary_correction(W: np.ndarray, s: float, interior: np.ndarray) -> None:
    """Interpolate in ``d^s`` instead of ``d`` inside each component.

    Solutions behave like ``g(b) + C d^s`` at a boundary node ``b``, with
    ``d`` the distance to it; plain linear interpolation misses this and
    costs a factor ``h^s`` in the sup error. Each cell of a component is
    interpolated linearly in ``d^s`` with ``d`` measured from the nearer
    end of the component, and each row gets the equal-weight near field
    that is exact on ``d^s``. Both bases are nonnegative partitions of
    unity, so every weight stays positive and row sums are unchanged.
    """
    row_of = np.full(W.shape[1], -1)
    row_of[interior] = np.arange(interior.size)
    base_near = stencil(s, 1).near
    for lo, hi in _component_runs(interior):
        qa, qb = lo - 1, hi + 1
        n_cells = qb - qa
        rows_g = np.arange(lo, hi + 1)
        rows = row_of[rows_g]
        for c in range(n_cells):
            left = qa + c
            if 2 * c + 1 == n_cells:
                continue  # the middle cell keeps linear interpolation, for symmetry
            if c + 0.5 < n_cells / 2.0:
                j, near, far, direction = c, left, left + 1, 1
            else:
                j, near, far, direction = n_cells - 1 - c, left + 1, left, -1
            t0 = (near - rows_g).astype(float)
            adjacent = (rows_g == near) | (rows_g == far)
            shift = power_cell_shift(s, j, np.where(adjacent, 2.0, t0), direction)
            shift[adjacent] = 0.0
            # off-diagonals hold -w
            W[rows, near] -= shift
            W[rows, far] += shift
        k = np.minimum(rows_g - qa, qb - rows_g)
        delta = fitted_near_weight(s, k) - base_near
        W[rows, rows_g - 1] -= delta
        W[rows, rows_g + 1] -= delta
        W[rows, rows_g] += 2.0 * delta


def assemble(domain: Domain1D, order: FracOrder, c=0.0, cfg: SolveConfig | None = None) -> DiscreteOperator:
    """Assemble the collocation matrix of ``(-Delta)^s + c`` on ``domain``.

    ``c`` may be a scalar, an array over the interior nodes, or a callable
    of ``x``.
    """
    cfg = cfg or SolveConfig()
    if order.n != 1:
        raise ConfigError("the solver is one-dimensional")
    if domain.radius > cfg.L + 1.0e-12:
        raise ConfigError(f"domain {domain} does not fit in the box (-{cfg.L}, {cfg.L})")
    nodes = grid_nodes(cfg.L, cfg.h)
    n_cells = nodes.size - 1
    inside = domain.contains(nodes, margin=1.0e-9 * cfg.h)
    inside[0] = inside[-1] = False
    for a, b in domain.components:
        count = int(np.sum((nodes > a + 1.0e-9 * cfg.h) & (nodes < b - 1.0e-9 * cfg.h)))
        if count < MIN_NODES_PER_COMPONENT:
            raise ConfigError(f"component ({a:g}, {b:g}) has {count} nodes; "
                              f"need at least {MIN_NODES_PER_COMPONENT}")
    interior = np.flatnonzero(inside)
    exterior = np.flatnonzero(~inside)
    if interior.size > MAX_INTERIOR_NODES:
        raise ConfigError(f"{interior.size} interior nodes exceed the cap of {MAX_INTERIOR_NODES}")

    W, tl, tr = stencil_rows(order.s, n_cells, interior)
    if cfg.boundary_layer:
        _boundary_correction(W, order.s, interior)
    scale = order.constant * cfg.h ** (-order.alpha)
    W *= scale

    x = nodes[interior]
    if callable(c):
        pot = np.array([c(xi) for xi in x], dtype=float)
    else:
        pot = np.broadcast_to(np.asarray(c, dtype=float), x.shape).copy()
    if not np.all(np.isfinite(pot)):
        raise ConfigError("potential must be finite")

    A = W[:, interior]
    A[np.arange(interior.size), np.arange(interior.size)] += pot
    return DiscreteOperator(order, domain, cfg, nodes, interior, exterior, A,
                            W[:, exterior], pot, tl, tr)


# }}}


# {{{ linear solves


def _factor(A: np.ndarray):
    lu, piv = sla.lu_factor(A, check_finite=True)
    d = np.abs(np.diag(lu))
    if d.min() == 0.0 or d.min() < 1.0e-14 * d.max():
        cond = np.inf if d.min() == 0.0 else float(np.linalg.cond(A))
        raise SingularSystemError(f"operator is singular or ill conditioned (cond ~ {cond:.2e})", cond)
    return lu, piv


@dataclass
class LinearResult:
    u: GridFunction
    residual: float


def solve_linear(op: DiscreteOperator, rhs=0.0, g: ExteriorData | None = None,
                 antisymmetric: bool = False) -> GridFunction:
    """Solve ``(-Delta)^s u + c u = f`` in the domain with ``u = g`` outside.

    ``rhs`` is a scalar, an array over interior nodes, or a callable of ``x``.
    """
    g = g or ExteriorData.zero()
    f = _samples(rhs, op.x)
    b = f - op.exterior_vector(g)
    lu = _factor(op.matrix)
    u = sla.lu_solve(lu, b)
    res = np.max(np.abs(op.matrix @ u - b)) / max(np.max(np.abs(b)), 1.0)
    if res > op.cfg.linear_tol:
        # one step of iterative refinement
        u += sla.lu_solve(lu, b - op.matrix @ u)
        res = np.max(np.abs(op.matrix @ u - b)) / max(np.max(np.abs(b)), 1.0)
        if res > op.cfg.linear_tol:
            cond = float(np.linalg.cond(op.matrix))
            raise SingularSystemError(f"residual {res:.2e} above tolerance (cond ~ {cond:.2e})", cond)
    return op.to_grid(u, g, antisymmetric)


def solve_many(op: DiscreteOperator, data: Sequence[ExteriorData], rhs=0.0) -> list[GridFunction]:
    """Solve for several exterior data with one factorization."""
    lu = _factor(op.matrix)
    f = _samples(rhs, op.x)
    out = []
    for g in data:
        u = sla.lu_solve(lu, f - op.exterior_vector(g))
        out.append(op.to_grid(u, g))
    return out


def _samples(v, x: np.ndarray) -> np.ndarray:
    if callable(v):
        return np.array([v(xi) for xi in x], dtype=float)
    return np.broadcast_to(np.asarray(v, dtype=float), x.shape).copy()


# }}}


# {{{ semilinear problems


@dataclass(frozen=True)
class Nonlinearity:
    """``f(u)`` with derivative and a Lipschitz estimate on the expected range."""

    func: Callable = field(compare=False)
    deriv: Callable = field(compare=False)
    lipschitz: float
    name: str = "custom"

    def __call__(self, u):
        return self.func(u)

    @classmethod
    def constant(cls, value: float = 1.0) -> "Nonlinearity":
        return cls(lambda u: np.full_like(np.asarray(u, dtype=float), value),
                   lambda u: np.zeros_like(np.asarray(u, dtype=float)), 0.0, f"const{value:g}")

    @classmethod
    def affine(cls, a: float, b: float) -> "Nonlinearity":
        """``a + b u``."""
        return cls(lambda u: a + b * np.asarray(u, dtype=float),
                   lambda u: np.full_like(np.asarray(u, dtype=float), b), abs(b),
                   f"affine({a:g},{b:g})")

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], u_max: float = 1.0) -> "Nonlinearity":
        """``sum coeffs[k] u^k``; Lipschitz constant taken on ``[0, u_max]``."""
        p = np.polynomial.Polynomial(list(coeffs))
        dp = p.deriv()
        grid = np.linspace(0.0, u_max, 1001)
        lip = float(np.max(np.abs(dp(grid)))) if len(coeffs) > 1 else 0.0
        return cls(lambda u: p(np.asarray(u, dtype=float)),
                   lambda u: dp(np.asarray(u, dtype=float)), lip, f"poly{list(coeffs)}")


PRESETS = {
    "const1": lambda: Nonlinearity.constant(1.0),
    "linear": lambda: Nonlinearity.affine(0.0, 1.0),
    "affine": lambda: Nonlinearity.affine(1.0, 0.5),
}


@dataclass
class SemilinearResult:
    u: GridFunction
    iterations: int
    residual_history: list[float]
    method: str


def solve_semilinear(domain: Domain1D, order: FracOrder, f: Nonlinearity,
                     cfg: SolveConfig | None = None, odd: bool = False,
                     op: DiscreteOperator | None = None) -> SemilinearResult:
    """Solve ``(-Delta)^s u = f(u)`` in the domain, ``u = 0`` outside.

    Damped Newton from ``u = 0``: the step is halved until the residual
    decreases. If Newton stalls, Picard iteration ``u <- A^{-1} f(u)`` is
    tried before giving up. With ``odd=True`` the equation at ``x < 0`` is
    ``-f(-u)``, so that odd solutions are preserved.
    """
    cfg = cfg or SolveConfig()
    op = op or assemble(domain, order, 0.0, cfg)
    A = op.matrix
    sgn = np.sign(op.x) if odd else np.ones(op.size)
    sgn[sgn == 0] = 1.0

    def F(u):
        return sgn * f(sgn * u)

    def dF(u):
        return f.deriv(sgn * u)

    def residual(u):
        return A @ u - F(u)

    u = np.zeros(op.size)
    r = residual(u)
    hist = [float(np.max(np.abs(r)))]
    it = 0
    ok = hist[-1] <= cfg.newton_tol
    while not ok and it < cfg.max_iter:
        it += 1
        J = A - np.diag(dF(u))
        try:
            step = sla.solve(J, -r, check_finite=True)
        except (sla.LinAlgError, ValueError):
            break
        t = 1.0
        for _ in range(40):
            cand = u + t * step
            rc = residual(cand)
            if np.max(np.abs(rc)) < hist[-1]:
                break
            t *= 0.5
        else:
            break
        u, r = cand, rc
        hist.append(float(np.max(np.abs(r))))
        ok = hist[-1] <= cfg.newton_tol
    if ok:
        return SemilinearResult(op.to_grid(u, antisymmetric=odd), it, hist, "newton")

    log.info("Newton stalled after %d steps (residual %.2e); trying Picard", it, hist[-1])
    lu = _factor(A)
    u = np.zeros(op.size)
    phist = []
    for k in range(1, cfg.max_iter * 10 + 1):
        u = sla.lu_solve(lu, F(u))
        phist.append(float(np.max(np.abs(residual(u)))))
        if phist[-1] <= cfg.newton_tol:
            return SemilinearResult(op.to_grid(u, antisymmetric=odd), k, hist + phist, "picard")
        if not np.isfinite(phist[-1]):
            break
    raise ConvergenceError("semilinear solve did not converge", hist + phist)


# }}}


# {{{ eigenvalues


@dataclass
class EigenResult:
    value: float
    vector: GridFunction
    iterations: int


def smallest_eigenvalue(op: DiscreteOperator, rtol: float = 1.0e-10, max_iter: int = 1000) -> EigenResult:
    """Smallest eigenvalue of the symmetrized operator by inverse power iteration.

    The eigenvector is positive and has unit discrete L2 norm.
    """
    A = 0.5 * (op.matrix + op.matrix.T)
    lu = _factor(A)
    h = op.cfg.h
    v = np.ones(op.size)
    v /= np.linalg.norm(v)
    lam = float(v @ A @ v)
    for k in range(1, max_iter + 1):
        w = sla.lu_solve(lu, v)
        w /= np.linalg.norm(w)
        new = float(w @ A @ w)
        v = w
        if abs(new - lam) <= rtol * abs(new):
            lam = new
            break
        lam = new
    else:
        raise ConvergenceError(f"inverse iteration stagnated at lambda = {lam:.12g}")
    if v.sum() < 0:
        v = -v
    v /= math.sqrt(h) * np.linalg.norm(v)
    return EigenResult(lam, op.to_grid(v), k)


# }}}
