"""Numerical checks of the maximum principles, Hopf growth, barrier and counter-examples.

Every check returns a tri-state :class:`Verdict`. ``NOT_APPLICABLE`` means
the input did not satisfy the hypotheses (for example a claimed
subsolution with a positive residual); ``FAILS`` is reserved for inputs
that satisfy the hypotheses but not the conclusion.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, PreconditionError
from .explicit import c0, zeta_R, zeta_ratio
from .kernel import (
    ClosedForm,
    FracOrder,
    GridFunction,
    QuadConfig,
    bump,
    frac_laplacian_pointwise,
    smooth_step,
    unit_ball_volume,
)
from .parallel import pmap
from .solver import (
    DiscreteOperator,
    Domain1D,
    ExteriorData,
    Nonlinearity,
    SolveConfig,
    assemble,
    solve_linear,
    solve_many,
    solve_semilinear,
)

log = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


# {{{ maximum principles


@dataclass
class PrincipleResult:
    verdict: Verdict
    margin: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "margin": self.margin, **self.detail}


def _half_line_split(u: GridFunction, op: DiscreteOperator):
    x = u.nodes
    right = x > 0
    in_dom = np.zeros(x.size, dtype=bool)
    in_dom[op.interior] = True
    return x, right & in_dom, right & ~in_dom


def _check_antisymmetric_setup(u: GridFunction, op: DiscreteOperator) -> None:
    if not u.antisymmetric:
        raise ConfigError("the maximum-principle checks take odd grid functions")
    x = op.x
    if not np.allclose(np.sort(x), np.sort(-x), atol=1.0e-12):
        raise ConfigError("operator domain must be symmetric about 0")


def weak_mp_check(u: GridFunction, op: DiscreteOperator, kind: str = "sub",
                  res_tol: float = 1.0e-8, sign_tol: float = 1.0e-6) -> PrincipleResult:
    """Weak maximum principle for an odd sub- or supersolution.

    ``op`` is assembled on ``Omega`` and its reflection, with an even
    potential ``c >= 0``. For ``kind="sub"`` the claim is
    ``sup_{x>0} u <= sup_{x>0, x not in Omega} u^+``; for ``"super"`` it is
    ``inf_{x>0} u >= -sup_{x>0, x not in Omega} u^-``.
    """
    _check_antisymmetric_setup(u, op)
    if kind not in ("sub", "super"):
        raise ConfigError(f"kind must be 'sub' or 'super': {kind}")
    sgn = 1.0 if kind == "sub" else -1.0
    x, dom, out = _half_line_split(u, op)
    pos = op.x > 0
    res = op.apply_grid(u)[pos]
    if np.any(op.potential[pos] < 0):
        return PrincipleResult(Verdict.NOT_APPLICABLE, float("nan"), {"reason": "potential is negative"})
    worst_res = float(np.max(sgn * res)) if res.size else 0.0
    if worst_res > res_tol:
        return PrincipleResult(Verdict.NOT_APPLICABLE, float("nan"),
                               {"reason": f"not a discrete {kind}solution", "residual": worst_res})
    v = sgn * u.values
    bound = max(float(np.max(v[out], initial=0.0)), 0.0)
    if u.tail.func is None:
        bound = max(bound, sgn * u.tail.right)
    top = float(np.max(v[x > 0]))
    margin = bound - top
    worst = int(np.flatnonzero(x > 0)[np.argmax(v[x > 0])])
    verdict = Verdict.HOLDS if margin >= -sign_tol else Verdict.FAILS
    return PrincipleResult(verdict, margin, {"kind": kind, "bound": sgn * bound, "extremum": sgn * top,
                                             "worst_x": float(x[worst]), "residual": worst_res})


def strong_mp_check(u: GridFunction, op: DiscreteOperator, res_tol: float = 1.0e-8,
                    sign_tol: float = 1.0e-6) -> PrincipleResult:
    """Dichotomy for odd supersolutions that are nonnegative on the half-line.

    Either ``u > 0`` at every node of ``Omega`` or ``u`` vanishes on the
    half-line grid.
    """
    _check_antisymmetric_setup(u, op)
    x, dom, _ = _half_line_split(u, op)
    pos = op.x > 0
    res = op.apply_grid(u)[pos]
    if res.size and float(np.min(res)) < -res_tol:
        return PrincipleResult(Verdict.NOT_APPLICABLE, float("nan"),
                               {"reason": "not a discrete supersolution", "residual": float(np.min(res))})
    half = u.values[x > 0]
    if float(np.min(half)) < -sign_tol:
        return PrincipleResult(Verdict.NOT_APPLICABLE, float("nan"),
                               {"reason": "u is negative on the half-line", "min": float(np.min(half))})
    if float(np.max(np.abs(half))) <= sign_tol:
        return PrincipleResult(Verdict.HOLDS, 0.0, {"branch": "zero"})
    m = float(np.min(u.values[dom]))
    worst = float(x[dom][np.argmin(u.values[dom])])
    verdict = Verdict.HOLDS if m > 0.0 else Verdict.FAILS
    return PrincipleResult(verdict, m, {"branch": "positive", "min_interior": m, "worst_x": worst})


def interior_zero_certificate(u: ClosedForm, x_star: float, order: FracOrder,
                              quad: QuadConfig | None = None) -> float:
    """``(-Delta)^s u(x_star)`` for odd ``u >= 0`` on the half-line with ``u(x_star) = 0``.

    A strictly negative value shows that ``u`` cannot be a supersolution
    near ``x_star`` unless it vanishes.
    """
    from .kernel import HalfSpaceFunction, antisym_frac_laplacian

    if abs(u(x_star)) > 1.0e-14:
        raise PreconditionError(f"u does not vanish at {x_star}")
    return antisym_frac_laplacian(HalfSpaceFunction.from_closed_form(u), x_star, order, quad)


def random_antisymmetric_problem(rng: np.random.Generator, order: FracOrder, kind: str,
                                 h: float = 0.02, L: float = 4.0, positive_data: bool = False):
    """A random odd problem with a known sign of the residual.

    Returns ``(u, op)`` with ``u`` the solution of ``(-Delta)^s u + c u = f``
    on ``Omega`` and its reflection, where ``Omega = (a, b)`` with ``a > 0``,
    ``c >= 0`` even, ``f`` odd with ``f <= 0`` on ``Omega`` for ``"sub"``
    and ``f >= 0`` for ``"super"``, and odd piecewise-linear exterior data.
    """
    a = float(rng.uniform(0.2, 1.0))
    b = float(rng.uniform(a + 0.6, L - 0.8))
    a, b = round(a / h) * h, round(b / h) * h
    dom = Domain1D([(-b, -a), (a, b)])
    amp_c = float(rng.uniform(0.0, 3.0))
    kc = float(rng.uniform(0.5, 3.0))
    pot = lambda x: amp_c * (1.0 + math.cos(kc * x))  # noqa: E731
    op = assemble(dom, order, pot, SolveConfig(h=h, L=L))
    sgn = -1.0 if kind == "sub" else 1.0
    f_amp = float(rng.uniform(0.0, 2.0))
    kf = float(rng.uniform(0.5, 4.0))
    rhs = lambda x: sgn * math.copysign(1.0, x) * f_amp * (1.0 + math.sin(kf * abs(x))) / 2.0  # noqa: E731
    knots = np.sort(rng.uniform(0.0, L, 5))
    knots = knots[knots > 1.0e-3]
    vals = rng.normal(size=knots.size)
    if positive_data:
        vals = np.abs(vals)
    vals[-1] = 0.0
    if knots.size < 2:
        g = ExteriorData.zero()
    else:
        g = ExteriorData.odd_piecewise_linear(np.unique(knots), vals[: np.unique(knots).size], name="random")
    u = solve_linear(op, rhs, g, antisymmetric=True)
    return u, op


# }}}


# {{{ Hopf growth


@dataclass(frozen=True)
class HopfSample:
    h: float
    d: float
    quotient: float


@dataclass
class HopfReport:
    name: str
    samples: list[HopfSample]
    limit: float
    spread: float
    floor: float
    verdict: Verdict
    reason: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "limit": self.limit, "spread": self.spread, "floor": self.floor,
                "verdict": self.verdict.value, "reason": self.reason,
                "samples": [[p.h, p.d, p.quotient] for p in self.samples]}


@dataclass(frozen=True)
class HopfProblem:
    """A positive odd function near 0, sampled at a given grid spacing.

    ``sample(h)`` returns ``(d, u(d), min_residual)`` for ``d`` in
    ``{h, 2h, 4h}``; ``min_residual`` is the smallest supersolution
    residual on the right component, or ``None`` when not applicable.
    """

    name: str
    sample: Callable[[float], tuple[np.ndarray, np.ndarray, float | None]] = field(compare=False)
    h0: float = 0.02


HOPF_OFFSETS = (1, 2, 4)


def _closed_sampler(func: Callable[[np.ndarray], np.ndarray]):
    def sample(h: float):
        d = h * np.array(HOPF_OFFSETS, dtype=float)
        return d, np.asarray(func(d), dtype=float), None
    return sample


def hopf_zeta_problem(order: FracOrder, R: float = 8.0, h0: float = 0.02) -> HopfProblem:
    """``zeta_R`` sampled exactly; the quotient tends to ``zeta_R'(0)``."""
    return HopfProblem(f"zeta_R(R={R:g})", _closed_sampler(lambda d: d * zeta_ratio(d, R, order)), h0)


def hopf_control_problem(order: FracOrder, h0: float = 0.02) -> HopfProblem:
    """Negative control ``sign(x)|x|^(1+s)``: growth is sublinear."""
    return HopfProblem("control |x|^(1+s)", _closed_sampler(lambda d: d ** (1.0 + order.s)), h0)


def _solver_sampler(solve: Callable[[float], tuple[GridFunction, DiscreteOperator]]):
    def sample(h: float):
        u, op = solve(h)
        idx = [u.index_of(k * h) for k in HOPF_OFFSETS]
        d = u.nodes[idx]
        res = op.apply_grid(u)[op.x > 0]
        return d, u.values[idx], float(np.min(res))
    return sample


def hopf_torsion_problem(order: FracOrder, half_width: float = 2.0, L: float = 2.0,
                         h0: float = 0.02) -> HopfProblem:
    """``(-Delta)^s u = sign(x)`` on ``(-half_width, half_width)``, zero outside."""
    dom = Domain1D.interval(-half_width, half_width)

    def solve(h):
        op = assemble(dom, order, 0.0, SolveConfig(h=h, L=L))
        return solve_linear(op, lambda x: float(np.sign(x)), antisymmetric=True), op

    return HopfProblem(f"torsion s={order.s:g}", _solver_sampler(solve), h0)


def hopf_semilinear_problem(order: FracOrder, f: Nonlinearity, half_width: float = 2.0,
                            L: float = 2.0, h0: float = 0.02) -> HopfProblem:
    """Odd semilinear problem ``(-Delta)^s u = sign(x) f(sign(x) u)``."""
    dom = Domain1D.interval(-half_width, half_width)

    def solve(h):
        cfg = SolveConfig(h=h, L=L)
        op = assemble(dom, order, 0.0, cfg)
        # the residual A u equals sign(x) f(sign(x) u) >= 0 on the right while u >= 0
        return solve_semilinear(dom, order, f, cfg, odd=True, op=op).u, op

    return HopfProblem(f"semilinear {f.name} s={order.s:g}", _solver_sampler(solve), h0)


def hopf_growth(problem: HopfProblem, levels: int = 3, floor: float = 1.0e-6,
                stability: float = 0.10, res_tol: float = 1.0e-8) -> HopfReport:
    """Quotients ``u(d)/d`` at ``d = h, 2h, 4h`` over ``levels`` halvings of ``h``.

    The limit comes from a least-squares fit ``q = A + B d`` over all
    samples. The verdict holds when ``A > floor`` and the quotient at the
    first node varies by at most ``stability`` (relative) across levels.
    """
    samples: list[HopfSample] = []
    first = []
    for k in range(levels):
        h = problem.h0 / 2**k
        d, u, min_res = problem.sample(h)
        if np.any(u <= 0):
            return HopfReport(problem.name, samples, float("nan"), float("nan"), floor,
                              Verdict.NOT_APPLICABLE, f"u is not positive near 0 at h={h:g}")
        if min_res is not None and min_res < -res_tol:
            return HopfReport(problem.name, samples, float("nan"), float("nan"), floor,
                              Verdict.NOT_APPLICABLE, f"not a supersolution at h={h:g} (residual {min_res:.2e})")
        q = u / d
        samples.extend(HopfSample(h, float(di), float(qi)) for di, qi in zip(d, q))
        first.append(q[0])
    samples.sort(key=lambda p: -p.d)
    dd = np.array([p.d for p in samples])
    qq = np.array([p.quotient for p in samples])
    A = np.vstack([np.ones_like(dd), dd]).T
    limit = float(np.linalg.lstsq(A, qq, rcond=None)[0][0])
    first = np.array(first)
    spread = float((first.max() - first.min()) / abs(first).max())
    ok = limit > floor and spread <= stability
    reason = "" if ok else ("limit below floor" if limit <= floor else "quotients unstable under refinement")
    return HopfReport(problem.name, samples, limit, spread, floor,
                      Verdict.HOLDS if ok else Verdict.FAILS, reason)


# }}}


# {{{ barrier


def zeta_cutoff(x, rho: float):
    """Odd cut-off ``x * bump(x, 2 rho)``: supported in ``(-2rho, 2rho)``, slope at 0 positive."""
    return np.asarray(x, dtype=float) * bump(x, 2.0 * rho)


def plateau(x, rho: float):
    """Odd pair of plateaus: ``+1`` near ``rho``, ``-1`` near ``-rho``.

    Equal to 1 on ``|x - rho| <= rho/4`` and 0 for ``|x - rho| >= 3 rho/8``.
    """
    x = np.asarray(x, dtype=float)

    def one(y):
        return smooth_step((3.0 * rho / 8.0 - np.abs(y - rho)) / (rho / 8.0))

    return one(x) - one(-x)


@dataclass(frozen=True)
class BarrierConfig:
    n_check: int = 40
    alpha_cap: float = 1.0e6
    bisect_rtol: float = 1.0e-10
    quad: QuadConfig = field(default_factory=lambda: QuadConfig(tol=1.0e-9))


@dataclass
class BarrierSpec:
    rho: float
    c_bound: float
    alpha: float
    check_x: np.ndarray
    margin: float
    margin_half: float
    slope_at_0: float
    verdict: Verdict
    profile: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def to_dict(self) -> dict:
        return {"rho": self.rho, "c_bound": self.c_bound, "alpha": self.alpha, "margin": self.margin,
                "margin_half_alpha": self.margin_half, "slope_at_0": self.slope_at_0,
                "n_check": int(self.check_x.size), "verdict": self.verdict.value}


def barrier_check_nodes(rho: float, n_check: int) -> np.ndarray:
    """Nodes of ``(0, 2rho)`` outside ``[rho/2, 3rho/2]``, ``n_check`` of them."""
    half = n_check // 2
    left = np.linspace(0.0, 0.5 * rho, half + 1)[1:]
    right = np.linspace(1.5 * rho, 2.0 * rho, n_check - half + 1)[:-1]
    return np.concatenate([left, right])


@lru_cache(maxsize=32)
def _barrier_parts(rho: float, order: FracOrder, cfg: BarrierConfig):
    x = barrier_check_nodes(rho, cfg.n_check)
    zc = ClosedForm(lambda t: float(zeta_cutoff(t, rho)), "zeta_cutoff", breakpoints=(-2 * rho, 2 * rho))
    pl = ClosedForm(lambda t: float(plateau(t, rho)), "plateau",
                    breakpoints=tuple(sorted(sg * rho * f for sg in (-1, 1) for f in (5 / 8, 3 / 4, 5 / 4, 11 / 8))))
    Lz = np.array(pmap(lambda t: frac_laplacian_pointwise(zc, t, order, cfg.quad), x))
    Le = np.array(pmap(lambda t: frac_laplacian_pointwise(pl, t, order, cfg.quad), x))
    return x, Lz, Le


def barrier_build(rho: float, c_bound: float, order: FracOrder,
                  cfg: BarrierConfig | None = None) -> BarrierSpec:
    """Smallest ``alpha`` making ``phi = zeta_cutoff + alpha * plateau`` a subsolution.

    The potential enters through its worst case ``c_bound |phi|``. The
    margin ``max((-Delta)^s phi + c_bound |phi|)`` over the check nodes is
    driven to ``<= 0`` by doubling ``alpha`` and then bisecting.
    """
    if not rho > 0 or c_bound < 0:
        raise ConfigError("need rho > 0 and c_bound >= 0")
    cfg = cfg or BarrierConfig()
    x, Lz, Le = _barrier_parts(float(rho), order, cfg)
    z, e = zeta_cutoff(x, rho), plateau(x, rho)

    def margin(alpha: float) -> float:
        phi = z + alpha * e
        return float(np.max(Lz + alpha * Le + c_bound * np.abs(phi)))

    if margin(0.0) <= 0.0:
        alpha = 0.0
    else:
        hi = 1.0
        while margin(hi) > 0.0:
            hi *= 2.0
            if hi > cfg.alpha_cap:
                return BarrierSpec(rho, c_bound, math.inf, x, margin(cfg.alpha_cap), math.nan, math.nan,
                                   Verdict.FAILS)
        lo = hi / 2.0 if margin(hi / 2.0) > 0.0 else 0.0
        while hi - lo > cfg.bisect_rtol * hi:
            mid = 0.5 * (lo + hi)
            if margin(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        alpha = hi
    m = margin(alpha)
    delta = 1.0e-6 * rho
    slope = float(zeta_cutoff(delta, rho) + alpha * plateau(delta, rho)) / delta  # phi(0) = 0
    ok = m <= 0.0 and slope > 0.0
    return BarrierSpec(rho, c_bound, alpha, x, m, margin(0.5 * alpha), slope,
                       Verdict.HOLDS if ok else Verdict.FAILS,
                       profile=np.column_stack([x, Lz, Le, z, e]))


# }}}


# {{{ Harnack failure


@dataclass(frozen=True)
class ThreePieceFamily:
    """Odd exterior data beyond ``edge``: a near hat, a middle hat and a far plateau.

    The data is ``a * near - t * middle + b * far``. Widths are fractions of
    ``edge``. Solutions with data ``a * near + b * far`` and ``middle``
    give ``V`` and ``Z``; subtracting ``t Z`` close to the touching level
    ``min V/Z`` produces a deep interior valley.
    """

    edge: float

    def pieces(self) -> tuple[ExteriorData, ExteriorData, ExteriorData]:
        e = self.edge
        near = ExteriorData.odd_piecewise_linear([e, 1.1 * e, 1.2 * e], [0.0, 1.0, 0.0], "near")
        mid = ExteriorData.odd_piecewise_linear([1.2 * e, 1.4 * e, 1.6 * e], [0.0, 1.0, 0.0], "middle")
        far = ExteriorData.odd_piecewise_linear([2.0 * e, 2.4 * e, 3.2 * e, 3.6 * e],
                                                [0.0, 1.0, 1.0, 0.0], "far")
        return near, mid, far

    @property
    def support(self) -> float:
        return 3.6 * self.edge

    def data(self, a: float, t: float, b: float) -> ExteriorData:
        near, mid, far = self.pieces()
        return near.combine(far, a, b).combine(mid, 1.0, -t)


@dataclass(frozen=True)
class HarnackConfig:
    h: float = 0.01
    a_values: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    b_values: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    eps_values: tuple[float, ...] = (1.0e-1, 1.0e-2, 1.0e-3, 1.0e-4, 1.0e-5)
    edge: float = 2.5
    omega: tuple[float, float] = (0.5, 2.5)
    omega_prime: tuple[float, float] = (1.0, 2.0)


@dataclass
class HarnackTrial:
    a: float
    b: float
    eps: float
    t: float
    quotient: float
    min_on_omega: float
    positive: bool


@dataclass
class HarnackResult:
    target: float
    found: bool
    best: HarnackTrial | None
    trials: list[HarnackTrial]
    solution: GridFunction | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"target": self.target, "found": self.found,
                "best": None if self.best is None else vars(self.best),
                "trials": [vars(t) for t in self.trials]}


def harnack_violation_search(C: float, order: FracOrder, cfg: HarnackConfig | None = None) -> HarnackResult:
    """Search the three-piece family for ``sup_{Omega'} u > C inf_{Omega'} u`` with ``u > 0`` on ``Omega``.

    ``u`` is s-harmonic in ``(-edge, edge)``. For each shape ``(a, b)`` the
    middle amplitude is ``t = (1 - eps) min_Omega V/Z``; ``eps`` runs down
    the configured ladder. Shapes whose data do not give a positive
    solution are skipped.
    """
    if not C > 1:
        raise ConfigError(f"target C must exceed 1: {C}")
    cfg = cfg or HarnackConfig()
    fam = ThreePieceFamily(cfg.edge)
    L = math.ceil(fam.support) + 1.0
    dom = Domain1D.interval(-cfg.edge, cfg.edge)
    op = assemble(dom, order, 0.0, SolveConfig(h=cfg.h, L=L))
    Un, Um, Uf = solve_many(op, fam.pieces())
    x = op.nodes
    om = (x > cfg.omega[0]) & (x < cfg.omega[1])
    omp = (x > cfg.omega_prime[0]) & (x < cfg.omega_prime[1])
    Z = Um.values

    def run(shape):
        a, b = shape
        V = a * Un.values + b * Uf.values
        if np.any(Z[om] <= 0) or np.any(V[om] <= 0):
            log.info("shape a=%g b=%g skipped: responses not positive", a, b)
            return []
        ratio = V[om] / Z[om]
        tmin = float(np.min(ratio))
        out = []
        for eps in cfg.eps_values:
            t = (1.0 - eps) * tmin
            u = V - t * Z
            pos = bool(np.all(u[om] > 0))
            q = float(np.max(u[omp]) / np.min(u[omp])) if pos else float("nan")
            out.append(HarnackTrial(a, b, eps, t, q, float(np.min(u[om])), pos))
            if pos and q > C:
                break
        return out

    shapes = [(a, b) for a in cfg.a_values for b in cfg.b_values]
    trials = [t for batch in pmap(run, shapes) for t in batch]
    good = [t for t in trials if t.positive]
    best = max(good, key=lambda t: t.quotient, default=None)
    found = best is not None and best.quotient > C
    if found:
        # smallest eps that reaches the target, over the first shape that does
        best = next(t for t in trials if t.positive and t.quotient > C)
    solution = None
    if best is not None:
        # confirm by a direct solve with the combined data
        solution = solve_linear(op, 0.0, fam.data(best.a, best.t, best.b))
        u = solution.values
        best.min_on_omega = float(np.min(u[om]))
        best.positive = bool(best.min_on_omega > 0)
        best.quotient = float(np.max(u[omp]) / np.min(u[omp])) if best.positive else float("nan")
        found = found and best.positive and best.quotient > C
    return HarnackResult(C, found, best, trials, solution)


# }}}


# {{{ strong maximum principle counter-example


def zeta_bounds_hold(R: float, order: FracOrder, upper: float = 4.0, n: int = 400) -> bool:
    """``3x/4 <= zeta_R(x)/c_0 <= 5x/4`` on ``n`` nodes of ``(0, upper)``."""
    if R <= upper:
        return False
    x = np.linspace(upper / n, upper, n, endpoint=False)
    r = zeta_ratio(x, R, order) / c0(order)
    return bool(np.all(r >= 0.75) and np.all(r <= 1.25))


def choose_R(order: FracOrder, upper: float = 4.0, max_power: int = 12) -> float:
    """Smallest power of two for which the bounds of :func:`zeta_bounds_hold` hold."""
    for k in range(max_power + 1):
        R = float(2**k)
        if zeta_bounds_hold(R, order, upper):
            return R
    raise PreconditionError("no R up to 2^max_power satisfies the zeta bounds")


@dataclass(frozen=True)
class CounterexampleConfig:
    h: float = 0.02
    edge: float = 4.0
    a_values: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    b_values: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0)
    depth: float = 0.5
    scan: tuple[float, float] = (1.0, 3.0)
    n_t: int = 200
    bisect_tol: float = 1.0e-13
    sign_tol: float = 1.0e-8


@dataclass
class CounterexampleRun:
    params: dict
    R: float
    t_grid: np.ndarray
    m_samples: np.ndarray
    t_star: float
    x_star: float
    u_min_half: float
    u_min_scan: float
    u_max: float
    lipschitz_ok: bool
    monotone_ok: bool
    verdict: Verdict
    reason: str = ""
    v: GridFunction | None = field(default=None, repr=False)
    u: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"params": self.params, "R": self.R, "t_star": self.t_star, "x_star": self.x_star,
                "u_min_on_(0,3)": self.u_min_half, "u_min_on_[1,3]": self.u_min_scan,
                "u_max": self.u_max, "lipschitz_ok": self.lipschitz_ok,
                "monotone_ok": self.monotone_ok, "verdict": self.verdict.value, "reason": self.reason}


def strong_mp_counterexample_search(order: FracOrder,
                                    cfg: CounterexampleConfig | None = None) -> CounterexampleRun:
    """An odd ``u``, s-harmonic near the scan window, ``>= 0`` on ``(0, 3)`` and touching 0 inside.

    ``v`` solves the Dirichlet problem in ``(-edge, edge)`` with three-piece
    data; ``zeta = zeta_R / c_0``; ``m(t) = min_{[1,3]} (v - t zeta)`` is
    sampled and bisected for its root ``t_*``; ``u = v - t_* zeta``.
    Shapes are tried in order until one puts the touching point inside
    ``[1, 3)`` with ``u >= 0`` on ``(0, 1)``.
    """
    cfg = cfg or CounterexampleConfig()
    R = choose_R(order, cfg.edge)
    c = c0(order)
    fam = ThreePieceFamily(cfg.edge)
    L = math.ceil(fam.support) + 1.0
    dom = Domain1D.interval(-cfg.edge, cfg.edge)
    op = assemble(dom, order, 0.0, SolveConfig(h=cfg.h, L=L))
    Un, Um, Uf = solve_many(op, fam.pieces())
    x = op.nodes
    half = (x > 0) & (x < cfg.scan[1])
    scan = (x >= cfg.scan[0] - 1e-12) & (x <= cfg.scan[1] + 1e-12)
    inner = (x > 0) & (x <= cfg.scan[1] + 1e-12)
    zeta = np.zeros_like(x)
    zeta[np.abs(x) < R] = zeta_R(x[np.abs(x) < R], R, order) / c
    z_scan = zeta[scan]

    def m_of(v, t):
        return float(np.min(v[scan] - t * z_scan))

    last_reason = "no shape tried"
    for a in cfg.a_values:
        for b in cfg.b_values:
            V = a * Un.values + b * Uf.values
            Z = Um.values
            if np.any(Z[inner] <= 0):
                continue
            depth_t = cfg.depth * float(np.min(V[inner] / Z[inner]))
            v = V - depth_t * Z
            ratio = v[inner] / zeta[inner]
            x_min = float(x[inner][np.argmin(ratio)])
            if not (cfg.scan[0] <= x_min < cfg.scan[1]):
                last_reason = f"a={a:g}, b={b:g}: v/zeta is smallest at {x_min:.3f}"
                continue
            if m_of(v, 0.0) <= 0:
                last_reason = f"a={a:g}, b={b:g}: m(0) <= 0"
                continue
            params = {"a": a, "b": b, "t_middle": depth_t, "edge": cfg.edge}
            return _run_pipeline(order, cfg, op, fam, params, v, zeta, R, scan, half, m_of)
    return CounterexampleRun({}, R, np.zeros(0), np.zeros(0), math.nan, math.nan, math.nan, math.nan,
                             math.nan, False, False, Verdict.NOT_APPLICABLE, f"search failed: {last_reason}")


def _run_pipeline(order, cfg, op, fam, params, v_comb, zeta, R, scan, half, m_of):
    # confirm v by a direct solve with the combined data
    g = fam.data(params["a"], params["t_middle"], params["b"])
    vg = solve_linear(op, 0.0, g)
    # normalize so that max v = 1 on the scan window; the problem is linear
    scale = 1.0 / float(np.max(vg.values[scan]))
    params = {**params, "scale": scale}
    vg = GridFunction(vg.L, vg.h, scale * vg.values, vg.tail)
    v = vg.values
    x = op.nodes
    t_hi = 1.0
    while m_of(v, t_hi) >= 0:
        t_hi *= 2.0
    t_grid = np.linspace(0.0, t_hi, cfg.n_t + 1)
    m = np.array([m_of(v, t) for t in t_grid])
    zmax = float(np.max(np.abs(zeta[scan])))
    lip = bool(np.all(np.abs(np.diff(m)) <= zmax * np.diff(t_grid) * (1.0 + 1.0e-12) + 1.0e-14))
    mono = bool(np.all(np.diff(m) <= 1.0e-14))
    lo, hi = 0.0, t_hi
    while hi - lo > cfg.bisect_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if m_of(v, mid) >= 0:
            lo = mid
        else:
            hi = mid
    t_star = lo  # m(t_star) >= 0
    u = v - t_star * zeta
    i_star = int(np.flatnonzero(scan)[np.argmin(u[scan])])
    u_scan = float(np.min(u[scan]))
    u_half = float(np.min(u[half]))
    u_max = float(np.max(np.abs(u[half])))
    ok = (u_half >= -cfg.sign_tol and abs(u_scan) <= 1.0e-6 and u_max > 1.0e3 * cfg.sign_tol and lip
          and cfg.scan[0] <= x[i_star] < cfg.scan[1])
    return CounterexampleRun(params, R, t_grid, m, t_star, float(x[i_star]), u_half, u_scan, u_max,
                             lip, mono, Verdict.HOLDS if ok else Verdict.FAILS, "", vg, u)


# }}}


# {{{ eigenvalue bound


def eigen_bound(order: FracOrder, measure: float) -> float:
    """``(n/2s) |B_1|^(1+2s/n) c_{n,s} |Omega|^(-2s/n)``, a lower bound for the first eigenvalue."""
    if not measure > 0:
        raise ConfigError(f"measure must be positive: {measure}")
    n, s = order.n, order.s
    return n / (2.0 * s) * unit_ball_volume(n) ** (1.0 + 2.0 * s / n) * order.constant * measure ** (-2.0 * s / n)


# }}}
