"""Moving planes in one dimension.

A plane is a point ``lam``; ``Q_lam(x) = 2 lam - x`` reflects across it and
``v_lam = u - u o Q_lam``. With ``direction = +1`` the plane starts at
``M = sup Omega`` and moves left: the cap is ``Omega`` to the right of
``lam`` and ``v_lam >= 0`` is checked to the left of it. ``direction = -1``
is the mirror image.

Planes are restricted to half-grid positions ``-L + k h / 2`` so that the
reflection permutes nodes and no interpolation enters a sign check.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .checks import Verdict
from .errors import ConfigError, PreconditionError
from .kernel import FracOrder, GridFunction, Tail, grid_size
from .solver import Domain1D, Nonlinearity, SolveConfig, assemble, solve_semilinear

log = logging.getLogger(__name__)

# reflection-containment slack, in units of the domain length
CONTAIN_TOL = 1.0e-12


@dataclass(frozen=True)
class PlanePosition:
    lam: float
    direction: int = 1

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise ConfigError(f"direction must be +1 or -1: {self.direction}")

    def reflect(self, x):
        return 2.0 * self.lam - np.asarray(x, dtype=float)

    def behind(self, x):
        """Nodes on the side the cap is reflected into (``H'_lam``)."""
        return self.direction * (self.lam - np.asarray(x, dtype=float)) > 0


# {{{ reflections


def half_grid_index(u: GridFunction, lam: float) -> int:
    """``k`` with ``lam = -L + k h / 2``; rejects planes off the half grid."""
    k = 2.0 * (lam + u.L) / u.h
    ki = int(round(k))
    if abs(k - ki) > 1.0e-8 * max(1.0, abs(k)):
        raise ConfigError(f"plane {lam} is not a half-grid position for h = {u.h}")
    return ki


def _evaluator(u: GridFunction):
    x = u.nodes

    def at(y: float) -> float:
        if abs(y) > u.L:
            return u.tail.value(y)
        return float(np.interp(y, x, u.values))

    return at


def reflected_values(u: GridFunction, lam: float) -> np.ndarray:
    """``u(2 lam - x_i)`` at every node."""
    k = half_grid_index(u, lam)
    j = k - np.arange(u.size)
    out = np.empty(u.size)
    ok = (j >= 0) & (j < u.size)
    out[ok] = u.values[j[ok]]
    y = 2.0 * lam - u.nodes
    out[~ok] = [u.tail.value(yi) for yi in y[~ok]]
    return out


def reflect_diff(u: GridFunction, lam: float) -> GridFunction:
    """``v_lam(x) = u(x) - u(Q_lam(x))`` on the same grid.

    Beyond the box the tail is the same difference, evaluated through the
    tail of ``u`` and linear interpolation of its samples.
    """
    v = u.values - reflected_values(u, lam)
    if u.tail.is_zero and abs(lam) < 1.0e-15:
        # zero tail and plane at the origin: the difference is zero beyond the box
        tail = Tail.zero()
    else:
        at = _evaluator(u)
        tail = Tail.from_callable(lambda x: u.tail.value(x) - at(2.0 * lam - x), "reflect_diff")
    return GridFunction(u.L, u.h, v, tail)


def c_lambda(u: GridFunction, f: Nonlinearity, lam: float, lipschitz: float | None = None) -> np.ndarray:
    """Difference quotient of ``f`` between ``u`` and its reflection.

    Set to zero where ``|u - u o Q_lam| <= 1e-12 max|u|``. Raises if the
    result exceeds the Lipschitz constant of ``f``.
    """
    ur = reflected_values(u, lam)
    diff = u.values - ur
    theta = 1.0e-12 * float(np.max(np.abs(u.values)))
    c = np.zeros(u.size)
    live = np.abs(diff) > theta
    c[live] = (f(u.values[live]) - f(ur[live])) / diff[live]
    bound = f.lipschitz if lipschitz is None else lipschitz
    worst = float(np.max(np.abs(c))) if c.size else 0.0
    if worst > bound * (1.0 + 1.0e-9) + 1.0e-12:
        raise PreconditionError(f"|c_lam| reaches {worst:.6g}, above the Lipschitz constant {bound:.6g}")
    return c


# }}}


# {{{ critical plane


def _cap(domain: Domain1D, lam: float, direction: int) -> list[tuple[float, float]]:
    out = []
    for a, b in domain.components:
        if direction > 0 and b > lam:
            out.append((max(a, lam), b))
        elif direction < 0 and a < lam:
            out.append((a, min(b, lam)))
    return out


def reflection_contained(domain: Domain1D, lam: float, direction: int = 1) -> bool:
    """Whether ``Q_lam`` maps the cap into the closure of the domain."""
    tol = CONTAIN_TOL * (domain.sup - domain.inf)
    return all(domain.contains_interval(2.0 * lam - b, 2.0 * lam - a, tol)
               for a, b in _cap(domain, lam, direction))


def critical_plane(domain: Domain1D, direction: int = 1) -> float:
    """``m = inf {mu : Q_lam(cap) in Omega for all lam in (mu, M)}``.

    Containment can only change where a reflected endpoint meets an
    endpoint, so the candidates are the endpoints and their midpoints; the
    status is tested at each candidate and between consecutive ones.
    """
    if direction not in (1, -1):
        raise ConfigError(f"direction must be +1 or -1: {direction}")
    # work in the +1 orientation
    dom = domain if direction > 0 else domain.reflect()
    ends = dom.endpoints
    M = dom.sup
    cands = sorted({0.5 * (p + q) for p in ends for q in ends if 0.5 * (p + q) < M}, reverse=True)
    cands.append(cands[-1] - (M - dom.inf))
    upper = M
    m = cands[-1]
    for c in cands:
        if not reflection_contained(dom, 0.5 * (upper + c), 1):
            m = upper
            break
        if not reflection_contained(dom, c, 1):
            m = c
            break
        upper = c
    return m + 0.0 if direction > 0 else 0.0 - m


def critical_plane_scan(domain: Domain1D, direction: int = 1, n: int = 100_000) -> float:
    """Brute-force ``m``: walk the plane from ``M`` on a fine grid until containment fails."""
    M = domain.sup if direction > 0 else domain.inf
    far = domain.inf if direction > 0 else domain.sup
    lams = np.linspace(M, far, n + 1)[1:]
    last = M
    for lam in lams:
        if not reflection_contained(domain, lam, direction):
            return float(last)
        last = lam
    return float(last)


# }}}


# {{{ the parallel-surface experiment


@dataclass(frozen=True)
class MovingPlaneConfig:
    h: float = 0.01
    margin: float = 0.25
    sign_tol: float = 1.0e-8
    gap_factor: float = 10.0
    solve: SolveConfig | None = None

    def __post_init__(self) -> None:
        if not (self.h > 0 and self.margin >= 0 and self.sign_tol > 0 and self.gap_factor > 0):
            raise ConfigError("moving-plane configuration needs h, sign_tol, gap_factor > 0 and margin >= 0")

    def solve_config(self, domain: Domain1D) -> SolveConfig:
        # smallest box with L a multiple of h that clears the domain by the margin
        L = math.ceil((domain.radius + self.margin) / self.h - 1.0e-9) * self.h
        base = self.solve or SolveConfig()
        cfg = SolveConfig(h=self.h, L=L, linear_tol=base.linear_tol, newton_tol=base.newton_tol,
                          max_iter=base.max_iter, boundary_layer=base.boundary_layer, quad=base.quad)
        grid_size(cfg.L, cfg.h)
        return cfg


@dataclass
class SweepTrace:
    direction: int
    M: float
    m: float
    lams: np.ndarray
    minima: np.ndarray
    behind_minima: np.ndarray
    event: str

    @property
    def worst(self) -> float:
        """Smallest ``v_lam`` over ``H'_lam`` across the sweep."""
        return float(np.min(self.behind_minima)) if self.behind_minima.size else 0.0

    def to_dict(self) -> dict:
        return {"direction": self.direction, "M": self.M, "m": self.m, "event": self.event,
                "n_planes": int(self.lams.size), "worst_behind": self.worst,
                "worst_reflected_cap": self.worst_cap}

    @property
    def worst_cap(self) -> float:
        """Smallest ``v_lam`` over ``Omega'_lam``; planes whose cap holds no node are skipped."""
        live = self.minima[np.isfinite(self.minima)]
        return float(np.min(live)) if live.size else math.nan


@dataclass
class MovingPlaneReport:
    G: Domain1D
    R: float
    omega: Domain1D
    u: GridFunction
    boundary_values: list[tuple[float, float]]
    gap: float
    gap_tol: float
    sweeps: list[SweepTrace]
    center: float
    center_expected: float | None
    residual_curve: np.ndarray
    even_residual: float
    positivity_min: float
    monotone_violations: int
    verdicts: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "G": str(self.G), "R": self.R, "omega": str(self.omega),
            "h": self.u.h, "L": self.u.L,
            "boundary_values": [[x, v] for x, v in self.boundary_values],
            "gap": self.gap, "gap_tol": self.gap_tol,
            "sweeps": [t.to_dict() for t in self.sweeps],
            "center": self.center, "center_expected": self.center_expected,
            "even_residual": self.even_residual, "positivity_min": self.positivity_min,
            "monotone_violations": self.monotone_violations,
            "verdicts": {k: v.value for k, v in self.verdicts.items()},
            "margins": self.margins, "solver": self.solver,
        }


def plane_positions(u: GridFunction, lo: float, hi: float) -> np.ndarray:
    """Half-grid plane positions strictly inside ``(lo, hi)``."""
    step = 0.5 * u.h
    k0 = math.floor((lo + u.L) / step + 1.0e-9) + 1
    k1 = math.ceil((hi + u.L) / step - 1.0e-9) - 1
    return -u.L + step * np.arange(k0, k1 + 1)


def sweep(u: GridFunction, domain: Domain1D, direction: int) -> SweepTrace:
    """``min v_lam`` for every half-grid plane in ``(m, M)``.

    ``minima`` is taken over the nodes of the reflected cap ``Omega'_lam``
    (NaN when the cap holds no node) and ``behind_minima`` over all of
    ``H'_lam``.
    """
    M = domain.sup if direction > 0 else domain.inf
    m = critical_plane(domain, direction) + 0.0
    lams = plane_positions(u, min(m, M), max(m, M))
    x = u.nodes
    inside = domain.contains(x, margin=1.0e-9 * u.h)
    minima = np.empty(lams.size)
    behind = np.empty(lams.size)
    for i, lam in enumerate(lams):
        pos = PlanePosition(float(lam), direction)
        v = u.values - reflected_values(u, lam)
        sel = pos.behind(x)
        cap = sel & domain.contains(pos.reflect(x), margin=1.0e-9 * u.h) & inside
        behind[i] = float(np.min(v[sel])) if np.any(sel) else 0.0
        minima[i] = float(np.min(v[cap])) if np.any(cap) else np.nan
    return SweepTrace(direction, M, m, lams, minima, behind, _contact_event(domain, m, direction))


def _contact_event(domain: Domain1D, m: float, direction: int) -> str:
    """Which endpoint coincidence stops the plane at ``m``."""
    tol = 1.0e-9 * (domain.sup - domain.inf)
    for a, b in _cap(domain, m, direction):
        for p in (a, b):
            q = 2.0 * m - p
            if abs(q - p) > tol and any(abs(q - e) <= tol for e in domain.endpoints):
                return f"reflected endpoint {p:g} meets the boundary at {q:g}"
    return "plane reaches the middle of the cap component"


def evenness_curve(u: GridFunction, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """``max_x |u(x) - u(2c - x)|`` for every half-grid center ``c`` in ``(lo, hi)``."""
    centers = plane_positions(u, lo, hi)
    res = np.array([float(np.max(np.abs(u.values - reflected_values(u, c)))) for c in centers])
    return centers, res


def parallel_surface_experiment(G: Domain1D, R: float, f: Nonlinearity, order: FracOrder,
                                cfg: MovingPlaneConfig | None = None) -> MovingPlaneReport:
    """Solve ``(-Delta)^s u = f(u)`` in ``G + (-R, R)`` and run the moving-plane checks.

    The overdetermined condition asks ``u`` to be constant on the boundary
    of ``G``. When it holds within ``gap_factor`` solver tolerances, the
    one-dimensional conclusions are checked: ``u`` even about a single
    center, positive, strictly monotone away from it, and ``Omega``
    connected. Otherwise the conclusions are not applicable and the gap is
    reported.
    """
    cfg = cfg or MovingPlaneConfig()
    if order.n != 1:
        raise ConfigError("moving planes are implemented in one dimension")
    omega = Domain1D.minkowski(G, R)
    scfg = cfg.solve_config(omega)
    op = assemble(omega, order, 0.0, scfg)
    res = solve_semilinear(omega, order, f, scfg, op=op)
    u = res.u
    x = u.nodes
    inside = omega.contains(x, margin=1.0e-9 * cfg.h)

    # overdetermined gap on the boundary of G
    bvals = [(p, float(np.interp(p, x, u.values))) for p in G.endpoints]
    vals = np.array([v for _, v in bvals])
    gap = float(vals.max() - vals.min())
    gap_tol = cfg.gap_factor * scfg.newton_tol
    overdetermined = gap <= gap_tol

    sweeps = [sweep(u, omega, +1), sweep(u, omega, -1)]
    worst = min(t.worst for t in sweeps)

    # evenness about the best half-grid center
    centers, curve = evenness_curve(u, omega.inf, omega.sup)
    i = int(np.argmin(curve))
    center, even_res = float(centers[i]), float(curve[i])
    expected = 0.5 * (G.inf + G.sup) if len(G.components) == 1 else None

    pos_min = float(np.min(u.values[inside]))
    right = inside & (x > center)
    left = inside & (x < center)
    du_r = np.diff(u.values[right])
    du_l = np.diff(u.values[left])
    mono_bad = int(np.sum(du_r >= 0.0) + np.sum(du_l <= 0.0))

    even_tol = cfg.gap_factor * scfg.newton_tol
    verdicts: dict[str, Verdict] = {}
    verdicts["overdetermined"] = Verdict.HOLDS if overdetermined else Verdict.FAILS
    verdicts["sweep"] = Verdict.HOLDS if worst >= -cfg.sign_tol else Verdict.FAILS
    if overdetermined:
        verdicts["even"] = Verdict.HOLDS if even_res <= even_tol else Verdict.FAILS
        verdicts["positive"] = Verdict.HOLDS if pos_min > 0.0 else Verdict.FAILS
        verdicts["monotone"] = Verdict.HOLDS if mono_bad == 0 else Verdict.FAILS
        verdicts["single_component"] = (Verdict.HOLDS if len(omega.components) == 1
                                        else Verdict.FAILS)
    else:
        for key in ("even", "positive", "monotone", "single_component"):
            verdicts[key] = Verdict.NOT_APPLICABLE
    margins = {"gap": gap_tol - gap, "sweep": worst + cfg.sign_tol,
               "even": even_tol - even_res, "positive": pos_min}
    log.info("moving planes on %s: gap %.3e, center %.6g, even residual %.3e",
             omega, gap, center, even_res)
    return MovingPlaneReport(G, float(R), omega, u, bvals, gap, gap_tol, sweeps, center, expected,
                             np.column_stack([centers, curve]), even_res, pos_min, mono_bad,
                             verdicts, margins,
                             {"method": res.method, "iterations": res.iterations,
                              "residual": res.residual_history[-1]})


# }}}
