"""The ten acceptance criteria as library functions.

Each ``criterion_k`` returns a :class:`Criterion` with a pass flag and the
measured quantities. ``verify-all`` and the test suite both call
:func:`run_all`.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checks import (
    BarrierConfig,
    Verdict,
    barrier_build,
    eigen_bound,
    harnack_violation_search,
    hopf_control_problem,
    hopf_growth,
    hopf_semilinear_problem,
    hopf_torsion_problem,
    hopf_zeta_problem,
    random_antisymmetric_problem,
    strong_mp_check,
    strong_mp_counterexample_search,
    weak_mp_check,
)
from .errors import ConfigError
from .explicit import (
    FIGURE_EPS,
    c0,
    edge_profile,
    grid_min,
    harnack_poly,
    ratio_deviation,
    touching_poly,
    zeta1,
)
from .kernel import (
    FracOrder,
    QuadConfig,
    ball_profile,
    frac_laplacian_2d_of_1d,
    frac_laplacian_pointwise,
    kernel_constant_without_pi,
    lorentzian,
    lorentzian_half_laplacian,
)
from .moving_planes import parallel_surface_experiment
from .report import emit_figures
from .solver import (
    Domain1D,
    ExteriorData,
    Nonlinearity,
    SolveConfig,
    assemble,
    smallest_eigenvalue,
    solve_linear,
)

HALF = FracOrder(0.5, 1)
TIME_BUDGET = 600.0


@dataclass
class Criterion:
    number: int
    title: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f} s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "ok": self.ok,
                "seconds": self.seconds, "detail": self.detail}


def _timed(number: int, title: str, body) -> Criterion:
    t0 = time.perf_counter()
    ok, detail = body()
    return Criterion(number, title, bool(ok), detail, time.perf_counter() - t0)


# {{{ 1: polynomials and figures


def criterion_1(out_dir=None) -> Criterion:
    def body():
        detail = {"harnack": {}}
        ok = True
        for e in FIGURE_EPS:
            p = harnack_poly(e)
            top = p.extremize(1.0, 2.0)[2]
            low = p.extremize(0.5, 2.5)[0]
            good = abs(top - 4.0) <= 1e-9 and abs(low - 2 * e) <= 1e-9
            detail["harnack"][f"{e:g}"] = {"max_[1,2]": top, "min_[1/2,5/2]": low, "ok": good}
            ok &= good
        f = touching_poly()
        exact = f.exact(2) == 1 and f.exact(3) == 5
        g1 = grid_min(f, 1.0, 3.0)
        g2 = grid_min(f, 0.0, 1.0, minus_slope=3.0)
        detail["touching"] = {"f(2)": str(f.exact(2)), "f(3)": str(f.exact(3)),
                              "min_[1,3]": g1, "min_[0,1](f-3x)": g2}
        ok &= exact and g1 >= 1.0 and g2 >= 0.0
        target = Path(out_dir) if out_dir else Path(tempfile.mkdtemp(prefix="fraclab-fig-"))
        paths = emit_figures(target)
        detail["figures"] = [str(p) for p in paths]
        ok &= all(p.exists() and p.stat().st_size > 0 for p in paths)
        return ok, detail

    return _timed(1, "counter-example polynomials and figures", body)


# }}}


# {{{ 2: kernel constant


def criterion_2() -> Criterion:
    def body():
        quad = QuadConfig(tol=1.0e-6)
        u = lorentzian()
        xs = np.linspace(-2.0, 2.0, 41)
        err = max(abs(frac_laplacian_pointwise(u, x, HALF, quad) - lorentzian_half_laplacian(x)) for x in xs)
        ball = ball_profile(0.5)
        xb = np.linspace(-0.9, 0.9, 19)
        vals = np.array([frac_laplacian_pointwise(ball, x, HALF, quad) for x in xb])
        dev = float(np.max(np.abs(vals - 1.0)))
        # informational: the constant without pi^(n/2), and the 1D/2D ratio for a profile in x1 only
        tens = {f"{x:g}": frac_laplacian_2d_of_1d(u, x, 0.5, quad) / frac_laplacian_pointwise(u, x, HALF, quad)
                for x in (0.0, 0.5, 2.0)}
        return err <= 1e-4 and dev <= 0.01, {"lorentzian_sup_error": err, "ball_max_rel_dev": dev,
                                             "kernel_constant": HALF.constant,
                                             "kernel_constant_without_pi": kernel_constant_without_pi(HALF),
                                             "tensorization_ratio": tens}

    return _timed(2, "kernel constant oracle", body)


# }}}


# {{{ 3: Poisson cross-validation


def zeta1_solver_error(h: float, order: FracOrder = HALF, L: float = 2.0) -> float:
    """Sup over interior nodes of the solver solution with datum ``sign(x)`` minus the formula."""
    op = assemble(Domain1D.interval(-1.0, 1.0), order, 0.0, SolveConfig(h=h, L=L))
    u = solve_linear(op, 0.0, ExteriorData.odd_step(1.0))
    x = op.x
    return float(np.max(np.abs(u.values[op.interior] - zeta1(x, order))))


def criterion_3() -> Criterion:
    def body():
        e1, e2 = zeta1_solver_error(1.0e-3), zeta1_solver_error(5.0e-4)
        c = c0(HALF)
        devs = [ratio_deviation(R, HALF) for R in (10.0, 20.0, 40.0, 80.0)]
        ratios = [a / b for a, b in zip(devs, devs[1:])]
        ok = e1 <= 1e-2 and e1 / e2 >= 1.5 and abs(c - 2 / math.pi) <= 1e-6
        ok &= all(3.5 <= r <= 4.5 for r in ratios)
        return ok, {"sup_error_h": e1, "sup_error_h/2": e2, "refinement_ratio": e1 / e2,
                    "c0": c, "deviations": devs, "R_ratios": ratios, "zeta1_edge": edge_profile(HALF)}

    return _timed(3, "Poisson cross-validation", body)


# }}}


# {{{ 4: eigenvalue bound


def three_digits_agree(values) -> bool:
    """Spread within half a unit of the third significant digit."""
    ref = max(abs(v) for v in values)
    unit = 10.0 ** (math.floor(math.log10(ref)) - 2)
    return max(values) - min(values) <= 0.5 * unit


def criterion_4() -> Criterion:
    def body():
        dom = Domain1D.interval(-1.0, 1.0)
        detail = {}
        ok = True
        for s in (0.3, 0.5, 0.7):
            o = FracOrder(s)
            lams = [smallest_eigenvalue(assemble(dom, o, 0.0, SolveConfig(h=h, L=1.0))).value
                    for h in (4e-3, 2e-3, 1e-3)]
            bound = eigen_bound(o, dom.measure)
            gap = min(lams) / bound - 1.0
            detail[f"s={s:g}"] = {"lambda1": lams, "bound": bound, "relative_gap": gap}
            ok &= gap > 0.10
            if s == 0.5:
                ok &= abs(bound - 2 / math.pi) <= 1e-10 and three_digits_agree(lams)
                detail[f"s={s:g}"]["three_digits"] = three_digits_agree(lams)
        return ok, detail

    return _timed(4, "eigenvalue bound", body)


# }}}


# {{{ 5: maximum principles


def criterion_5(trials: int = 100, seed: int = 0) -> Criterion:
    def body():
        rng = np.random.default_rng(seed)
        counts = {"weak_sub": 0, "weak_super": 0, "strong": 0}
        violations, skipped, not_positive = [], 0, 0
        for k in range(trials):
            for kind in ("sub", "super"):
                u, op = random_antisymmetric_problem(rng, HALF, kind)
                r = weak_mp_check(u, op, kind)
                counts[f"weak_{kind}"] += 1
                if r.verdict == Verdict.FAILS:
                    violations.append((k, kind, r.to_dict()))
                elif r.verdict == Verdict.NOT_APPLICABLE:
                    skipped += 1
            u, op = random_antisymmetric_problem(rng, HALF, "super", positive_data=True)
            r = strong_mp_check(u, op)
            counts["strong"] += 1
            if r.verdict == Verdict.FAILS:
                violations.append((k, "strong", r.to_dict()))
            elif r.verdict == Verdict.NOT_APPLICABLE:
                skipped += 1
            elif r.detail.get("branch") == "positive" and r.margin <= 0:
                not_positive += 1
        ok = not violations and not_positive == 0 and skipped == 0
        return ok, {"counts": counts, "violations": violations, "not_applicable": skipped,
                    "not_positive": not_positive}

    return _timed(5, "maximum principles", body)


# }}}


# {{{ 6: Hopf growth


def criterion_6() -> Criterion:
    def body():
        s75 = FracOrder(0.75)
        probs = [hopf_zeta_problem(HALF), hopf_torsion_problem(s75),
                 hopf_semilinear_problem(s75, Nonlinearity.affine(1.0, 0.5))]
        reps = [hopf_growth(p) for p in probs]
        control = hopf_growth(hopf_control_problem(HALF))
        ok = all(r.verdict == Verdict.HOLDS for r in reps) and control.verdict == Verdict.FAILS
        return ok, {"configurations": [r.to_dict() for r in reps], "control": control.to_dict()}

    return _timed(6, "Hopf growth", body)


# }}}


# {{{ 7: barrier


def criterion_7() -> Criterion:
    def body():
        specs = [barrier_build(1.0, c, HALF, BarrierConfig()) for c in (0.0, 1.0, 5.0)]
        alphas = [b.alpha for b in specs]
        ok = all(b.verdict == Verdict.HOLDS and math.isfinite(b.alpha) and b.margin <= 0
                 and b.slope_at_0 > 0 for b in specs)
        ok &= all(a <= b for a, b in zip(alphas, alphas[1:]))
        return ok, {"barriers": [b.to_dict() for b in specs], "alphas": alphas}

    return _timed(7, "barrier construction", body)


# }}}


# {{{ 8: Harnack failure


def criterion_8() -> Criterion:
    def body():
        res = harnack_violation_search(100.0, HALF)
        best = res.best
        ok = res.found and best is not None and best.quotient >= 100 and best.positive
        return ok, {"found": res.found, "best": None if best is None else vars(best),
                    "n_trials": len(res.trials)}

    return _timed(8, "Harnack failure", body)


# }}}


# {{{ 9: strong-MP counter-example


def criterion_9() -> Criterion:
    def body():
        run = strong_mp_counterexample_search(HALF)
        ok = (run.verdict == Verdict.HOLDS and run.u_min_half >= -1e-8 and abs(run.u_min_scan) <= 1e-6
              and run.u_max > 0 and run.lipschitz_ok)
        return ok, run.to_dict()

    return _timed(9, "strong-MP counter-example", body)


# }}}


# {{{ 10: moving planes


def criterion_10() -> Criterion:
    def body():
        G1 = Domain1D.interval(-1.0, 1.0)
        sym = parallel_surface_experiment(G1, 1.0, Nonlinearity.constant(1.0), HALF)
        asym = parallel_surface_experiment(Domain1D(((-1.0, 1.0), (2.0, 5.0))), 0.5,
                                           Nonlinearity.constant(1.0), HALF)
        nonlin = parallel_surface_experiment(G1, 1.0, Nonlinearity.affine(1.0, 0.5), HALF)
        h = sym.u.h
        ok_sym = (sym.even_residual <= sym.gap_tol and abs(sym.center - 0.0) <= h
                  and sym.verdicts["sweep"] == Verdict.HOLDS)
        ok_asym = asym.gap > asym.gap_tol
        ok_nl = all(nonlin.verdicts[k] == Verdict.HOLDS for k in ("even", "positive", "monotone"))
        return ok_sym and ok_asym and ok_nl, {"symmetric": sym.to_dict(), "two_component": asym.to_dict(),
                                              "nonlinear": nonlin.to_dict()}

    return _timed(10, "moving planes", body)


# }}}


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_criterion(k: int, out_dir=None, seed: int = 0) -> Criterion:
    if k == 1:
        return criterion_1(out_dir)
    if k == 5:
        return criterion_5(seed=seed)
    return CRITERIA[k]()


def run_all(out_dir=None, only=None, echo=None, seed: int = 0) -> tuple[list[Criterion], float]:
    """Run the selected criteria in order; returns the results and the wall time."""
    t0 = time.perf_counter()
    results = []
    for k in sorted(only or CRITERIA):
        if k not in CRITERIA:
            raise ConfigError(f"no acceptance criterion {k}")
        res = run_criterion(k, out_dir, seed)
        if echo:
            echo(res.line())
        results.append(res)
    return results, time.perf_counter() - t0
