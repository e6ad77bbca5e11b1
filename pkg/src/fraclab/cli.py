"""Command-line front end.

Every subcommand writes ``report.json`` (resolved config, version and
results) plus CSV/SVG artifacts into ``--out``. Exit codes: 0 success,
1 verification failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError, PreconditionError
from .kernel import FracOrder, QuadConfig

log = logging.getLogger("fraclab")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = ("eval", "energy", "solve", "eigen", "poisson", "poly", "figures", "harnack",
            "strong-mp", "hopf", "barrier", "moving-plane", "verify-all")


# {{{ configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    s: float = 0.5
    h: float | None = None
    L: float | None = None
    domain: str | None = None
    eps: float | None = None
    R: float | None = None
    tol: float = 1.0e-6
    out: str = "fraclab_out"
    seed: int = 0
    profile: str = "lorentzian"
    x: str = "0"
    extremize: bool = False
    f: str = "const1"
    coeffs: str | None = None
    exterior: str = "zero"
    rho: float = 1.0
    c_bound: float = 0.0
    C: float = 100.0
    only: str | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 0.0 < self.s < 1.0:
            raise ConfigError(f"s must lie in (0, 1): {self.s}")
        for name in ("h", "L", "R", "tol", "rho"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"{name} must be positive: {v}")
        if self.eps is not None and not 0.0 < self.eps < 1.0:
            raise ConfigError(f"eps must lie in (0, 1): {self.eps}")
        if self.c_bound < 0:
            raise ConfigError(f"c_bound must be nonnegative: {self.c_bound}")
        if self.f not in ("const1", "linear", "affine", "poly"):
            raise ConfigError(f"unknown nonlinearity {self.f!r}")
        if self.f == "poly" and not self.coeffs:
            raise ConfigError("--f poly needs --coeffs")
        if self.exterior not in ("zero", "step"):
            raise ConfigError(f"unknown exterior datum {self.exterior!r}")

    @property
    def order(self) -> FracOrder:
        return FracOrder(self.s, 1)

    def points(self) -> list[float]:
        try:
            return [float(v) for v in self.x.split(",")]
        except ValueError as exc:
            raise ConfigError(f"cannot parse points {self.x!r}") from exc

    def nonlinearity(self):
        from .solver import PRESETS, Nonlinearity

        if self.f == "poly":
            try:
                coeffs = [float(c) for c in self.coeffs.split(",")]
            except ValueError as exc:
                raise ConfigError(f"cannot parse coefficients {self.coeffs!r}") from exc
            return Nonlinearity.polynomial(coeffs)
        return PRESETS[self.f]()


CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"command"}


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    given = {k: v for k, v in vars(args).items() if k in CONFIG_KEYS}
    merged = load_config_file(args.config) if getattr(args, "config", None) else {}
    merged.update(given)
    try:
        return RunConfig(command=args.command, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", type=float, default=S, help="fractional order in (0, 1)")
    common.add_argument("--h", type=float, default=S, help="grid spacing")
    common.add_argument("--L", type=float, default=S, help="half-width of the truncation box")
    common.add_argument("--domain", default=S, help="intervals 'a,b[;a2,b2]'")
    common.add_argument("--eps", type=float, default=S)
    common.add_argument("--R", type=float, default=S)
    common.add_argument("--tol", type=float, default=S, help="quadrature tolerance")
    common.add_argument("--out", default=S, help="output directory")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--config", default=None, help="JSON file with flat keys")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fraclab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fraclab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    cmds = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}

    cmds["eval"].add_argument("--profile", choices=("lorentzian", "ball", "bump"), default=S)
    cmds["eval"].add_argument("--x", default=S, help="comma-separated points")
    cmds["energy"].add_argument("--profile", choices=("ball", "bump"), default=S)
    for name in ("solve", "moving-plane", "hopf"):
        cmds[name].add_argument("--f", choices=("const1", "linear", "affine", "poly"), default=S)
        cmds[name].add_argument("--coeffs", default=S, help="polynomial coefficients, low order first")
    cmds["solve"].add_argument("--exterior", choices=("zero", "step"), default=S)
    cmds["poisson"].add_argument("--x", default=S)
    cmds["poly"].add_argument("--x", default=S)
    cmds["poly"].add_argument("--extremize", action="store_true", default=S)
    cmds["barrier"].add_argument("--rho", type=float, default=S)
    cmds["barrier"].add_argument("--c-bound", dest="c_bound", type=float, default=S)
    cmds["harnack"].add_argument("--C", type=float, default=S, help="target Harnack quotient")
    cmds["verify-all"].add_argument("--only", default=S, help="comma-separated criterion numbers")
    return p


# }}}


# {{{ subcommands


def _grid(cfg: RunConfig, domain, h_default: float = 0.01):
    from .solver import SolveConfig

    h = cfg.h or h_default
    L = cfg.L or max(1.0, np.ceil((domain.radius + 0.25) / h) * h)
    return SolveConfig(h=h, L=L, quad=QuadConfig(tol=cfg.tol))


def cmd_eval(cfg: RunConfig, out: Path):
    from .kernel import ball_profile, ball_profile_laplacian, bump, ClosedForm
    from .kernel import frac_laplacian_pointwise, kernel_constant_without_pi, lorentzian
    from .kernel import lorentzian_half_laplacian

    o = cfg.order
    if cfg.profile == "lorentzian":
        u, exact = lorentzian(), (lorentzian_half_laplacian if cfg.s == 0.5 else None)
    elif cfg.profile == "ball":
        C = ball_profile_laplacian(o)
        u, exact = ball_profile(cfg.s), (lambda x: C if abs(x) < 1 else None)
    else:
        u, exact = ClosedForm(lambda x: float(bump(x)), "bump", (-1.0, 1.0)), None
    rows = []
    for x in cfg.points():
        val = frac_laplacian_pointwise(u, x, o, QuadConfig(tol=cfg.tol))
        ref = exact(x) if exact else None
        print(f"x={x:g}  (-Delta)^{cfg.s:g} u = {val:.6f}" + ("" if ref is None else f"  (closed form {ref:.6f})"))
        rows.append({"x": x, "value": val, "closed_form": ref})
    return {"profile": cfg.profile, "points": rows, "kernel_constant": o.constant,
            "kernel_constant_without_pi": kernel_constant_without_pi(o)}, True


def cmd_energy(cfg: RunConfig, out: Path):
    from .kernel import GridFunction, ball_profile, bump, gagliardo_energy
    from .solver import Domain1D, SolveConfig, assemble

    h, L = cfg.h or 0.01, cfg.L or 2.0
    prof = ball_profile(cfg.s) if cfg.profile != "bump" else (lambda x: float(bump(x)))
    u = GridFunction.from_function(prof, L, h)
    E = gagliardo_energy(u, u, cfg.order)
    op = assemble(Domain1D.interval(-L, L), cfg.order, 0.0, SolveConfig(h=h, L=L))
    pairing = float(h * u.values[op.interior] @ op.apply_grid(u))
    print(f"E(u,u) = {E:.6f}   sum u (A u) h = {pairing:.6f}")
    return {"profile": cfg.profile, "energy": E, "operator_pairing": pairing}, E >= 0


def cmd_solve(cfg: RunConfig, out: Path):
    from .solver import Domain1D, ExteriorData, assemble, solve_linear, solve_semilinear

    dom = Domain1D.parse(cfg.domain or "-1,1")
    scfg = _grid(cfg, dom) if cfg.exterior == "zero" else _grid(cfg, dom.minkowski(dom, cfg.R or 1.0))
    if cfg.exterior == "step":
        op = assemble(dom, cfg.order, 0.0, scfg)
        u = solve_linear(op, 0.0, ExteriorData.odd_step(cfg.R or 1.0))
        meta = {"exterior": f"odd step {cfg.R or 1.0:g}"}
    else:
        res = solve_semilinear(dom, cfg.order, cfg.nonlinearity(), scfg)
        u = res.u
        meta = {"method": res.method, "iterations": res.iterations, "residuals": res.residual_history}
    u.to_csv(out / "solution.csv")
    print(f"solved on {dom}: max u = {u.values.max():.6f}, min u = {u.values.min():.6f}")
    return {"domain": str(dom), "h": scfg.h, "L": scfg.L, "max": float(u.values.max()), **meta}, True


def cmd_eigen(cfg: RunConfig, out: Path):
    from .checks import eigen_bound
    from .solver import Domain1D, assemble, smallest_eigenvalue

    dom = Domain1D.parse(cfg.domain or "-1,1")
    scfg = _grid(cfg, dom, 2.0e-3)
    res = smallest_eigenvalue(assemble(dom, cfg.order, 0.0, scfg))
    bound = eigen_bound(cfg.order, dom.measure)
    res.vector.to_csv(out / "eigenvector.csv")
    print(f"lambda_1 = {res.value:.6f}   lower bound = {bound:.6f}")
    return {"domain": str(dom), "lambda1": res.value, "bound": bound, "iterations": res.iterations}, \
        res.value >= bound


def cmd_poisson(cfg: RunConfig, out: Path):
    from .explicit import c0, c0_closed_form, edge_profile, zeta_R
    from .report import write_csv

    R = cfg.R or 1.0
    xs = cfg.points()
    vals = [float(zeta_R(x, R, cfg.order)) for x in xs]
    for x, v in zip(xs, vals):
        print(f"zeta_R({x:g}) = {v:.6f}")
    c = c0(cfg.order)
    print(f"c0 = {c:.9f}  (closed form {c0_closed_form(cfg.order):.9f})")
    grid = np.linspace(-1.5 * R, 1.5 * R, 601)
    write_csv(out / "zeta.csv", ["x", "zeta_R"], zip(grid, zeta_R(grid, R, cfg.order)))
    edge = edge_profile(cfg.order)
    print(f"1 - zeta_1(1 - d) ~ d^{edge['exponent']:.4f} as d -> 0")
    return {"R": R, "points": dict(zip(map(str, xs), vals)), "c0": c, "zeta1_edge": edge}, True


def cmd_poly(cfg: RunConfig, out: Path):
    from .explicit import grid_min, harnack_poly, touching_poly

    if cfg.eps is not None:
        p = harnack_poly(cfg.eps)
        res = {"eps": cfg.eps, "coefficients": [str(c) for c in p.coeffs]}
        ok = True
        if cfg.extremize:
            top, at = p.extremize(1.0, 2.0)[2:]
            low, at_low = p.extremize(0.5, 2.5)[:2]
            print(f"max {top:.6f} over [1,2] at x={at:.6f}")
            print(f"min {low:.6f} over [1/2,5/2] at x={at_low:.6f}")
            res.update({"max_[1,2]": top, "min_[1/2,5/2]": low})
            ok = abs(top - 4.0) <= 1e-9 and abs(low - 2 * cfg.eps) <= 1e-9
    else:
        p = touching_poly()
        g1, g2 = grid_min(p, 1.0, 3.0), grid_min(p, 0.0, 1.0, minus_slope=3.0)
        print(f"f(2) = {p.exact(2)}, f(3) = {p.exact(3)}, min_[1,3] f = {g1:.6f}, min_[0,1] (f - 3x) = {g2:.6f}")
        res = {"f(2)": str(p.exact(2)), "f(3)": str(p.exact(3)), "min_[1,3]": g1, "min_[0,1]_f-3x": g2}
        ok = p.exact(2) == 1 and p.exact(3) == 5 and g1 >= 1 and g2 >= 0
    if cfg.x != "0":
        res["values"] = {str(x): float(p(x)) for x in cfg.points()}
        for x, v in res["values"].items():
            print(f"f({x}) = {v:.6f}")
    return res, ok


def cmd_figures(cfg: RunConfig, out: Path):
    from .report import emit_figures

    paths = emit_figures(out)
    for path in paths:
        print(path)
    return {"files": [p.name for p in paths]}, True


def cmd_harnack(cfg: RunConfig, out: Path):
    from .checks import HarnackConfig, harnack_violation_search
    from .report import write_csv

    hc = HarnackConfig(h=cfg.h or HarnackConfig.h)
    res = harnack_violation_search(cfg.C, cfg.order, hc)
    if res.solution is not None:
        res.solution.to_csv(out / "solution.csv")
    write_csv(out / "trials.csv", ["a", "b", "eps", "t", "quotient", "min_on_omega"],
              [(t.a, t.b, t.eps, t.t, t.quotient, t.min_on_omega) for t in res.trials])
    q = res.best.quotient if res.best else float("nan")
    print(f"target {cfg.C:g}: {'found' if res.found else 'not found'}, best quotient {q:.6g}")
    return res.to_dict(), res.found


def cmd_strong_mp(cfg: RunConfig, out: Path):
    from .checks import CounterexampleConfig, Verdict, strong_mp_counterexample_search
    from .report import write_csv

    cc = CounterexampleConfig(h=cfg.h or CounterexampleConfig.h)
    run = strong_mp_counterexample_search(cfg.order, cc)
    write_csv(out / "m_of_t.csv", ["t", "m"], zip(run.t_grid, run.m_samples))
    if run.v is not None and run.u is not None:
        write_csv(out / "u.csv", ["x", "u"], zip(run.v.nodes, run.u))
    print(f"verdict {run.verdict.value}: t* = {run.t_star:.6g}, x* = {run.x_star:.6g}, "
          f"min on [1,3] = {run.u_min_scan:.3e}")
    return run.to_dict(), run.verdict == Verdict.HOLDS


def cmd_hopf(cfg: RunConfig, out: Path):
    from .checks import (Verdict, hopf_control_problem, hopf_growth, hopf_semilinear_problem,
                         hopf_torsion_problem, hopf_zeta_problem)
    from .report import write_csv

    o = cfg.order
    probs = [hopf_zeta_problem(o, cfg.R or 8.0), hopf_torsion_problem(o),
             hopf_semilinear_problem(o, cfg.nonlinearity())]
    reps = [hopf_growth(p) for p in probs]
    control = hopf_growth(hopf_control_problem(o))
    for r in reps + [control]:
        print(f"{r.name}: limit {r.limit:.6g}, spread {r.spread:.3g}, {r.verdict.value} {r.reason}")
        stem = re.sub(r"[^A-Za-z0-9.=]+", "_", r.name).strip("_")
        write_csv(out / f"hopf_{stem}.csv", ["h", "d", "quotient"], [(p.h, p.d, p.quotient) for p in r.samples])
    ok = all(r.verdict == Verdict.HOLDS for r in reps) and control.verdict == Verdict.FAILS
    return {"configurations": [r.to_dict() for r in reps], "control": control.to_dict()}, ok


def cmd_barrier(cfg: RunConfig, out: Path):
    from .checks import BarrierConfig, Verdict, barrier_build
    from .report import write_csv

    spec = barrier_build(cfg.rho, cfg.c_bound, cfg.order, BarrierConfig())
    if spec.profile.size:
        x, Lz, Le, z, e = spec.profile.T
        phi = z + spec.alpha * e
        res = Lz + spec.alpha * Le + spec.c_bound * np.abs(phi)
        write_csv(out / "barrier.csv", ["x", "frac_lap_cutoff", "frac_lap_plateau", "cutoff", "plateau",
                                        "phi", "residual"], np.column_stack([spec.profile, phi, res]))
    print(f"alpha = {spec.alpha:.6g}, margin = {spec.margin:.3e}, slope at 0 = {spec.slope_at_0:.6g}, "
          f"{spec.verdict.value}")
    return spec.to_dict(), spec.verdict == Verdict.HOLDS


def cmd_moving_plane(cfg: RunConfig, out: Path):
    from .checks import Verdict
    from .moving_planes import MovingPlaneConfig, parallel_surface_experiment
    from .report import write_csv
    from .solver import Domain1D

    G = Domain1D.parse(cfg.domain or "-1,1")
    rep = parallel_surface_experiment(G, cfg.R or 1.0, cfg.nonlinearity(), cfg.order,
                                      MovingPlaneConfig(h=cfg.h or 0.01))
    rep.u.to_csv(out / "u.csv")
    for t in rep.sweeps:
        name = "right" if t.direction > 0 else "left"
        write_csv(out / f"sweep_{name}.csv", ["lambda", "min_v_reflected_cap", "min_v_behind"],
                  zip(t.lams, t.minima, t.behind_minima))
    write_csv(out / "evenness.csv", ["center", "residual"], rep.residual_curve)
    print(f"Omega = {rep.omega}; gap {rep.gap:.3e}; center {rep.center:.6g}; even residual {rep.even_residual:.3e}")
    for k, v in rep.verdicts.items():
        print(f"  {k}: {v.value}")
    return rep.to_dict(), all(v != Verdict.FAILS for k, v in rep.verdicts.items() if k != "overdetermined")


def cmd_verify_all(cfg: RunConfig, out: Path):
    from .acceptance import TIME_BUDGET, run_all

    try:
        only = [int(k) for k in cfg.only.split(",")] if cfg.only else None
    except ValueError as exc:
        raise ConfigError(f"cannot parse --only {cfg.only!r}") from exc
    results, wall = run_all(out / "figures", only, echo=print, seed=cfg.seed)
    ok = all(r.ok for r in results) and (only is not None or wall <= TIME_BUDGET)
    print(f"{sum(r.ok for r in results)}/{len(results)} criteria passed in {wall:.1f} s")
    # timings stay out of the report so that reruns are byte-identical
    return {"criteria": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]}, ok


HANDLERS = {"eval": cmd_eval, "energy": cmd_energy, "solve": cmd_solve, "eigen": cmd_eigen,
            "poisson": cmd_poisson, "poly": cmd_poly, "figures": cmd_figures, "harnack": cmd_harnack,
            "strong-mp": cmd_strong_mp, "hopf": cmd_hopf, "barrier": cmd_barrier,
            "moving-plane": cmd_moving_plane, "verify-all": cmd_verify_all}


# }}}


def run(argv=None) -> int:
    from .report import write_report

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        results, ok = HANDLERS[cfg.command](cfg, out)
        write_report(out / "report.json", cfg.command, asdict(cfg), results, ok)
    except (ConfigError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if ok else EXIT_VERIFY


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
