import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclab.checks import (
    BarrierConfig,
    CounterexampleConfig,
    HarnackConfig,
    ThreePieceFamily,
    Verdict,
    barrier_build,
    barrier_check_nodes,
    choose_R,
    eigen_bound,
    harnack_violation_search,
    hopf_control_problem,
    hopf_growth,
    hopf_semilinear_problem,
    hopf_torsion_problem,
    hopf_zeta_problem,
    interior_zero_certificate,
    plateau,
    random_antisymmetric_problem,
    strong_mp_check,
    strong_mp_counterexample_search,
    weak_mp_check,
    zeta_bounds_hold,
    zeta_cutoff,
)
from fraclab.errors import ConfigError, PreconditionError
from fraclab.explicit import c0
from fraclab.kernel import ClosedForm, FracOrder, GridFunction, Tail
from fraclab.solver import Domain1D, Nonlinearity, SolveConfig, assemble, smallest_eigenvalue, solve_linear

HALF = FracOrder(0.5)


# {{{ maximum principles


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.5, 0.7]), st.sampled_from(["sub", "super"]))
@settings(max_examples=15)
def test_weak_mp_random(seed, s, kind):
    u, op = random_antisymmetric_problem(np.random.default_rng(seed), FracOrder(s), kind)
    res = weak_mp_check(u, op, kind)
    assert res.verdict is Verdict.HOLDS
    assert res.margin >= -1e-6


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.5, 0.7]))
@settings(max_examples=15)
def test_strong_mp_random(seed, s):
    u, op = random_antisymmetric_problem(np.random.default_rng(seed), FracOrder(s), "super",
                                         positive_data=True)
    res = strong_mp_check(u, op)
    assert res.verdict is not Verdict.FAILS
    if res.verdict is Verdict.HOLDS and res.detail["branch"] == "positive":
        assert res.margin > 0


def _odd_problem(c=0.0):
    dom = Domain1D(((-2.0, -0.5), (0.5, 2.0)))
    return assemble(dom, HALF, c, SolveConfig(h=0.05, L=3.0))


def test_weak_mp_not_a_subsolution():
    op = _odd_problem()
    u = solve_linear(op, lambda x: math.copysign(1.0, x), antisymmetric=True)
    res = weak_mp_check(u, op, "sub")
    assert res.verdict is Verdict.NOT_APPLICABLE and "subsolution" in res.detail["reason"]
    assert weak_mp_check(u, op, "super").verdict is Verdict.HOLDS


def test_weak_mp_negative_potential():
    op = _odd_problem(-1.0)
    u = solve_linear(op, 0.0, antisymmetric=True)
    assert weak_mp_check(u, op).verdict is Verdict.NOT_APPLICABLE


def test_strong_mp_zero_branch():
    op = _odd_problem()
    u = solve_linear(op, 0.0, antisymmetric=True)
    res = strong_mp_check(u, op)
    assert res.verdict is Verdict.HOLDS and res.detail["branch"] == "zero"


def test_strong_mp_negative_input():
    op = _odd_problem()
    u = solve_linear(op, lambda x: -math.copysign(1.0, x), antisymmetric=True)
    assert strong_mp_check(u, op).verdict is Verdict.NOT_APPLICABLE


def test_mp_checks_reject_bad_setup():
    op = _odd_problem()
    even = GridFunction.from_function(lambda x: 1.0, 3.0, 0.05, Tail.constant(1.0, 1.0))
    with pytest.raises(ConfigError):
        weak_mp_check(even, op)
    u = solve_linear(op, 0.0, antisymmetric=True)
    with pytest.raises(ConfigError):
        weak_mp_check(u, op, "both")
    lopsided = assemble(Domain1D.interval(0.5, 2.0), HALF, 0.0, SolveConfig(h=0.05, L=3.0))
    with pytest.raises(ConfigError):
        strong_mp_check(u, lopsided)


def test_interior_zero_certificate():
    u = ClosedForm(lambda x: math.copysign(1, x) * (abs(x) - 1) ** 2 * math.exp(-x * x), "double zero")
    val = interior_zero_certificate(u, 1.0, HALF)
    assert val == pytest.approx(-0.21303869323846233, rel=1e-6)
    with pytest.raises(PreconditionError):
        interior_zero_certificate(u, 0.5, HALF)


# }}}


# {{{ Hopf


S_HOPF = FracOrder(0.75)


def test_hopf_zeta_limit_is_slope():
    r = hopf_growth(hopf_zeta_problem(S_HOPF))
    assert r.verdict is Verdict.HOLDS
    # zeta_R'(0) = c_0 zeta_R(x)/(c_0 x) at x -> 0
    assert r.limit == pytest.approx(c0(S_HOPF), rel=0.05)
    assert r.spread < 1e-5


def test_hopf_control_fails():
    r = hopf_growth(hopf_control_problem(S_HOPF))
    assert r.verdict is Verdict.FAILS
    assert r.reason == "quotients unstable under refinement"


def test_hopf_torsion_holds():
    r = hopf_growth(hopf_torsion_problem(S_HOPF))
    assert r.verdict is Verdict.HOLDS and r.limit > 1.0
    assert len(r.samples) == 9


def test_hopf_semilinear_holds():
    r = hopf_growth(hopf_semilinear_problem(S_HOPF, Nonlinearity.affine(1.0, 0.5)))
    assert r.verdict is Verdict.HOLDS


def test_hopf_rejects_negative():
    r = hopf_growth(hopf_semilinear_problem(S_HOPF, Nonlinearity.constant(-1.0)))
    assert r.verdict is Verdict.NOT_APPLICABLE


# }}}


# {{{ barrier


def test_barrier_pieces():
    x = np.linspace(-3, 3, 601)
    assert np.all(zeta_cutoff(x[np.abs(x) >= 2], 1.0) == 0)
    np.testing.assert_allclose(zeta_cutoff(-x, 1.0), -zeta_cutoff(x, 1.0))
    p = plateau(x, 1.0)
    assert np.all(p[np.abs(x - 1) <= 0.25] == 1.0)
    assert np.all(p[np.abs(np.abs(x) - 1) >= 0.375] == 0.0)
    np.testing.assert_allclose(plateau(-x, 1.0), -p)


def test_barrier_check_nodes():
    x = barrier_check_nodes(1.0, 40)
    assert x.size == 40
    assert np.all((x > 0) & (x < 2)) and not np.any((x > 0.5) & (x < 1.5))


@pytest.mark.parametrize("c_bound, alpha", [(0.0, 0.5711955005244818), (1.0, 0.9928608380141668),
                                             (5.0, 2.67952218814753)])
def test_barrier_frozen_alpha(c_bound, alpha):
    b = barrier_build(1.0, c_bound, HALF)
    assert b.verdict is Verdict.HOLDS
    assert b.alpha == pytest.approx(alpha, rel=1e-8)
    assert b.margin <= 0 and b.margin_half > 0
    assert b.slope_at_0 == pytest.approx(0.41428441993444903, rel=1e-6)


def test_barrier_alpha_grows_with_c():
    a = [barrier_build(1.0, c, HALF).alpha for c in (0.0, 0.5, 1.0, 2.0)]
    assert a == sorted(a)


def test_barrier_cap_reached():
    b = barrier_build(1.0, 5.0, HALF, BarrierConfig(alpha_cap=1.5))
    assert b.verdict is Verdict.FAILS and math.isinf(b.alpha)


def test_barrier_rejects():
    with pytest.raises(ConfigError):
        barrier_build(0.0, 0.0, HALF)
    with pytest.raises(ConfigError):
        barrier_build(1.0, -1.0, HALF)


# }}}


# {{{ Harnack and the counter-example


def test_three_piece_family_supports():
    fam = ThreePieceFamily(2.5)
    near, mid, far = fam.pieces()
    x = np.array([2.5, 2.75, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.5])
    assert np.all(near.sample(x)[x >= 3.0] == 0)
    assert np.all(mid.sample(x)[(x <= 3.0) | (x >= 4.0)] == 0)
    assert far.sample(np.array([7.0]))[0] == 1.0
    assert fam.support == 9.0
    np.testing.assert_allclose(fam.data(1, 2, 3).sample(-x), -fam.data(1, 2, 3).sample(x))


def test_harnack_frozen():
    r = harnack_violation_search(100.0, HALF)
    assert r.found
    assert (r.best.a, r.best.b, r.best.eps) == (0.5, 2.0, 1e-4)
    assert r.best.t == pytest.approx(2.1289390620215696, rel=1e-9)
    assert r.best.quotient == pytest.approx(842.2750467493113, rel=1e-6)
    assert r.best.min_on_omega > 0


def test_harnack_target_unreached():
    r = harnack_violation_search(1e9, HALF, HarnackConfig(eps_values=(1e-1, 1e-2)))
    assert not r.found and r.best is not None


def test_harnack_rejects_C():
    with pytest.raises(ConfigError):
        harnack_violation_search(1.0, HALF)


def test_zeta_bounds_and_R():
    assert zeta_bounds_hold(8.0, HALF) and not zeta_bounds_hold(4.0, HALF)
    assert choose_R(HALF) == 8.0
    with pytest.raises(PreconditionError):
        choose_R(HALF, max_power=2)


def test_counterexample_frozen():
    run = strong_mp_counterexample_search(HALF)
    assert run.verdict is Verdict.HOLDS
    assert run.R == 8.0 and run.x_star == pytest.approx(2.66)
    assert run.t_star == pytest.approx(0.3232591271596448, rel=1e-9)
    assert run.u_max == pytest.approx(0.012370758192217002, rel=1e-6)
    assert run.params["scale"] == pytest.approx(17.95674576239557, rel=1e-9)
    assert run.u_min_half >= -1e-8 and abs(run.u_min_scan) <= 1e-6
    assert run.lipschitz_ok and run.monotone_ok


def test_counterexample_search_can_fail():
    run = strong_mp_counterexample_search(HALF, CounterexampleConfig(scan=(3.5, 3.9)))
    assert run.verdict is Verdict.NOT_APPLICABLE and "search failed" in run.reason


# }}}


# {{{ eigenvalue bound


def test_eigen_bound_values():
    assert eigen_bound(HALF, 2.0) == pytest.approx(2 / math.pi, rel=1e-12)
    assert eigen_bound(FracOrder(0.5, 2), 1.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    with pytest.raises(ConfigError):
        eigen_bound(HALF, 0.0)


@given(st.floats(0.05, 0.95), st.floats(0.1, 10.0))
def test_eigen_bound_halving(s, m):
    o = FracOrder(s)
    assert eigen_bound(o, m / 2) == pytest.approx(2 ** (2 * s) * eigen_bound(o, m), rel=1e-12)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_discrete_eigenvalue_above_bound(s):
    o = FracOrder(s)
    op = assemble(Domain1D.interval(-1, 1), o, 0.0, SolveConfig(h=0.01, L=1.0))
    assert smallest_eigenvalue(op).value >= eigen_bound(o, 2.0)


# }}}
