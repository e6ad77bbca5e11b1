import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclab.errors import ConfigError
from fraclab.explicit import zeta_R
from fraclab.kernel import (
    ClosedForm,
    FracOrder,
    GridFunction,
    QuadConfig,
    Tail,
    ball_profile,
    frac_laplacian_pointwise,
    grid_size,
)
from fraclab.solver import (
    Domain1D,
    ExteriorData,
    Nonlinearity,
    SolveConfig,
    assemble,
    smallest_eigenvalue,
    solve_linear,
    solve_many,
    solve_semilinear,
)

HALF = FracOrder(0.5)
UNIT = Domain1D.interval(-1.0, 1.0)


# {{{ domains


def test_domain_parse_and_measure():
    d = Domain1D.parse("-1,1;2,5")
    assert d.components == ((-1.0, 1.0), (2.0, 5.0))
    assert d.measure == 5.0 and d.inf == -1.0 and d.sup == 5.0


def test_domain_rejects_overlap_and_empty():
    with pytest.raises(ConfigError):
        Domain1D(((0, 2), (1, 3)))
    with pytest.raises(ConfigError):
        Domain1D(((1, 1),))
    with pytest.raises(ConfigError):
        Domain1D.parse("1;2")


def test_minkowski_merges():
    G = Domain1D(((0, 1), (1.5, 2)))
    assert Domain1D.minkowski(G, 0.5).components == ((-0.5, 2.5),)
    assert Domain1D.minkowski(G, 0.1).components == ((-0.1, 1.1), (1.4, 2.1))


@given(st.floats(-3, 3))
def test_reflect_is_involution(a):
    d = Domain1D(((a, a + 1), (a + 2, a + 4)))
    assert d.reflect().reflect() == d
    assert d.reflect().measure == d.measure


# }}}


# {{{ assembly


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_m_matrix_structure(s):
    op = assemble(Domain1D(((-1.5, -0.3), (0.2, 1.7))), FracOrder(s), 0.0, SolveConfig(h=0.02, L=2.0))
    A = op.matrix
    off = A - np.diag(np.diag(A))
    assert np.all(np.diag(A) > 0)
    assert np.all(off <= 0) and np.all(op.exterior_block <= 0)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_rows_sum_to_zero_on_constants(s):
    L, h = 2.0, 0.02
    op = assemble(Domain1D.interval(-1.2, 1.0), FracOrder(s), 0.0, SolveConfig(h=h, L=L))
    one = GridFunction(L, h, np.ones(grid_size(L, h) + 1), Tail.constant(1.0, 1.0))
    assert np.max(np.abs(op.apply_grid(one))) < 1e-10 * op.scale


def test_zero_maps_to_zero():
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=0.02, L=1.5))
    assert np.all(op.apply(np.zeros(op.size)) == 0.0)


def test_ball_profile_reproduced_inside():
    h, L = 0.005, 2.0
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=h, L=L))
    b = GridFunction.from_function(ball_profile(0.5), L, h)
    Ab = op.apply_grid(b)
    assert np.max(np.abs(Ab[np.abs(op.x) < 0.8] - 1.0)) < 1e-3


def test_consistency_with_pointwise_away_from_boundary():
    o = FracOrder(0.5)
    g = ClosedForm(lambda x: math.exp(-4 * x * x), "g")
    errs = []
    for h in (0.01, 0.005):
        L = 2.0
        op = assemble(Domain1D.interval(-1.5, 1.5), o, 0.0, SolveConfig(h=h, L=L))
        u = GridFunction.from_function(lambda x: g(x) if abs(x) < 1.9 else 0.0, L, h)
        Au = op.apply_grid(u)
        sel = np.flatnonzero(np.abs(op.x) < 1.0)[::20]
        ref = np.array([frac_laplacian_pointwise(g, op.x[i], o, QuadConfig(tol=1e-9)) for i in sel])
        # truncating g at |x| = 1.9 changes the operator by less than 1e-6
        errs.append(np.max(np.abs(Au[sel] - ref)))
    assert errs[0] < 5e-3 and errs[1] < 0.6 * errs[0]


def test_too_few_nodes_rejected():
    with pytest.raises(ConfigError):
        assemble(Domain1D.interval(0.0, 0.05), HALF, 0.0, SolveConfig(h=0.01, L=1.0))


def test_domain_outside_box_rejected():
    with pytest.raises(ConfigError):
        assemble(Domain1D.interval(-3, 3), HALF, 0.0, SolveConfig(h=0.01, L=2.0))


def test_solve_config_validation():
    with pytest.raises(ConfigError):
        SolveConfig(h=-1.0)
    with pytest.raises(ConfigError):
        SolveConfig(h=0.3, L=1.0)


# }}}


# {{{ linear solves


def test_zero_data_zero_solution():
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=0.01, L=1.5))
    assert np.all(solve_linear(op, 0.0).values == 0.0)


def test_torsion_matches_closed_form():
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=1e-3, L=1.0))
    u = solve_linear(op, 1.0)
    exact = np.sqrt(np.maximum(1 - u.nodes**2, 0.0))
    assert np.max(np.abs(u.values - exact)) <= 1e-2


def test_odd_step_matches_zeta():
    R = 1.0
    op = assemble(Domain1D.interval(-R, R), HALF, 0.0, SolveConfig(h=2e-3, L=2.0))
    u = solve_linear(op, 0.0, ExteriorData.odd_step(R))
    x = op.x
    assert np.max(np.abs(u.values[op.interior] - zeta_R(x, R, HALF))) <= 1e-2
    # the solution carries the exterior datum as its tail
    assert u.tail.right == R and u.tail.left == -R


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_self_convergence(s):
    o = FracOrder(s)
    sols = [solve_linear(assemble(UNIT, o, 0.0, SolveConfig(h=h, L=1.0)), 1.0) for h in (4e-3, 2e-3, 1e-3)]
    d1 = np.max(np.abs(sols[0].values - sols[1].values[::2]))
    d2 = np.max(np.abs(sols[1].values - sols[2].values[::2]))
    assert d1 / d2 >= 1.5


@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 3.0))
def test_discrete_positivity(f0, g0, c):
    op = assemble(Domain1D.interval(-1, 1), HALF, c, SolveConfig(h=0.05, L=2.0))
    g = ExteriorData(lambda x: g0 * max(0.0, 1.5 - abs(x)), Tail.zero(), "bump")
    u = solve_linear(op, f0, g)
    inner = u.values[op.interior]
    if f0 == 0 and g0 == 0:
        assert np.all(inner == 0)
    else:
        assert np.all(inner > 0)


@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4), st.floats(0.0, 1.0))
def test_discrete_comparison(coef, bump_amp):
    op = assemble(Domain1D.interval(-1, 1), HALF, 0.5, SolveConfig(h=0.05, L=2.0))
    f1 = np.polynomial.Polynomial(coef)(op.x)
    f2 = f1 - bump_amp * (1 + np.cos(op.x))
    u1, u2 = solve_linear(op, f1), solve_linear(op, f2)
    assert np.all(u1.values >= u2.values - 1e-12)


def test_symmetric_data_even_solution():
    op = assemble(Domain1D.interval(-1.3, 1.3), FracOrder(0.4), lambda x: 1 + x * x, SolveConfig(h=0.01, L=2.0))
    u = solve_linear(op, lambda x: math.cos(x))
    assert np.max(np.abs(u.values - u.values[::-1])) < 1e-12


def test_solve_many_matches_single():
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=0.02, L=3.0))
    data = [ExteriorData.odd_step(1.0), ExteriorData.odd_piecewise_linear([1.0, 1.5, 2.0], [0, 1, 0])]
    many = solve_many(op, data)
    for g, u in zip(data, many):
        np.testing.assert_allclose(u.values, solve_linear(op, 0.0, g).values, atol=1e-12)


def test_combine_data():
    a = ExteriorData.odd_piecewise_linear([1.0, 2.0], [1.0, 0.0])
    b = ExteriorData.odd_piecewise_linear([1.0, 3.0], [2.0, 0.0])
    c = a.combine(b, 2.0, -1.0)
    x = np.array([-1.5, 1.2, 2.5])
    np.testing.assert_allclose(c.sample(x), 2 * a.sample(x) - b.sample(x))
    with pytest.raises(ConfigError):
        a.combine(ExteriorData.odd_step(1.0))


# }}}


# {{{ semilinear


def test_semilinear_constant_equals_linear():
    cfg = SolveConfig(h=0.01, L=1.0)
    op = assemble(UNIT, HALF, 0.0, cfg)
    res = solve_semilinear(UNIT, HALF, Nonlinearity.constant(1.0), cfg, op=op)
    np.testing.assert_allclose(res.u.values, solve_linear(op, 1.0).values, atol=1e-12)
    assert res.iterations == 1


def test_semilinear_zero():
    res = solve_semilinear(UNIT, HALF, Nonlinearity.constant(0.0), SolveConfig(h=0.02, L=1.0))
    assert np.all(res.u.values == 0.0)


def test_semilinear_affine_matches_fixed_point():
    cfg = SolveConfig(h=0.01, L=1.0)
    op = assemble(UNIT, HALF, 0.0, cfg)
    res = solve_semilinear(UNIT, HALF, Nonlinearity.affine(1.0, 0.5), cfg, op=op)
    u = np.zeros(op.size)
    for _ in range(200):
        new = solve_linear(op, 1.0 + 0.5 * u).values[op.interior]
        if np.max(np.abs(new - u)) < 1e-13:
            break
        u = new
    assert np.max(np.abs(res.u.values[op.interior] - u)) < 1e-8


def test_polynomial_lipschitz_on_range():
    f = Nonlinearity.polynomial([0.0, 0.0, 1.0], u_max=1.0)
    assert f.lipschitz == pytest.approx(2.0)


# }}}


# {{{ eigenvalues


def test_eigen_frozen_and_normalized():
    op = assemble(UNIT, HALF, 0.0, SolveConfig(h=0.01, L=1.0))
    res = smallest_eigenvalue(op)
    assert res.value == pytest.approx(1.157894767978824, rel=1e-9)
    v = res.vector.values
    assert np.sum(v * v) * 0.01 == pytest.approx(1.0, rel=1e-12)
    assert np.all(v[op.interior] > 0)


def test_eigen_richardson_near_reference():
    lams = [smallest_eigenvalue(assemble(UNIT, HALF, 0.0, SolveConfig(h=h, L=1.0))).value
            for h in (4e-3, 2e-3, 1e-3)]
    # first-order extrapolation from the two finest grids
    extrap = 2 * lams[2] - lams[1]
    assert extrap == pytest.approx(1.158, abs=0.01)
    assert min(lams) >= 2 / math.pi


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_eigen_positive(s):
    op = assemble(Domain1D(((-1, -0.2), (0.3, 1.5))), FracOrder(s), 0.0, SolveConfig(h=0.02, L=2.0))
    assert smallest_eigenvalue(op).value > 0


# }}}
