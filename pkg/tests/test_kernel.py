import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclab.errors import ConfigError, QuadratureError
from fraclab.kernel import (
    ClosedForm,
    FracOrder,
    GridFunction,
    HalfSpaceFunction,
    QuadConfig,
    Tail,
    antisym_frac_laplacian,
    ball_profile,
    ball_profile_laplacian,
    bilinear_form_with_potential,
    bump,
    frac_laplacian_2d_of_1d,
    frac_laplacian_pointwise,
    gagliardo_energy,
    kernel_constant,
    kernel_constant_without_pi,
    lorentzian,
    lorentzian_half_laplacian,
    read_xu_csv,
    stencil,
    tail_integral,
)
from fraclab.solver import Domain1D, SolveConfig, assemble

HALF = FracOrder(0.5)
Q = QuadConfig(tol=1e-8)


def gaussian(shift=0.0, scale=1.0):
    return ClosedForm(lambda x: math.exp(-(((x - shift) / scale) ** 2)), "gauss")


def odd_bump():
    return ClosedForm(lambda x: x * math.exp(-x * x), "x exp(-x^2)")


# {{{ constants


def test_kernel_constant_1d_half():
    assert kernel_constant(HALF) == pytest.approx(1 / math.pi, rel=1e-14)


def test_kernel_constant_2d_half():
    assert kernel_constant(FracOrder(0.5, 2)) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


def test_constant_without_pi_differs_by_sqrt_pi():
    assert kernel_constant_without_pi(HALF) / kernel_constant(HALF) == pytest.approx(math.sqrt(math.pi))


@pytest.mark.parametrize("s", np.round(np.arange(0.05, 0.96, 0.05), 2))
def test_kernel_constant_positive_finite(s):
    c = kernel_constant(FracOrder(float(s)))
    assert np.isfinite(c) and c > 0


def test_frac_order_rejects_bad_s():
    with pytest.raises(ConfigError):
        FracOrder(1.0)
    with pytest.raises(ConfigError):
        FracOrder(0.5, 0)


def test_tail_integral_values():
    assert tail_integral(1.0, HALF) == pytest.approx(2.0)
    assert tail_integral(1.0, FracOrder(0.5, 2)) == pytest.approx(2 * math.pi)


@given(st.floats(0.1, 0.9), st.floats(0.1, 10.0))
def test_tail_integral_scaling(s, r):
    o = FracOrder(s)
    assert tail_integral(2 * r, o) == pytest.approx(2 ** (-2 * s) * tail_integral(r, o), rel=1e-12)


# }}}


# {{{ pointwise evaluation


def test_constant_has_zero_laplacian():
    u = ClosedForm(lambda x: 3.0, "const", limits=(3.0, 3.0))
    for x in (-1.0, 0.0, 2.5):
        assert abs(frac_laplacian_pointwise(u, x, HALF, Q)) < 1e-10


@pytest.mark.parametrize("x", [-2.0, -0.7, 0.0, 0.3, 1.0, 1.9])
def test_lorentzian_oracle(x):
    val = frac_laplacian_pointwise(lorentzian(), x, HALF, QuadConfig(tol=1e-6))
    assert val == pytest.approx(lorentzian_half_laplacian(x), abs=1e-6)


def test_lorentzian_at_zero_is_one():
    assert frac_laplacian_pointwise(lorentzian(), 0.0, HALF, Q) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("x", [0.0, 0.45, -0.8])
def test_ball_profile_is_constant_inside(s, x):
    o = FracOrder(s)
    val = frac_laplacian_pointwise(ball_profile(s), x, o, QuadConfig(tol=1e-7))
    assert val == pytest.approx(ball_profile_laplacian(o), rel=1e-4)


def test_ball_profile_half_constant_is_one():
    assert ball_profile_laplacian(HALF) == pytest.approx(1.0, rel=1e-14)


@given(st.floats(-1.5, 1.5), st.sampled_from([0.3, 0.5, 0.7]))
def test_translation_invariance(x, s):
    o = FracOrder(s)
    a = 0.75
    v0 = frac_laplacian_pointwise(gaussian(), x, o, Q)
    v1 = frac_laplacian_pointwise(gaussian(shift=a), x + a, o, Q)
    assert v1 == pytest.approx(v0, abs=1e-7)


@given(st.floats(-1.5, 1.5), st.floats(0.5, 3.0))
def test_scaling(x, R):
    o = FracOrder(0.4)
    v0 = frac_laplacian_pointwise(gaussian(), x, o, Q)
    vR = frac_laplacian_pointwise(gaussian(scale=R), R * x, o, Q)
    assert vR == pytest.approx(R ** (-0.8) * v0, abs=1e-7)


@given(st.floats(0.05, 2.0))
def test_oddness_propagates(x):
    u = odd_bump()
    assert frac_laplacian_pointwise(u, -x, HALF, Q) == pytest.approx(-frac_laplacian_pointwise(u, x, HALF, Q),
                                                                     abs=1e-9)


def test_jump_point_rejected():
    u = ClosedForm(lambda x: 1.0 if x > 0 else 0.0, "step", jumps=(0.0,), limits=(0.0, 1.0))
    with pytest.raises(QuadratureError):
        frac_laplacian_pointwise(u, 0.0, HALF, Q)


def test_grid_pointwise_matches_closed_form():
    u = GridFunction.from_function(lambda x: math.exp(-x * x), 6.0, 0.005)
    assert frac_laplacian_pointwise(u, 0.0, HALF) == pytest.approx(
        frac_laplacian_pointwise(gaussian(), 0.0, HALF, Q), abs=2e-3)


# }}}


# {{{ antisymmetric reduction


@given(st.floats(0.05, 2.5), st.sampled_from([0.3, 0.5, 0.8]))
def test_antisym_matches_full_evaluator(x, s):
    o = FracOrder(s)
    q = QuadConfig(tol=1e-6)
    half = HalfSpaceFunction.from_closed_form(odd_bump())
    full = frac_laplacian_pointwise(half.odd_extension(), x, o, q)
    assert antisym_frac_laplacian(half, x, o, q) == pytest.approx(full, abs=10 * q.tol)


def test_antisym_vanishes_at_the_plane():
    half = HalfSpaceFunction.from_closed_form(odd_bump())
    assert abs(antisym_frac_laplacian(half, 1e-6, HALF, Q)) < 1e-4


def test_antisym_negative_at_interior_zero():
    # u >= 0 on the half-line with a double zero at 1, not identically zero
    u = ClosedForm(lambda x: math.copysign((abs(x) - 1.0) ** 2 * math.exp(-x * x), x), "touch",
                   breakpoints=(0.0,))
    val = antisym_frac_laplacian(HalfSpaceFunction.from_closed_form(u), 1.0, HALF, Q)
    assert val < 0


def test_half_space_function_reflection():
    half = HalfSpaceFunction.from_closed_form(odd_bump())
    assert half(-0.7) == -half(0.7)


# }}}


# {{{ energy


def _compact(func, L=2.0, h=0.02):
    return GridFunction.from_function(func, L, h)


def test_energy_frozen_ball():
    u = _compact(ball_profile(0.5), 2.0, 0.01)
    assert gagliardo_energy(u, u, HALF) == pytest.approx(1.5804833078797564, rel=1e-10)


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_energy_symmetric_and_nonnegative(a, b):
    def mk(c):
        return _compact(lambda x: sum(ci * bump(x - 0.5 * i) for i, ci in enumerate(c)))

    u, v = mk(a), mk(b)
    assert gagliardo_energy(u, u, HALF) >= -1e-12
    assert gagliardo_energy(u, v, HALF) == pytest.approx(gagliardo_energy(v, u, HALF), abs=1e-12)


def test_energy_matches_operator_pairing():
    h, L = 0.01, 2.0
    u = _compact(lambda x: float(bump(x)), L, h)
    op = assemble(Domain1D.interval(-L, L), HALF, 0.0, SolveConfig(h=h, L=L, boundary_layer=False))
    pairing = h * u.values[op.interior] @ op.apply_grid(u)
    assert gagliardo_energy(u, u, HALF) == pytest.approx(pairing, rel=1e-3)


def test_bilinear_form_zero_potential_and_zero_v():
    u = _compact(lambda x: float(bump(x)))
    z = _compact(lambda x: 0.0)
    assert bilinear_form_with_potential(u, u, 0.0, HALF) == pytest.approx(gagliardo_energy(u, u, HALF))
    assert bilinear_form_with_potential(u, z, 1.0, HALF) == 0.0


def test_energy_rejects_mismatched_grids():
    with pytest.raises(ConfigError):
        gagliardo_energy(_compact(bump, 2.0, 0.02), _compact(bump, 2.0, 0.01), HALF)


def test_energy_rejects_nonzero_tail():
    u = GridFunction(1.0, 0.5, np.zeros(5), Tail.constant(0.0, 1.0))
    with pytest.raises(ConfigError):
        gagliardo_energy(u, u, HALF)


# }}}


# {{{ bump and grid functions


@given(st.floats(1.0, 5.0))
def test_bump_support_and_evenness(x):
    assert bump(x) == 0.0
    assert bump(-0.3 * x / 5) == bump(0.3 * x / 5)


def test_bump_normalized():
    x = np.linspace(-1, 1, 200001)
    assert np.trapezoid(bump(x), x) == pytest.approx(1.0, abs=1e-8)
    x2 = np.linspace(-2, 2, 200001)
    assert np.trapezoid(bump(x2, 2.0), x2) == pytest.approx(1.0, abs=1e-8)


def test_antisymmetric_flag_enforced():
    with pytest.raises(ConfigError):
        GridFunction(1.0, 0.5, np.array([1.0, 0.0, 0.0, 0.0, 1.0]), antisymmetric=True)
    GridFunction(1.0, 0.5, np.array([-1.0, -0.5, 0.0, 0.5, 1.0]), antisymmetric=True)


def test_grid_function_csv_roundtrip(tmp_path):
    u = GridFunction.from_function(math.sin, 1.0, 0.1)
    u.to_csv(tmp_path / "u.csv")
    x, v = read_xu_csv(tmp_path / "u.csv")
    np.testing.assert_array_equal(v, u.values)
    np.testing.assert_array_equal(x, u.nodes)
    assert (tmp_path / "u.csv").read_text().splitlines()[0] == "x,u"


def test_grid_rejects_non_integer_cells():
    with pytest.raises(ConfigError):
        GridFunction(1.0, 0.3, np.zeros(7))


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_stencil_diagonal_is_total_weight(s):
    K = 200
    st_ = stencil(s, K + 1)
    one_side = st_.full[1:K + 1].sum() + st_.edge[K + 1] + st_.tail(K + 1)
    assert st_.diagonal == pytest.approx(2 * one_side, rel=1e-12)
    assert np.all(st_.full[1:] > 0)


# }}}


def test_tensorization_proportional():
    v = ClosedForm(lambda x: math.exp(-x * x), "gauss")
    q = QuadConfig(tol=1e-6)
    ratios = [frac_laplacian_2d_of_1d(v, x, 0.5, q) / frac_laplacian_pointwise(v, x, HALF, q)
              for x in (0.0, 0.4, 0.8)]
    assert max(ratios) - min(ratios) <= 0.01 * abs(ratios[0])
