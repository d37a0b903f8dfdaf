import math

import pytest
from hypothesis import given, settings, strategies as st

from wellpoised.barnes import (
    BranchMismatchError,
    ContourConfig,
    EpsilonSign,
    TruncationError,
    barnes_side,
    euler_side,
    gauss_2f1_side,
    lemma3_check,
)
from wellpoised.multint import ABParams
from wellpoised.numctx import make_context

LN2 = math.log(2)


@pytest.fixture(scope="module")
def bctx():
    return make_context(128, 1e-15)


@pytest.mark.parametrize("z, expected", [(0, 1.0), (0.5, 2 * LN2), (-1, LN2)])
def test_euler_examples(ctx, z, expected):
    assert float(euler_side(1, 1, 2, z, ctx)) == pytest.approx(expected, rel=1e-18)


def test_euler_at_one_is_beta(ctx):
    assert float(euler_side(1, 2, 4, 1, ctx)) == pytest.approx(0.5, rel=1e-18)
    with pytest.raises(ValueError):
        euler_side(1, 1, 2, 1, ctx)


def test_euler_rejects_bad_parameters(ctx):
    with pytest.raises(ValueError):
        euler_side(1, 1, 0.5, 0.3, ctx)
    with pytest.raises(ValueError):
        euler_side(1, 1, 2, 1.5, ctx)


@pytest.mark.parametrize(
    "args, expected",
    [((1, 1, 2, 0.5), 2 * LN2), ((2, 1.5, 5, 0), math.gamma(1.5) * math.gamma(3.5) / math.gamma(5)), ((1, 2, 4, 1), 0.5)],
)
def test_gauss_examples(ctx, args, expected):
    assert float(gauss_2f1_side(*args, ctx)) == pytest.approx(expected, rel=1e-15)


def test_gauss_beta_value_decimal(ctx):
    # B(1.5, 3.5) = (sqrt(pi)/2) (15 sqrt(pi)/8) / 24 = 5 pi / 128
    assert abs(gauss_2f1_side(2, 1.5, 5, 0, ctx) - 5 * ctx.mp.pi / 128) < 1e-35


def test_gauss_divergence_guards(ctx):
    with pytest.raises(ValueError):
        gauss_2f1_side(1, 1, 2, 1, ctx)
    with pytest.raises(ValueError):
        gauss_2f1_side(1, 1, 2, 1.2, ctx)


@pytest.mark.parametrize(
    "args, t0", [((1, 1, 2, 0.5), 0.5), ((1, 1, 2, -1), 0.5), ((0.5, 0.7, 2.1, 0.3), 0.3)]
)
def test_barnes_matches_euler(bctx, args, t0):
    res = barnes_side(*args, ContourConfig(t0), bctx)
    assert abs(res.value - euler_side(*args, bctx)) < 1e-8
    assert res.tail_bound < 1e-8


def test_barnes_branches_agree(bctx):
    res = barnes_side(0.8, 1.1, 3.0, 0.6, ContourConfig(0.4), bctx)
    assert set(res.branch_values) == {"+pi", "-pi"}
    vp, vm = res.branch_values["+pi"], res.branch_values["-pi"]
    assert abs(vp - vm) < 1e-12


def test_barnes_at_one(bctx):
    res = barnes_side(0.7, 0.9, 2.6, 1, ContourConfig(0.35), bctx)
    assert abs(res.value - euler_side(0.7, 0.9, 2.6, 1, bctx)) < 1e-8


def test_barnes_validation(bctx):
    with pytest.raises(ValueError):
        barnes_side(1, 1, 2, 0, ContourConfig(0.5), bctx)
    with pytest.raises(ValueError):
        barnes_side(1, 1, 2, 0.5, ContourConfig(1.5), bctx)
    with pytest.raises(ValueError):
        barnes_side(1, 1, 2, 1, ContourConfig(0.5), bctx)  # b = a0 + a at z = 1
    with pytest.raises(ValueError):
        ContourConfig(0)


def test_barnes_error_types_are_runtime_errors():
    assert issubclass(TruncationError, RuntimeError)
    assert issubclass(BranchMismatchError, RuntimeError)


@settings(max_examples=6, deadline=None)
@given(
    st.floats(0.4, 2.0), st.floats(0.4, 2.0), st.floats(0.6, 2.0), st.floats(-1.0, 0.8)
)
def test_triad_property(a0, a, extra, z):
    c = make_context(128, 1e-15)
    b = a0 + a + extra
    e = euler_side(a0, a, b, z, c)
    g = gauss_2f1_side(a0, a, b, z, c)
    assert abs(e - g) <= 1e-12 * abs(e)
    if abs(z) > 1e-3:
        br = barnes_side(a0, a, b, z, ContourConfig(min(a0, a) / 2), c).value
        assert abs(e - br) <= 1e-8 * abs(e)


def test_epsilon_sign_rules():
    assert EpsilonSign.default(2).value == 0
    assert EpsilonSign.default(3).value == 1
    with pytest.raises(ValueError):
        EpsilonSign(1, 2)
    with pytest.raises(ValueError):
        EpsilonSign(0, 3)


def test_contour_recursion_k2_unit_case(ctx):
    r = lemma3_check(ABParams(1, (1, 1), (2, 2)), EpsilonSign(0, 2), ContourConfig(0.5), ctx)
    z2 = math.pi**2 / 6
    assert abs(r.lhs - z2) < 1e-6 and abs(r.rhs - z2) < 1e-6
    assert r.abs_diff < 1e-6


def test_contour_recursion_k2_generic(ctx):
    ab = ABParams(1.3, (0.9, 1.2), (2.4, 3.1))
    r = lemma3_check(ab, EpsilonSign(0, 2), ContourConfig(0.4), ctx)
    assert r.abs_diff < 1e-6 * abs(r.lhs)


def test_contour_recursion_validation(ctx):
    with pytest.raises(ValueError):
        lemma3_check(ABParams(1, (1,), (2,)), EpsilonSign(1, 1), ContourConfig(0.5), ctx)
    with pytest.raises(ValueError):
        lemma3_check(ABParams(1, (1, 1), (2, 2)), EpsilonSign(1, 3), ContourConfig(0.5), ctx)


@pytest.mark.slow
@pytest.mark.parametrize("eps", [1, -1])
def test_contour_recursion_k3_both_signs(ctx, eps):
    r = lemma3_check(ABParams(1, (1, 1, 1), (2, 2, 2)), EpsilonSign(eps, 3), ContourConfig(0.5), ctx)
    two_zeta3 = 2 * 1.2020569031595942
    assert abs(r.rhs - two_zeta3) < 1e-6 and abs(r.lhs - two_zeta3) < 1e-6
