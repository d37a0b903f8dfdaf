from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from wellpoised.numctx import (
    PoleError,
    eta_to_zeta_factor,
    gamma,
    log_gamma,
    make_context,
    rgamma,
    zeta_const,
)


def test_context_echoes_parameters():
    c = make_context(128, 1e-20)
    assert (c.precision_bits, c.rel_tol) == (128, 1e-20)


def test_context_minimum_precision():
    assert make_context(64, 1e-10).precision_bits == 64
    with pytest.raises(ValueError):
        make_context(32, 1e-10)


@pytest.mark.parametrize("tol", [0.0, -1e-3, 1e-40])
def test_context_rejects_bad_tolerance(tol):
    with pytest.raises(ValueError):
        make_context(64, tol)


def test_contexts_are_isolated():
    lo, hi = make_context(64, 1e-10), make_context(256, 1e-60)
    assert lo.mp.prec == 64 and hi.mp.prec == 256
    assert mpmath.mp.prec == 53


@pytest.mark.parametrize(
    "x, expected",
    [(1, lambda m: 0), (5, lambda m: m.log(24)), (0.5, lambda m: m.log(m.sqrt(m.pi)))],
)
def test_log_gamma_values(ctx, x, expected):
    assert abs(log_gamma(x, ctx) - expected(ctx.mp)) < 1e-35


def test_log_gamma_loose_decimals(ctx):
    assert float(log_gamma(5, ctx)) == pytest.approx(3.17805383, abs=1e-8)
    assert float(log_gamma(0.5, ctx)) == pytest.approx(0.57236494, abs=1e-8)


def test_log_gamma_rejects_poles(ctx):
    with pytest.raises((PoleError, ValueError)):
        log_gamma(0, ctx)
    with pytest.raises(PoleError):
        gamma(-2, ctx)
    assert rgamma(-2, ctx) == 0


def test_zeta_values(ctx):
    m = ctx.mp
    assert abs(zeta_const(2, ctx) - m.pi**2 / 6) < 1e-35
    assert abs(zeta_const(4, ctx) - m.pi**4 / 90) < 1e-35
    # Apery's constant to 40 digits
    assert abs(zeta_const(3, ctx) - m.mpf("1.202056903159594285399738161511449990765")) < 1e-35


@pytest.mark.parametrize("s", [1, 0, 2.5])
def test_zeta_rejects_bad_argument(ctx, s):
    with pytest.raises(ValueError):
        zeta_const(s, ctx)


@pytest.mark.parametrize("s, f", [(2, Fraction(1, 2)), (3, Fraction(3, 4)), (4, Fraction(7, 8))])
def test_eta_factor(s, f):
    assert eta_to_zeta_factor(s) == f


def test_eta_factor_matches_altzeta(ctx):
    for s in range(2, 9):
        assert abs(ctx.mpf(eta_to_zeta_factor(s)) * zeta_const(s, ctx) - ctx.mp.altzeta(s)) < 1e-35


def test_doubling_precision_does_not_hurt():
    lo, hi = make_context(64, 1e-15), make_context(128, 1e-30)
    exact = make_context(512, 1e-100)
    for x in (0.5, 5, 7.25):
        e_lo = abs(log_gamma(x, lo) - log_gamma(x, exact))
        e_hi = abs(log_gamma(x, hi) - log_gamma(x, exact))
        assert e_hi <= e_lo


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 40.0))
def test_gamma_recurrence(x):
    c = make_context(128, 1e-20)
    lhs = log_gamma(c.mpf(x) + 1, c)
    rhs = log_gamma(x, c) + c.mp.log(c.mpf(x))
    assert abs(lhs - rhs) <= 1e-30 * max(1, abs(lhs))
