import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wellpoised.hyperseries import HParams, eval_F
from wellpoised.zetaforms import (
    LinearForm,
    NonZetaResidueError,
    PartialFractions,
    RationalFunction,
    build_rational_term,
    inclusion_check,
    inclusion_report,
    linear_form_for,
    normalizers,
    partial_fractions,
    phi_growth,
    primes_below,
    sum_to_linear_form,
    theorem_prefactor,
)

F = Fraction



def poly_from_roots(shifts):
    p = (F(1),)
    for j, m in shifts.items():
        for _ in range(m):
            p = tuple((p[i - 1] if i else 0) + (j * p[i] if i < len(p) else 0) for i in range(len(p) + 1))
    return p


@pytest.mark.parametrize(
    "h, alt, num, den",
    [
        ((2, 1, 1, 1, 1, 1), False, (2,), poly_from_roots({1: 3})),
        ((2, 1, 1, 1, 1), True, (2,), poly_from_roots({1: 2})),
        ((3, 1, 1), True, (3, 2), poly_from_roots({1: 1, 2: 1})),
    ],
)
def test_build_rational_term(h, alt, num, den):
    rf, a = build_rational_term(HParams.of(h))
    assert a is alt
    assert rf == RationalFunction(num, den)


def test_build_rational_term_rejects_non_integers():
    with pytest.raises(ValueError):
        build_rational_term(HParams(2.5, (1, 1, 1)))


def test_build_rational_term_odd_h0_matches_series(ctx):
    hp = HParams(5, (2, 2, 2, 2, 2))
    rf, alt = build_rational_term(hp)
    for mu in range(4):
        assert abs(ctx.mpf(rf(mu)) * (-1 if alt and mu % 2 else 1) - _term(hp, mu, ctx)) < 1e-30


def _term(hp, mu, ctx):
    from wellpoised.hyperseries import series_term

    return series_term(hp, mu, ctx)


@pytest.mark.parametrize(
    "rf, expected",
    [
        (RationalFunction((1,), poly_from_roots({1: 1, 2: 1})), {(1, 1): F(1), (1, 2): F(-1)}),
        (RationalFunction((2,), poly_from_roots({1: 3})), {(3, 1): F(2)}),
        (RationalFunction((3, 2), poly_from_roots({1: 1, 2: 1})), {(1, 1): F(1), (1, 2): F(1)}),
    ],
)
def test_partial_fraction_examples(rf, expected):
    assert dict(partial_fractions(rf).coeffs) == expected


def test_partial_fractions_improper_rejected():
    with pytest.raises(ValueError):
        partial_fractions(RationalFunction((1, 1), (1, 1)))


def test_partial_fractions_non_integer_pole():
    with pytest.raises(ValueError):
        partial_fractions(RationalFunction((1,), (F(1, 2), 1)))


@settings(max_examples=100, deadline=None)
@given(
    st.dictionaries(st.integers(-6, 9), st.integers(1, 3), min_size=1, max_size=4),
    st.lists(st.fractions(max_denominator=12).filter(lambda q: abs(q) <= 20), min_size=1, max_size=6),
)
def test_partial_fraction_round_trip(shifts, num):
    den = poly_from_roots(shifts)
    num = num[: len(den) - 1] or [F(1)]
    if all(c == 0 for c in num):
        num = [F(1)]
    rf = RationalFunction(tuple(num), den)
    back = partial_fractions(rf).to_rational()
    assert (back.numerator, back.denominator) == (rf.numerator, rf.denominator)
    # also pointwise, away from the poles
    pf = partial_fractions(rf)
    for t in (F(1, 3), F(17, 2)):
        assert pf(t) == rf(t)


def test_sum_examples():
    tele = partial_fractions(RationalFunction((1,), poly_from_roots({1: 1, 2: 1})))
    assert sum_to_linear_form(tele, False) == LinearForm(1, {})
    cube = partial_fractions(RationalFunction((2,), poly_from_roots({1: 3})))
    assert sum_to_linear_form(cube, False) == LinearForm(0, {3: 2})
    sq = partial_fractions(RationalFunction((2,), poly_from_roots({1: 2})))
    assert sum_to_linear_form(sq, True) == LinearForm(0, {2: 1})


def test_sum_log2_residue_rejected():
    pf = PartialFractions((1,), {(1, 1): F(1)})
    with pytest.raises(NonZetaResidueError):
        sum_to_linear_form(pf, True)


def test_sum_divergent_rejected():
    pf = PartialFractions((1,), {(1, 1): F(1)})
    with pytest.raises(ValueError):
        sum_to_linear_form(pf, False)


@pytest.mark.parametrize("k, n, q0, qz", [(3, 0, 0, {3: 2}), (2, 0, 0, {2: 1}), (3, 1, -12, {3: 10})])
def test_linear_form_examples(k, n, q0, qz):
    assert linear_form_for(k, n) == LinearForm(q0, qz)


def test_linear_form_3_1_matches_series(ctx):
    val = eval_F(HParams(5, (2,) * 5), ctx).value
    assert abs(linear_form_for(3, 1).value(ctx) - val) < 1e-10 * abs(val)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("r", [1, 2])
def test_linear_forms_match_series(ctx, k, n, r):
    if (k, n, r) == (2, 2, 2):
        with pytest.raises(ValueError, match="diverges"):
            linear_form_for(k, n, r)
        return
    form = linear_form_for(k, n, r)
    hp = HParams((2 * r + 1) * n + 2, tuple([r * n + 1] * (k + 2)))
    val = eval_F(hp, ctx, warn_slow=False).value
    assert abs(form.value(ctx) - val) <= 1e-18 * max(1, abs(val))
    assert all(s % 2 == k % 2 for s in form.qzeta)


def test_linear_form_json_round_trip():
    form = LinearForm(F(-7, 3), {3: F(5, 2), 5: F(1)})
    assert form.to_json() == {"q0": "-7/3", "zeta": {"3": "5/2", "5": "1"}}
    assert LinearForm.from_json(form.to_json()) == form


def test_theorem_prefactor_unit():
    assert theorem_prefactor(HParams(2, (1,) * 5)) == 1
    assert theorem_prefactor(HParams(5, (1, 1, 1))) == 36


def test_normalizer_examples():
    assert normalizers(6).D_n == 60
    assert normalizers(5).Phi_n == 3
    assert normalizers(10).Phi_n == 1
    assert normalizers(0) == normalizers(0).__class__(0, 1, 1)


def test_D_n_is_lcm():
    for n in range(1, 60):
        assert normalizers(n).D_n == math.lcm(*range(1, n + 1))


def test_Phi_brute_force():
    for n in range(2, 120):
        expected = math.prod(p for p in primes_below(n).tolist() if F(n % p, p) >= F(2, 3))
        assert normalizers(n).Phi_n == expected


def test_phi_growth_examples():
    assert phi_growth(5) == pytest.approx(math.log(3) / 5)
    assert phi_growth(10) == 0
    assert abs(phi_growth(10**5) - 0.24101875) < 0.01


def test_primes_below():
    assert primes_below(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_below(2).tolist() == []


@pytest.mark.parametrize("k, n", [(3, 0), (3, 1), (3, 2), (3, 3), (5, 0), (5, 1), (5, 2), (5, 3)])
def test_inclusion(k, n):
    assert inclusion_check(k, n)


def test_inclusion_k5_n1_only_odd_zetas():
    rep = inclusion_report(5, 1)
    assert rep.integral and set(rep.form.qzeta) <= {3, 5}


def test_inclusion_rejects_even_k():
    with pytest.raises(ValueError):
        inclusion_check(4, 1)
