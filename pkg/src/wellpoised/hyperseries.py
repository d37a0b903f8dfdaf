"""Very-well-poised series F_k(h0; h1, ..., hk) at the point (-1)**(k+1).

The series is summed from its term-ratio recurrence.  At |z| = 1 the terms
decay only like a power of mu, so partial sums are fed through a Levin
u-transform; alternating series are first grouped in (even, odd) pairs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from .numctx import PoleError, PrecisionContext, gamma, make_context, to_hp

__all__ = [
    "HParams",
    "ConditionReport",
    "SeriesResult",
    "ConvergenceError",
    "SlowConvergenceWarning",
    "check_conditions",
    "series_term",
    "term_ratio",
    "eval_F",
    "dougall_F3",
    "check_F2_normalization",
    "levin_sum",
    "decay_exponent",
]

SLOW_MARGIN = 0.05


class ConvergenceError(RuntimeError):
    """Raised when a series does not settle within the term budget."""


class SlowConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HParams:
    """Parameters (h0; h1, ..., hk) of F_k.  ``h`` holds h1..hk."""

    h0: object
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(self.h))
        if len(self.h) < 2:
            raise ValueError("F_k needs at least two lower parameters")

    @property
    def k(self) -> int:
        return len(self.h)

    @classmethod
    def of(cls, values: Sequence) -> "HParams":
        """Build from a flat sequence (h0, h1, ..., hk)."""
        values = list(values)
        return cls(values[0], tuple(values[1:]))

    def as_list(self) -> list:
        return [self.h0, *self.h]

    def permuted(self, perm: Sequence[int]) -> "HParams":
        """Lower parameters reordered so that the new h_{i+1} is the old h_{perm[i]+1}."""
        return HParams(self.h0, tuple(self.h[p] for p in perm))


@dataclass(frozen=True)
class ConditionReport:
    cond5_ok: bool
    cond6_ok: bool
    cond7_ok: bool
    margin5: float
    margin6: float
    pair_margin: float

    @property
    def all_ok(self) -> bool:
        return self.cond5_ok and self.cond6_ok and self.cond7_ok

    @property
    def slow(self) -> bool:
        return self.margin5 < SLOW_MARGIN


@dataclass(frozen=True)
class SeriesResult:
    value: object
    converged: bool
    terms: int
    error_estimate: object
    slow: bool = False

    def __float__(self):
        return float(self.value)


def _is_nonpos_int(x) -> bool:
    x = float(x)
    return x <= 0 and abs(x - round(x)) < 1e-12


def check_conditions(hp: HParams) -> ConditionReport:
    """Convergence conditions for the (k+2)-parameter series behind the integral identity.

    ``hp`` carries h1..h_{k+2}; the rank is ``k = hp.k - 2``.  Besides the three
    stated conditions the report carries ``pair_margin``, the smallest
    1 + h0 - h_j - h_{j+1} over j = 1..k+1, which the integral side also needs.
    """
    k = hp.k - 2
    if k < 0:
        raise ValueError("need at least two lower parameters")
    h0 = float(hp.h0)
    h = [float(x) for x in hp.h]
    margin5 = 1 + h0 - 2.0 / (k + 1) * sum(h)
    margin6 = math.inf
    for j in range(2, k + 2):
        # 1-based: 1 + h0 - h_{j+1} > h_j > 0
        hj, hj1 = h[j - 1], h[j]
        margin6 = min(margin6, hj, 1 + h0 - hj1 - hj)
    cond7 = not (_is_nonpos_int(h[0]) or _is_nonpos_int(h[-1]))
    pair = min(1 + h0 - h[j] - h[j + 1] for j in range(len(h) - 1))
    return ConditionReport(
        cond5_ok=margin5 > 0,
        cond6_ok=margin6 > 0,
        cond7_ok=cond7,
        margin5=margin5,
        margin6=margin6,
        pair_margin=pair,
    )


def _check_poles(hp: HParams):
    if _is_nonpos_int(hp.h0):
        raise PoleError(f"h0 = {hp.h0} is a non-positive integer")
    for x in hp.h:
        if _is_nonpos_int(x):
            raise PoleError(f"lower parameter {x} is a non-positive integer")
        if _is_nonpos_int(1 + float(hp.h0) - float(x)):
            raise PoleError(f"1 + h0 - h_j = {1 + float(hp.h0) - float(x)} is a non-positive integer")


def series_term(hp: HParams, mu: int, ctx: PrecisionContext):
    """The signed mu-th summand, evaluated directly from gamma functions."""
    _check_poles(hp)
    h0 = to_hp(hp.h0, ctx)
    hs = [to_hp(x, ctx) for x in hp.h]
    val = (h0 + 2 * mu) * gamma(h0 + mu, ctx) / gamma(1 + mu, ctx)
    for x in hs:
        val *= gamma(x + mu, ctx) / gamma(1 + h0 - x + mu, ctx)
    if (hp.k + 1) * mu % 2:
        val = -val
    return val


def term_ratio(hp: HParams, mu: int, ctx: PrecisionContext):
    """series_term(mu + 1) / series_term(mu) as the explicit rational function of mu."""
    h0 = to_hp(hp.h0, ctx)
    r = (h0 + 2 * mu + 2) / (h0 + 2 * mu) * (h0 + mu) / (1 + mu)
    for x in hp.h:
        x = to_hp(x, ctx)
        r *= (x + mu) / (1 + h0 - x + mu)
    return -r if (hp.k + 1) % 2 else r


def levin_sum(
    first_term,
    ratio: Callable[[int], object],
    ctx: PrecisionContext,
    *,
    alternating: bool = False,
    max_order: int = 160,
) -> SeriesResult:
    """Sum a_0 + a_1 + ... given a_0 and a_{n+1}/a_n, with Levin u acceleration.

    ``ctx`` must already carry the guard bits; the caller rounds the result.
    ``alternating`` groups consecutive pairs before extrapolating.
    """
    m = ctx.mp
    tol = m.mpf(ctx.rel_tol)
    budget = ctx.max_terms
    a = first_term
    mu = 0

    def next_raw():
        nonlocal a, mu
        cur = a
        a = a * ratio(mu)
        mu += 1
        return cur

    def next_term():
        if alternating:
            return next_raw() + next_raw()
        return next_raw()

    partial = m.mpf(0)
    sums: list = []
    omegas: list = []
    prev = None
    settled = 0
    small_run = 0
    best = None
    est = m.inf
    n = 0
    while mu < budget:
        t = next_term()
        partial += t
        if t == 0:
            # the series terminated
            return SeriesResult(partial, True, mu, m.mpf(0))
        sums.append(partial)
        omegas.append((n + 1) * t)
        n += 1
        # plain summation exit for geometrically convergent tails
        if abs(t) < tol * abs(partial):
            small_run += 1
            if small_run >= 3 and abs(ratio(mu - 1)) < 0.999:
                return SeriesResult(partial, True, mu, abs(t))
        else:
            small_run = 0
        k = n - 1
        if k < 2 or k > max_order:
            if k > max_order:
                break
            continue
        num = m.mpf(0)
        den = m.mpf(0)
        scale = m.mpf(k + 1)
        for j in range(k + 1):
            c = m.binomial(k, j) * (m.mpf(j + 1) / scale) ** (k - 1)
            if j % 2:
                c = -c
            num += c * sums[j] / omegas[j]
            den += c / omegas[j]
        cur = num / den
        if prev is not None:
            diff = abs(cur - prev)
            if diff < est:
                est = diff
                best = cur
            if diff <= tol * abs(cur):
                settled += 1
                if settled >= 2:
                    return SeriesResult(cur, True, mu, diff)
            else:
                settled = 0
        prev = cur
    value = best if best is not None else partial
    return SeriesResult(value, False, mu, est)


def decay_exponent(hp: HParams) -> float:
    """p such that the mu-th term behaves like mu**p."""
    return 2 * sum(float(x) for x in hp.h) - (hp.k - 1) * (1 + float(hp.h0)) - 1


def eval_F(
    hp: HParams,
    ctx: PrecisionContext | None = None,
    *,
    rank: int | None = None,
    warn_slow: bool = True,
) -> SeriesResult:
    """Sum F_k(hp) to ``ctx.rel_tol``.

    ``rank`` selects which convergence margin is reported: the default treats
    ``hp`` as the (k+2)-parameter series of rank k = hp.k - 2.
    """
    ctx = ctx or make_context()
    _check_poles(hp)
    k = hp.k - 2 if rank is None else rank
    margin = 1 + float(hp.h0) - 2.0 / (k + 1) * sum(float(x) for x in hp.h)
    alternating = (hp.k + 1) % 2 == 1
    p = decay_exponent(hp)
    if p >= (0 if alternating else -1):
        raise ConvergenceError(f"series diverges: terms decay like mu**{p:.4g}")
    slow = margin < SLOW_MARGIN
    if slow and warn_slow:
        warnings.warn(f"convergence margin {margin:.3g} is small; summation may be slow", SlowConvergenceWarning, stacklevel=2)
    work = ctx.extended(ctx.precision_bits + 32)
    first = series_term(hp, 0, work)
    res = levin_sum(first, lambda mu: term_ratio(hp, mu, work), work, alternating=alternating)
    value = ctx.mpf(res.value)
    return SeriesResult(value, res.converged, res.terms, ctx.mpf(res.error_estimate), slow)


def dougall_F3(h0, h1, h2, h3, ctx: PrecisionContext | None = None):
    """Closed form of F_3 (limiting Dougall summation)."""
    ctx = ctx or make_context()
    h0, h1, h2, h3 = (to_hp(x, ctx) for x in (h0, h1, h2, h3))
    if not 1 + h0 > h1 + h2 + h3:
        raise ValueError("need 1 + h0 > h1 + h2 + h3")
    for x in (h1, h2, h3):
        if _is_nonpos_int(x):
            raise PoleError(f"{x} is a non-positive integer")
    num = gamma(h1, ctx) * gamma(h2, ctx) * gamma(h3, ctx) * gamma(1 + h0 - h1 - h2 - h3, ctx)
    den = gamma(1 + h0 - h1 - h2, ctx) * gamma(1 + h0 - h1 - h3, ctx) * gamma(1 + h0 - h2 - h3, ctx)
    return num / den


def check_F2_normalization(h0, h1, h2, ctx: PrecisionContext | None = None):
    """Gamma(1+h0-h1-h2) / (Gamma(h1) Gamma(h2)) * F_2(h0; h1, h2); equals 1."""
    ctx = ctx or make_context()
    hp = HParams(h0, (h1, h2))
    res = eval_F(hp, ctx, warn_slow=False)
    if not res.converged:
        raise ConvergenceError("F_2 series did not converge")
    h0, h1, h2 = (to_hp(x, ctx) for x in (h0, h1, h2))
    return gamma(1 + h0 - h1 - h2, ctx) / (gamma(h1, ctx) * gamma(h2, ctx)) * res.value
