"""Exact linear forms in zeta values for integer parameters.

With integer h the gamma quotients in the summand of F collapse to products
of linear factors (t + c).  The summand becomes a rational function with
integer poles, its partial fractions sum termwise to tails of zeta (or eta)
values, and the result is q0 + sum_s q_s zeta(s) with rational q's.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .hyperseries import HParams
from .numctx import PrecisionContext, eta_to_zeta_factor, make_context, zeta_const

__all__ = [
    "RationalFunction",
    "PartialFractions",
    "LinearForm",
    "ArithNormalizers",
    "InclusionReport",
    "NonZetaResidueError",
    "build_rational_term",
    "partial_fractions",
    "sum_to_linear_form",
    "linear_form_for",
    "theorem_prefactor",
    "normalizers",
    "primes_below",
    "phi_growth",
    "inclusion_check",
    "inclusion_report",
]


class NonZetaResidueError(ValueError):
    """An alternating sum left a nonzero multiple of ln 2."""


# -- polynomials: tuples of Fractions, lowest degree first --------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _padd(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _from_roots(shifts: Counter, lead=Fraction(1)):
    """lead * prod (t + c)^m."""
    p = (Fraction(lead),)
    for c, m in sorted(shifts.items()):
        for _ in range(m):
            p = _pmul(p, (Fraction(c), Fraction(1)))
    return p


def _taylor_shift(p, c):
    """Coefficients of p(s + c) in s."""
    out = list(p)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += c * out[j + 1]
    return tuple(out)


def _divide_linear(p, c):
    """Divide p by (t + c); returns (quotient, remainder)."""
    n = len(p) - 1
    q = [Fraction(0)] * n
    r = p[n]
    for i in range(n - 1, -1, -1):
        q[i] = r
        r = p[i] - c * r
    return tuple(q), r


@dataclass(frozen=True)
class RationalFunction:
    """numerator(t) / denominator(t), denominator monic.

    ``den_shifts`` optionally records the factorisation prod (t + j)^m of the
    denominator; partial_fractions falls back to root finding without it.
    """

    numerator: tuple
    denominator: tuple
    den_shifts: Mapping[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        num = _trim(Fraction(c) for c in self.numerator)
        den = _trim(Fraction(c) for c in self.denominator)
        if not den:
            raise ZeroDivisionError("zero denominator")
        lead = den[-1]
        object.__setattr__(self, "numerator", tuple(c / lead for c in num))
        object.__setattr__(self, "denominator", tuple(c / lead for c in den))

    def __call__(self, t):
        t = Fraction(t)
        return _peval(self.numerator, t) / _peval(self.denominator, t)

    @classmethod
    def from_factors(cls, lead, num_shifts: Counter, den_shifts: Counter) -> "RationalFunction":
        common = num_shifts & den_shifts
        num_shifts, den_shifts = num_shifts - common, den_shifts - common
        return cls(_from_roots(num_shifts, lead), _from_roots(den_shifts), dict(den_shifts))


def build_rational_term(hp: HParams) -> tuple[RationalFunction, bool]:
    """Summand of F for integer parameters as a rational function of mu, and the sign flag."""
    vals = [hp.h0, *hp.h]
    if any(Fraction(v).denominator != 1 for v in vals):
        raise ValueError("build_rational_term needs integer parameters")
    h0, hs = int(Fraction(hp.h0)), [int(Fraction(v)) for v in hp.h]
    if h0 < 1 or any(v < 1 for v in hs):
        raise ValueError("parameters must be positive integers")
    num, den = Counter(), Counter()
    lead = Fraction(2)
    # (h0 + 2t) = 2 (t + h0/2)
    half = Fraction(h0, 2)
    if half.denominator == 1:
        num[int(half)] += 1
    else:
        lead = Fraction(1)
        extra = (Fraction(h0), Fraction(2))
    # j = 0 factor Gamma(h0 + t) / Gamma(1 + t), then the lower parameters
    for hj in [h0, *hs]:
        lo, hi = hj, 1 + h0 - hj  # Gamma(t + lo) / Gamma(t + hi)
        if lo <= hi:
            for c in range(lo, hi):
                den[c] += 1
        else:
            for c in range(hi, lo):
                num[c] += 1
    rf = RationalFunction.from_factors(lead, num, den)
    if half.denominator != 1:
        rf = RationalFunction(_pmul(rf.numerator, extra), rf.denominator, rf.den_shifts)
    alternating = (hp.k + 1) % 2 == 1
    return rf, alternating


@dataclass(frozen=True)
class PartialFractions:
    """sum over (i, j) of coeffs[(i, j)] / (t + j)^i."""

    poles: tuple
    coeffs: Mapping[tuple, Fraction]

    def __call__(self, t):
        t = Fraction(t)
        return sum((c / (t + j) ** i for (i, j), c in self.coeffs.items()), Fraction(0))

    def to_rational(self) -> RationalFunction:
        mult = {j: max(i for (i, jj) in self.coeffs if jj == j) for j in self.poles}
        den = Counter(mult)
        num = ()
        for (i, j), c in self.coeffs.items():
            rest = den.copy()
            rest[j] -= i
            num = _padd(num, _from_roots(+rest, c))
        return RationalFunction(num or (0,), _from_roots(den), dict(den))


def _integer_roots(den) -> Counter:
    """Factor a monic polynomial as prod (t + j)^m over the integers, or raise."""
    roots = Counter()
    p = tuple(den)
    while len(p) > 1 and p[0] == 0:
        roots[0] += 1
        p = p[1:]
    while len(p) > 1:
        coeffs = [float(c) for c in reversed(p)]
        cands = sorted({int(round(-z.real)) for z in np.roots(coeffs)})
        progress = False
        for c in cands:
            while len(p) > 1:
                q, r = _divide_linear(p, Fraction(c))
                if r != 0:
                    break
                roots[c] += 1
                p = q
                progress = True
        if not progress:
            raise ValueError("non-integer pole detected")
    return roots


def partial_fractions(rf: RationalFunction) -> PartialFractions:
    """Residues at each integer pole from the Taylor expansion of the cofactor."""
    shifts = Counter(rf.den_shifts) if rf.den_shifts else _integer_roots(rf.denominator)
    if len(rf.numerator) >= len(rf.denominator):
        raise ValueError("partial_fractions needs a proper rational function")
    coeffs = {}
    for j, m in shifts.items():
        others = shifts.copy()
        del others[j]
        R = _from_roots(others)
        # expand N(s - j) / R(s - j) to order s^(m-1)
        N = _taylor_shift(rf.numerator, Fraction(-j)) + (Fraction(0),) * m
        Rs = _taylor_shift(R, Fraction(-j)) + (Fraction(0),) * m
        series = []
        for l in range(m):
            acc = N[l] - sum(series[i] * Rs[l - i] for i in range(l))
            series.append(acc / Rs[0])
        for l, c in enumerate(series):
            if c:
                coeffs[(m - l, j)] = c
    return PartialFractions(tuple(sorted(shifts)), coeffs)


# -- linear forms ------------------------------------------------------------------

def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LinearForm:
    q0: Fraction
    qzeta: Mapping[int, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "q0", Fraction(self.q0))
        object.__setattr__(self, "qzeta", {int(s): Fraction(v) for s, v in sorted(self.qzeta.items()) if v != 0})

    def value(self, ctx: PrecisionContext | None = None):
        ctx = ctx or make_context()
        m = ctx.mp
        total = ctx.mpf(self.q0)
        for s, q in self.qzeta.items():
            total += m.mpf(q.numerator) / q.denominator * zeta_const(s, ctx)
        return total

    def scaled(self, factor) -> "LinearForm":
        factor = Fraction(factor)
        return LinearForm(self.q0 * factor, {s: q * factor for s, q in self.qzeta.items()})

    def is_integral(self) -> bool:
        return self.q0.denominator == 1 and all(q.denominator == 1 for q in self.qzeta.values())

    def to_json(self) -> dict:
        return {"q0": _frac_str(self.q0), "zeta": {str(s): _frac_str(q) for s, q in self.qzeta.items()}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "LinearForm":
        return cls(Fraction(doc["q0"]), {int(s): Fraction(v) for s, v in doc["zeta"].items()})


@lru_cache(maxsize=None)
def _harmonic(upto: int, i: int, alternating: bool) -> Fraction:
    """sum_{m=1}^{upto} (+-1)^(m-1) / m^i."""
    return sum((Fraction((-1) ** (m - 1) if alternating else 1, m**i) for m in range(1, upto + 1)), Fraction(0))


def sum_to_linear_form(pf: PartialFractions, alternating: bool) -> LinearForm:
    """Exact value of sum_{mu >= 0} (+-1)^mu pf(mu)."""
    if any(j < 1 for j in pf.poles):
        raise ValueError("a pole at a nonnegative integer makes a summand infinite")
    q0 = Fraction(0)
    qz: dict[int, Fraction] = {}
    ones = {j: c for (i, j), c in pf.coeffs.items() if i == 1}
    if alternating:
        log2 = sum((c * (-1) ** (j - 1) for j, c in ones.items()), Fraction(0))
        if log2 != 0:
            raise NonZetaResidueError(f"non-zeta residue: ln 2 coefficient {log2}")
    elif sum(ones.values(), Fraction(0)) != 0:
        raise ValueError("series diverges: residues of simple poles do not cancel")
    for (i, j), c in pf.coeffs.items():
        if alternating:
            # sum_mu (-1)^mu / (mu+j)^i = (-1)^(j-1) [eta(i) - sum_{m<j} (-1)^(m-1)/m^i]
            sign = (-1) ** (j - 1)
            if i >= 2:
                qz[i] = qz.get(i, Fraction(0)) + sign * c * eta_to_zeta_factor(i)
            q0 -= sign * c * _harmonic(j - 1, i, True)
        else:
            if i >= 2:
                qz[i] = qz.get(i, Fraction(0)) + c
            q0 -= c * _harmonic(j - 1, i, False)
    return LinearForm(q0, qz)


def _specialization(k: int, n: int, r: int) -> HParams:
    return HParams((2 * r + 1) * n + 2, tuple([r * n + 1] * (k + 2)))


def linear_form_for(k: int, n: int, r: int = 1) -> LinearForm:
    """F_{k+2}((2r+1)n+2; rn+1, ..., rn+1) as q0 + sum q_s zeta(s)."""
    if k < 2 or n < 0 or r < 1:
        raise ValueError("need k >= 2, n >= 0, r >= 1")
    rf, alt = build_rational_term(_specialization(k, n, r))
    excess = len(rf.numerator) - len(rf.denominator)
    if excess >= (-1 if alt else -2) + 1:
        raise ValueError(f"F diverges at (k, n, r) = ({k}, {n}, {r}): summand has degree {excess}")
    return sum_to_linear_form(partial_fractions(rf), alt)


def theorem_prefactor(hp: HParams) -> Fraction:
    """prod_{j=1}^{k+1} Gamma(1+h0-h_j-h_{j+1}) / (Gamma(h_1) Gamma(h_{k+2})) for integer h."""
    h0, hs = int(hp.h0), [int(v) for v in hp.h]
    args = [1 + h0 - hs[j] - hs[j + 1] for j in range(len(hs) - 1)]
    if any(a < 1 for a in args + [hs[0], hs[-1]]):
        raise ValueError("gamma argument at a pole")
    num = math.prod(math.factorial(a - 1) for a in args)
    return Fraction(num, math.factorial(hs[0] - 1) * math.factorial(hs[-1] - 1))


# -- arithmetic normalizers ---------------------------------------------------------

def primes_below(n: int) -> np.ndarray:
    """Primes p < n by a sieve of Eratosthenes."""
    if n <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _phi_primes(n: int) -> np.ndarray:
    ps = primes_below(n)
    # {n/p} >= 2/3  <=>  3 (n mod p) >= 2 p, exact in integers
    return ps[3 * (n % ps) >= 2 * ps]


@dataclass(frozen=True)
class ArithNormalizers:
    n: int
    D_n: int
    Phi_n: int


def normalizers(n: int) -> ArithNormalizers:
    if n < 0:
        raise ValueError("n must be nonnegative")
    D = 1
    for p in primes_below(n + 1).tolist():
        pk = p
        while pk * p <= n:
            pk *= p
        D *= pk
    phi = math.prod(_phi_primes(n).tolist()) if n >= 2 else 1
    return ArithNormalizers(n, D, phi)


def phi_growth(n: int) -> float:
    """(ln Phi_n) / n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(np.sum(np.log(_phi_primes(n).astype(float)))) / n


@dataclass(frozen=True)
class InclusionReport:
    k: int
    n: int
    form: LinearForm  # D_n^(k+1) Phi_n^(-1) J_{k,n}
    integral: bool
    parity_ok: bool
    min_exponent: int | None  # least e <= k+1 with D_n^e Phi_n^(-1) J_{k,n} integral

    @property
    def passed(self) -> bool:
        return self.integral and self.parity_ok


def inclusion_report(k: int, n: int) -> InclusionReport:
    if k < 3 or k % 2 == 0:
        raise ValueError("inclusion_check needs odd k >= 3")
    J = linear_form_for(k, n, 1).scaled(theorem_prefactor(_specialization(k, n, 1)))
    norm = normalizers(n)
    base = J.scaled(Fraction(1, norm.Phi_n))
    scaled = base.scaled(norm.D_n ** (k + 1))
    parity_ok = all(s % 2 == 1 and s >= 3 for s in scaled.qzeta)
    min_e = None
    for e in range(k + 2):
        if base.scaled(norm.D_n**e).is_integral():
            min_e = e
            break
    return InclusionReport(k, n, scaled, scaled.is_integral(), parity_ok, min_e)


def inclusion_check(k: int, n: int) -> bool:
    """Whether D_n^(k+1) Phi_n^(-1) J_{k,n} lies in Z + Z zeta(3) + ... + Z zeta(k)."""
    return inclusion_report(k, n).passed
