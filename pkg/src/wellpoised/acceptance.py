"""Acceptance suite: nine end-to-end checks, one pass/fail line each.

Run with ``python -m wellpoised.acceptance`` (optionally followed by criterion
numbers).  Random parameter sets come from a fixed seed, so every run checks
the same cases.
"""
from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .barnes import ContourConfig, EpsilonSign, barnes_side, euler_side, gauss_2f1_side, lemma3_check
from .hyperseries import HParams, dougall_F3, eval_F
from .identity import (
    c_transform,
    group_closure,
    h_to_ab,
    normalized_J,
    normalized_invariant,
    permutation_generators,
    sample_theorem_params,
    verify_theorem,
)
from .multint import ABParams, McConfig, eval_J_quad, eval_Q
from .numctx import make_context, zeta_const
from .zetaforms import RationalFunction, inclusion_check, linear_form_for, partial_fractions, phi_growth

SEED = 20240601
PHI_LIMIT = 0.24101875


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title}: {self.detail} ({self.seconds:.1f} s)"


def theorem_identity() -> tuple[bool, str]:
    ctx = make_context(128, 1e-20)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    fails = []
    for k in (1, 2, 3):
        for _ in range(20):
            r = verify_theorem(sample_theorem_params(k, rng), ctx, tol=1e-8)
            worst = max(worst, r.rel_diff)
            if not r.passed:
                fails.append(k)
    z_worst = 0.0
    for _ in range(5):
        r = verify_theorem(sample_theorem_params(4, rng), ctx, method="mc", mc=McConfig(samples=10**7, seed=SEED))
        z_worst = max(z_worst, abs(float(r.lhs) - r.rhs) / r.rhs_error)
        if not r.passed:
            fails.append(4)
    return not fails, f"worst rel diff {worst:.2e} (k<=3, 60 sets); worst k=4 deviation {z_worst:.2f} stderr (5 sets)"


def dougall() -> tuple[bool, str]:
    ctx = make_context(128, 1e-20)
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    n = 0
    while n < 50:
        h = rng.uniform(0.2, 3.0, size=3)
        h0 = h.sum() - 0.5 + rng.uniform(0.0, 3.0)  # 1 + h0 > sum h + 0.5
        hp = HParams(float(h0), tuple(map(float, h)))
        f = eval_F(hp, ctx, rank=1, warn_slow=False).value
        d = dougall_F3(hp.h0, *hp.h, ctx=ctx)
        worst = max(worst, float(abs(f - d) / abs(d)))
        n += 1
    return worst <= 1e-12, f"worst rel diff {worst:.2e} over 50 sets"


def triad() -> tuple[bool, str]:
    ctx = make_context(128, 1e-15)
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    branch_cases = 0
    for i in range(25):
        a0, a = rng.uniform(0.3, 2.0, size=2)
        b = a0 + a + 0.5 + rng.uniform(0.0, 1.5)
        z = 1.0 if i % 8 == 7 else rng.uniform(-1.0, 0.9)
        branch_cases += z > 0
        t0 = min(a0, a) / 2
        e = euler_side(a0, a, b, z, ctx)
        br = barnes_side(a0, a, b, z, ContourConfig(t0), ctx).value
        g = gauss_2f1_side(a0, a, b, z, ctx)
        for x, y in ((e, br), (e, g), (br, g)):
            worst = max(worst, float(abs(x - y) / abs(e)))
    return worst <= 1e-8, f"worst pairwise rel diff {worst:.2e} over 25 sets ({branch_cases} with z in (0, 1])"


def contour_recursion() -> tuple[bool, str]:
    ctx = make_context(128, 1e-20)
    z2, z3 = float(zeta_const(2, ctx)), 2 * float(zeta_const(3, ctx))
    cases = [
        (ABParams(1, (1, 1), (2, 2)), 0, z2),
        (ABParams(1, (1, 1, 1), (2, 2, 2)), 1, z3),
        (ABParams(1, (1, 1, 1), (2, 2, 2)), -1, z3),
    ]
    diffs = []
    rhs = []
    for ab, e, ref in cases:
        r = lemma3_check(ab, EpsilonSign(e, ab.k), ContourConfig(0.5), ctx)
        diffs.append(max(abs(r.lhs - r.rhs), abs(r.lhs - ref), abs(r.rhs_imag)))
        rhs.append(r.rhs)
    diffs.append(abs(rhs[1] - rhs[2]))
    worst = max(diffs)
    return worst <= 1e-6, f"worst |lhs - rhs| {worst:.2e} (k=2; k=3 with eps=+1, -1; sign agreement)"


def zeta_forms() -> tuple[bool, str]:
    ctx = make_context(128, 1e-20)
    ok = linear_form_for(2, 0, 1).to_json() == {"q0": "0", "zeta": {"2": "1"}}
    ok &= linear_form_for(3, 0, 1).to_json() == {"q0": "0", "zeta": {"3": "2"}}
    worst = 0.0
    parity = True
    for k, n, r in itertools.product((3, 5), (1, 2), (1, 2)):
        form = linear_form_for(k, n, r)
        parity &= all(s % 2 == k % 2 for s in form.qzeta)
        hp = HParams((2 * r + 1) * n + 2, tuple([r * n + 1] * (k + 2)))
        f = eval_F(hp, ctx, warn_slow=False).value
        worst = max(worst, float(abs(form.value(ctx) - f) / abs(f)))
    passed = ok and parity and worst <= 1e-10
    return passed, f"unit forms exact: {ok}; parity: {parity}; worst rel diff vs series {worst:.2e}"


def inclusion() -> tuple[bool, str]:
    results = {(k, n): inclusion_check(k, n) for k in (3, 5) for n in range(4)}
    bad = [kn for kn, v in results.items() if not v]
    return not bad, "all 8 cases integral" if not bad else f"failing (k, n): {bad}"


def phi_asymptotics() -> tuple[bool, str]:
    t = time.perf_counter()
    g = phi_growth(10**5)
    dt = time.perf_counter() - t
    return abs(g - PHI_LIMIT) <= 0.01 and dt <= 10, f"(ln Phi_n)/n = {g:.6f} at n = 1e5, |diff| {abs(g - PHI_LIMIT):.2e}, sieve {dt:.2f} s"


def group_orders() -> tuple[bool, str]:
    got = {}
    for k in (2, 3):
        gens = permutation_generators(k)
        got[k] = (group_closure(gens)[0], group_closure(gens + [c_transform(k)])[0])
    ok = got[2] == (24, 120) and got[3] == (120, 1920)
    return ok, f"k=2: {got[2][0]} -> {got[2][1]}; k=3: {got[3][0]} -> {got[3][1]}"


def _random_rational_function(rng) -> RationalFunction:
    poles = {int(j): int(m) for j, m in zip(rng.choice(np.arange(-6, 10), size=rng.integers(1, 5), replace=False), rng.integers(1, 4, size=5))}
    deg = sum(poles.values())
    num = [Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9))) for _ in range(int(rng.integers(1, deg + 1)))]
    if all(c == 0 for c in num):
        num[0] = Fraction(1)
    den = (Fraction(1),)
    for j, m in poles.items():
        for _ in range(m):
            den = tuple(Fraction(0) if i == len(den) else den[i] for i in range(len(den) + 1))
            den = tuple((den[i - 1] if i else 0) + j * den[i] for i in range(len(den)))
    return RationalFunction(tuple(num), den)


def property_suites() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 9)
    notes = []
    ok = True
    # 0 < Q_k < 1 on the open cube
    viol = 0
    for k in range(1, 7):
        x = rng.uniform(0.0, 1.0, size=(10**5, k))
        x = x[np.all((x > 0) & (x < 1), axis=1)]
        q = eval_Q(x)
        viol += int(np.sum((q <= 0) | (q >= 1)))
    ok &= viol == 0
    notes.append(f"Q bound violations {viol}")
    # recursions agree within 4 ulps of 1 (Q lies in (0, 1))
    worst_ulps = 0.0
    for k in range(1, 7):
        x = rng.uniform(0.0, 1.0, size=(10**4, k))
        qs = [eval_Q(x, v) for v in ("nested", "recursive_front", "recursive_back")]
        d = max(np.max(np.abs(qs[0] - qs[1])), np.max(np.abs(qs[0] - qs[2])))
        worst_ulps = max(worst_ulps, float(d / np.finfo(float).eps))
    ok &= worst_ulps <= 4
    notes.append(f"recursions within {worst_ulps:.1f} ulp")
    # permutation invariance of F / prod Gamma(h_j)
    ctx = make_context(128, 1e-20)
    worst_f = 0.0
    for k in (1, 2, 3):
        hp = sample_theorem_params(k, rng)
        base = normalized_invariant(hp, ctx)
        for _ in range(5):
            perm = rng.permutation(k + 2)
            other = normalized_invariant(hp.permuted(perm), ctx)
            worst_f = max(worst_f, float(abs(other - base) / abs(base)))
    ok &= worst_f <= 1e-8
    notes.append(f"series invariant {worst_f:.1e}")
    # permutation invariance of the normalized J quantity
    worst_j = 0.0
    for k in (2, 3):
        hp = sample_theorem_params(k, rng, margin=0.5)
        ab = h_to_ab(hp)
        base = normalized_J(ab, float(eval_J_quad(ab, target_rel=1e-11, max_nodes=385).value))
        for _ in range(20):
            ab2 = h_to_ab(hp.permuted(rng.permutation(k + 2)))
            val = normalized_J(ab2, float(eval_J_quad(ab2, target_rel=1e-11, max_nodes=385).value))
            worst_j = max(worst_j, abs(val - base) / abs(base))
    ok &= worst_j <= 1e-8
    notes.append(f"J invariant {worst_j:.1e}")
    # partial fractions round trip
    bad = 0
    for _ in range(100):
        rf = _random_rational_function(rng)
        pf = partial_fractions(rf)
        back = pf.to_rational()
        bad += (back.numerator, back.denominator) != (rf.numerator, rf.denominator)
    ok &= bad == 0
    notes.append(f"round-trip failures {bad}/100")
    return ok, "; ".join(notes)


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("theorem identity", theorem_identity),
    2: ("Dougall closed form", dougall),
    3: ("Euler / Barnes / Gauss triad", triad),
    4: ("contour recursion", contour_recursion),
    5: ("exact zeta forms", zeta_forms),
    6: ("arithmetic inclusion", inclusion),
    7: ("Phi_n asymptotics", phi_asymptotics),
    8: ("group orders", group_orders),
    9: ("property suites", property_suites),
}


def run_criterion(number: int) -> Outcome:
    title, fn = CRITERIA[number]
    t = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, reported on its line
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return Outcome(number, title, passed, detail, time.perf_counter() - t)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    numbers = [int(a) for a in argv] or sorted(CRITERIA)
    outcomes = []
    for n in numbers:
        out = run_criterion(n)
        print(out.line(), flush=True)
        outcomes.append(out)
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
