"""Parameter correspondence between F_{k+2}(h) and J_k(a, b), the identity
check, and the group generated by permutations of h_1..h_{k+2} and the extra
involution coming from (x_{k-1}, x_k) -> (1 - x_k, 1 - x_{k-1}).

Group elements are exact affine maps v -> M v + c on (h_0, ..., h_{k+2}).
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .hyperseries import ConditionReport, HParams, check_conditions, eval_F
from .multint import ABParams, McConfig, eval_J_mc, eval_J_quad
from .numctx import PrecisionContext, gamma, make_context

__all__ = [
    "ConditionError",
    "WellPoisedError",
    "GroupCapError",
    "TheoremCheck",
    "AffineMap",
    "EParams",
    "h_to_ab",
    "ab_to_h",
    "theorem_prefactor_hp",
    "verify_theorem",
    "normalized_invariant",
    "normalized_J",
    "induced_ab_action",
    "c_transform",
    "permutation_generators",
    "group_closure",
    "e_parameters",
    "sample_theorem_params",
]

GROUP_CAP = 100_000


class ConditionError(ValueError):
    """Parameters violate a convergence condition of the identity."""

    def __init__(self, message: str, report: ConditionReport | None = None):
        super().__init__(message)
        self.report = report


class WellPoisedError(ValueError):
    """(a, b) has no well-poised preimage: b_j + a_{j+1} is not constant."""


class GroupCapError(RuntimeError):
    pass


# -- correspondence -------------------------------------------------------------

def h_to_ab(hp: HParams) -> ABParams:
    """a0 = h1, a_j = h_{j+1}, b_j = 1 + h0 - h_{j+2} for j = 1..k, where k = hp.k - 2."""
    k = hp.k - 2
    if k < 1:
        raise ValueError("need k + 2 >= 3 lower parameters")
    h0, h = hp.h0, hp.h
    return ABParams(h[0], tuple(h[1 : k + 1]), tuple(1 + h0 - h[j + 1] for j in range(1, k + 1)))


def _same(x, y) -> bool:
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return x == y
    return math.isclose(float(x), float(y), rel_tol=1e-12, abs_tol=1e-12)


def ab_to_h(ab: ABParams) -> HParams:
    """Inverse of h_to_ab.  For k = 1, h0 = a1 + b1 - 1 by convention."""
    k = ab.k
    if k == 1:
        h0 = ab.a[0] + ab.b[0] - 1
    else:
        sums = [ab.b[j] + ab.a[j + 1] for j in range(k - 1)]
        if not all(_same(s, sums[0]) for s in sums):
            raise WellPoisedError("b_j + a_{j+1} must be the same for j = 1..k-1")
        h0 = sums[0] - 1
    return HParams(h0, (ab.a0, *ab.a, 1 + h0 - ab.b[-1]))


def theorem_prefactor_hp(hp: HParams, ctx: PrecisionContext):
    """prod_{j=1}^{k+1} Gamma(1+h0-h_j-h_{j+1}) / (Gamma(h_1) Gamma(h_{k+2}))."""
    h0 = ctx.mpf(hp.h0)
    h = [ctx.mpf(v) for v in hp.h]
    num = ctx.mp.fprod(gamma(1 + h0 - h[j] - h[j + 1], ctx) for j in range(len(h) - 1))
    return num / (gamma(h[0], ctx) * gamma(h[-1], ctx))


@dataclass(frozen=True)
class TheoremCheck:
    lhs: object
    rhs: float
    rhs_error: float
    method: str
    passed: bool
    conditions: ConditionReport

    @property
    def rel_diff(self) -> float:
        return abs(float(self.lhs) - self.rhs) / abs(float(self.lhs))


def verify_theorem(
    hp: HParams,
    ctx: PrecisionContext | None = None,
    *,
    tol: float = 1e-8,
    nodes: int | None = None,
    mc: McConfig | None = None,
    method: str = "auto",
) -> TheoremCheck:
    """Compare prefactor * F_{k+2}(h) with J_k at the corresponding (a, b).

    ``method`` 'auto' uses quadrature for k <= 3 and Monte Carlo above; the
    check passes on relative agreement ``tol`` (quadrature) or 5 standard
    errors (Monte Carlo).
    """
    ctx = ctx or make_context()
    rep = check_conditions(hp)
    if not rep.all_ok:
        raise ConditionError(
            f"conditions failed: margin {rep.cond5_ok}, interlacing {rep.cond6_ok}, poles {rep.cond7_ok}", rep
        )
    if rep.pair_margin <= 0:
        raise ConditionError(f"1 + h0 - h_j - h_(j+1) must be positive (min {rep.pair_margin:.3g})", rep)
    k = hp.k - 2
    ab = h_to_ab(hp)
    lhs = theorem_prefactor_hp(hp, ctx) * eval_F(hp, ctx, warn_slow=False).value
    if method == "auto":
        method = "quadrature" if k <= 3 else "mc"
    if method == "quadrature":
        q = eval_J_quad(ab, nodes, ctx, target_rel=tol / 20, max_nodes={1: 1025, 2: 513, 3: 385}.get(k, 129))
        rhs, err = float(q.value), q.error
        passed = abs(float(lhs) - rhs) <= tol * abs(float(lhs))
    elif method == "mc":
        r = eval_J_mc(ab, mc or McConfig(samples=10**7))
        rhs, err = r.estimate, r.stderr
        passed = abs(float(lhs) - rhs) <= 5 * err
    else:
        raise ValueError(f"unknown method {method!r}")
    return TheoremCheck(lhs, rhs, err, method, passed, rep)


def normalized_invariant(hp: HParams, ctx: PrecisionContext | None = None):
    """F(h) / prod Gamma(h_j); symmetric in h_1..h_{k+2}."""
    ctx = ctx or make_context()
    val = eval_F(hp, ctx, warn_slow=False).value
    return val / ctx.mp.fprod(gamma(ctx.mpf(v), ctx) for v in hp.h)


def normalized_J(ab: ABParams, value: float) -> float:
    """J / [prod_{j>=1} Gamma(a_j) Gamma(b_1+a_2-a_0-a_1) prod Gamma(b_j-a_j)] for a J value of ab.

    Through the correspondence this is the symmetric F / prod Gamma(h_j).
    """
    f = ab.as_floats()
    h = ab_to_h(f)
    pair1 = 1 + float(h.h0) - f.a0 - f.a[0]
    logs = sum(gammaln(v) for v in f.a) + gammaln(pair1) + sum(gammaln(b - a) for a, b in zip(f.a, f.b))
    return value / math.exp(logs)


# -- affine maps --------------------------------------------------------------------

def _fr_matrix(rows) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class AffineMap:
    """v -> matrix @ v + offset on (h_0, ..., h_{k+2})."""

    matrix: tuple
    offset: tuple

    def __post_init__(self):
        m = _fr_matrix(self.matrix)
        c = tuple(Fraction(x) for x in self.offset)
        if any(len(r) != len(m) for r in m) or len(c) != len(m):
            raise ValueError("matrix must be square and match the offset")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", c)
        if self.det() == 0:
            raise ValueError("affine map is not invertible")

    @property
    def dim(self) -> int:
        return len(self.offset)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls(tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)), (0,) * dim)

    def __call__(self, v: Sequence):
        return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) + c for row, c in zip(self.matrix, self.offset))

    def apply_h(self, hp: HParams) -> HParams:
        out = self([Fraction(x) if isinstance(x, (int, Fraction)) else x for x in hp.as_list()])
        if not all(isinstance(x, (int, Fraction)) for x in hp.as_list()):
            out = tuple(float(x) for x in out)
        return HParams.of(out)

    def apply_ab(self, ab: ABParams) -> ABParams:
        """The induced map on (a, b) through the correspondence."""
        return h_to_ab(self.apply_h(ab_to_h(ab)))

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other."""
        n = self.dim
        A, B = self.matrix, other.matrix
        M = tuple(tuple(sum((A[i][l] * B[l][j] for l in range(n)), Fraction(0)) for j in range(n)) for i in range(n))
        return AffineMap(M, self(other.offset))

    def det(self) -> Fraction:
        n = self.dim
        a = [list(r) for r in self.matrix]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            det *= a[col][col]
            for r in range(col + 1, n):
                f = a[r][col] / a[col][col]
                if f:
                    for c in range(col, n):
                        a[r][c] -= f * a[col][c]
        return det

    def inverse(self) -> "AffineMap":
        n = self.dim
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.matrix)]
        for col in range(n):
            piv = next(r for r in range(col, n) if a[r][col] != 0)
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        inv = tuple(tuple(row[n:]) for row in a)
        lin = AffineMap(inv, (0,) * n)
        return AffineMap(inv, tuple(-x for x in lin(self.offset)))

    def to_json(self) -> dict:
        s = lambda q: str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        return {"matrix": [[s(x) for x in row] for row in self.matrix], "offset": [s(x) for x in self.offset]}

    @classmethod
    def from_json(cls, doc: dict) -> "AffineMap":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in doc["matrix"]), tuple(Fraction(x) for x in doc["offset"]))


def induced_ab_action(sigma: Sequence[int], k: int) -> AffineMap:
    """Permutation of h_1..h_{k+2}: the new h_i is the old h_{sigma[i-1]} (sigma uses labels 1..k+2)."""
    sigma = list(sigma)
    if sorted(sigma) != list(range(1, k + 3)):
        raise ValueError(f"sigma must permute 1..{k + 2}")
    n = k + 3
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = 1
    for i, s in enumerate(sigma, start=1):
        rows[i][s] = 1
    return AffineMap(tuple(map(tuple, rows)), (0,) * n)


def permutation_generators(k: int) -> list[AffineMap]:
    """Adjacent transpositions of h_1..h_{k+2}."""
    gens = []
    for i in range(1, k + 2):
        sigma = list(range(1, k + 3))
        sigma[i - 1], sigma[i] = sigma[i], sigma[i - 1]
        gens.append(induced_ab_action(sigma, k))
    return gens


def _affine_from_rows(rows: dict, n: int) -> AffineMap:
    """rows[i] = (constant, {j: coeff}) describing h_i' = constant + sum coeff h_j; missing rows are identity."""
    M = [[0] * n for _ in range(n)]
    c = [0] * n
    for i in range(n):
        const, coeffs = rows.get(i, (0, {i: 1}))
        c[i] = const
        for j, v in coeffs.items():
            M[i][j] = v
    return AffineMap(tuple(map(tuple, M)), tuple(c))


def c_transform(k: int) -> AffineMap:
    """Action on h of the substitution (x_{k-1}, x_k) -> (1 - x_k, 1 - x_{k-1}) in J_k.

    On (a, b) it reads, for k = 2, (a0; a1, a2; b1, b2) -> (a0; b2-a2, b1-a1; b2, b1)
    and, for k = 3, (a0; a1, a2, a3; b1, b2, b3) -> (a0; a1, b3-a3, b2-a2; b1, b3, b2).
    """
    if k == 2:
        rows = {
            0: (1, {0: 2, 2: -1, 3: -1, 4: -1}),
            2: (1, {0: 1, 3: -1, 4: -1}),
            3: (1, {0: 1, 2: -1, 3: -1}),
            4: (1, {0: 1, 2: -1, 4: -1}),
        }
    elif k == 3:
        rows = {
            0: (1, {0: 2, 3: -1, 4: -1, 5: -1}),
            3: (1, {0: 1, 4: -1, 5: -1}),
            4: (1, {0: 1, 3: -1, 4: -1}),
            5: (1, {0: 1, 3: -1, 5: -1}),
        }
    else:
        raise ValueError("the extra transformation exists only for k = 2 and k = 3")
    return _affine_from_rows(rows, k + 3)


def _int_form(g: AffineMap):
    """(matrix, offset) as nested int tuples, or None if some entry is not an integer."""
    if any(x.denominator != 1 for row in g.matrix for x in row) or any(x.denominator != 1 for x in g.offset):
        return None
    return tuple(tuple(int(x) for x in row) for row in g.matrix), tuple(int(x) for x in g.offset)


def _int_compose(s, g):
    A, c = s
    B, d = g
    n = len(c)
    M = tuple(tuple(sum(A[i][l] * B[l][j] for l in range(n)) for j in range(n)) for i in range(n))
    off = tuple(sum(A[i][l] * d[l] for l in range(n)) + c[i] for i in range(n))
    return M, off


def group_closure(generators: Sequence[AffineMap], cap: int = GROUP_CAP) -> tuple[int, set]:
    """Breadth-first closure of the generated group under composition."""
    if not generators:
        raise ValueError("need at least one generator")
    ints = [_int_form(g) for g in generators]
    if all(f is not None for f in ints):
        # integer maps stay integer under composition: close over plain ints
        compose, gens = _int_compose, ints
        ident = _int_form(AffineMap.identity(generators[0].dim))
    else:
        compose, gens = (lambda s, g: s.compose(g)), list(generators)
        ident = AffineMap.identity(generators[0].dim)
    seen = {ident}
    frontier = deque([ident])
    while frontier:
        g = frontier.popleft()
        for s in gens:
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                if len(seen) > cap:
                    raise GroupCapError(f"closure exceeded {cap} elements")
                frontier.append(h)
    if compose is _int_compose:
        seen = {AffineMap(M, off) for M, off in seen}
    return len(seen), seen


# -- e-parameters --------------------------------------------------------------------

@dataclass(frozen=True)
class EParams:
    e0: tuple  # e_{0l} = h_l - 1
    e: dict  # (j, l) -> h0 - h_j - h_l, 1 <= j < l <= k+2

    def multiset(self) -> list:
        return sorted([*self.e0, *self.e.values()])


def e_parameters(hp: HParams) -> EParams:
    h0, h = hp.h0, hp.h
    n = len(h)
    e0 = tuple(x - 1 for x in h)
    e = {(j + 1, l + 1): h0 - h[j] - h[l] for j, l in itertools.combinations(range(n), 2)}
    return EParams(e0, e)


# -- random admissible parameters -----------------------------------------------------

def sample_theorem_params(k: int, rng: np.random.Generator, margin: float = 0.3) -> HParams:
    """Random h passing check_conditions, with every margin at least ``margin``."""
    h = rng.uniform(0.3, 1.5, size=k + 2)
    need5 = 2.0 / (k + 1) * h.sum() - 1
    need_pair = max(h[j] + h[j + 1] for j in range(k + 1)) - 1
    need6 = max(h[j] + h[j + 1] for j in range(1, k + 1)) - 1 if k >= 1 else -math.inf
    h0 = max(need5, need_pair, need6) + margin + rng.uniform(0.0, 1.2)
    return HParams(float(h0), tuple(float(x) for x in h))
